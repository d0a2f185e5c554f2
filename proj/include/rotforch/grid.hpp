#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rotforch/math.hpp"

namespace rotforch {

/// Uniform cell-centered Cartesian grid over an axis-aligned box.
/// Cell (i,j,k) has center lo + ((i+1/2)dx, (j+1/2)dy, (k+1/2)dz); faces
/// normal to axis d are indexed 0..n[d] along that axis.
struct Grid {
    Vec3 lo, hi;
    std::array<int, 3> n{};
    Vec3 dx;

    static Grid make(const Vec3& lo, const Vec3& hi, const std::array<int, 3>& n) {
        Grid g{lo, hi, n, {}};
        for (int d = 0; d < 3; ++d) {
            if (n[d] < 4) throw std::invalid_argument("grid: need at least 4 cells per axis");
            if (!(hi[d] > lo[d])) throw std::invalid_argument("grid: box must have positive extent");
            g.dx[d] = (hi[d] - lo[d]) / n[d];
        }
        return g;
    }

    std::size_t cells() const {
        return static_cast<std::size_t>(n[0]) * n[1] * n[2];
    }
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    Vec3 center(int i, int j, int k) const {
        return {lo.x + (i + 0.5) * dx.x, lo.y + (j + 0.5) * dx.y, lo.z + (k + 0.5) * dx.z};
    }
    /// Center of the face normal to `axis` with face index f along that axis
    /// and cell indices (a,b) along the two remaining axes in cyclic order.
    Vec3 face_center(int axis, int f, int a, int b) const {
        Vec3 p;
        const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        p[axis] = lo[axis] + f * dx[axis];
        p[a1] = lo[a1] + (a + 0.5) * dx[a1];
        p[a2] = lo[a2] + (b + 0.5) * dx[a2];
        return p;
    }
    double cell_volume() const { return dx.x * dx.y * dx.z; }
    double face_area(int axis) const { return cell_volume() / dx[axis]; }

    bool same_as(const Grid& o) const {
        return n == o.n && (lo - o.lo).norm() == 0.0 && (hi - o.hi).norm() == 0.0;
    }
};

struct ScalarField {
    Grid grid;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), data(g.cells(), fill) {}

    static ScalarField from_function(const Grid& g, const std::function<double(const Vec3&)>& f) {
        ScalarField out(g);
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) out(i, j, k) = f(g.center(i, j, k));
        return out;
    }

    double& operator()(int i, int j, int k) { return data[grid.idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data[grid.idx(i, j, k)]; }
};

struct VecField {
    Grid grid;
    std::vector<Vec3> data;

    VecField() = default;
    explicit VecField(const Grid& g) : grid(g), data(g.cells()) {}

    Vec3& operator()(int i, int j, int k) { return data[grid.idx(i, j, k)]; }
    const Vec3& operator()(int i, int j, int k) const { return data[grid.idx(i, j, k)]; }
};

/// One scalar per face, grouped by face orientation.
struct FaceField {
    Grid grid;
    std::array<std::vector<double>, 3> comp;

    FaceField() = default;
    explicit FaceField(const Grid& g) : grid(g) {
        for (int d = 0; d < 3; ++d) comp[d].assign(face_count(g, d), 0.0);
    }

    static std::size_t face_count(const Grid& g, int d) {
        std::size_t c = g.n[d] + 1;
        for (int e = 0; e < 3; ++e)
            if (e != d) c *= g.n[e];
        return c;
    }

    /// Face index: f runs along the face-normal axis (0..n[d]); (i,j,k) are
    /// the cell indices along the full 3D layout with component d replaced
    /// by the face index.
    std::size_t fidx(int d, int i, int j, int k) const {
        const int nx = (d == 0) ? grid.n[0] + 1 : grid.n[0];
        const int ny = (d == 1) ? grid.n[1] + 1 : grid.n[1];
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    double& at(int d, int i, int j, int k) { return comp[d][fidx(d, i, j, k)]; }
    double at(int d, int i, int j, int k) const { return comp[d][fidx(d, i, j, k)]; }
};

}  // namespace rotforch
