#pragma once

#include <cmath>
#include <functional>

#include "rotforch/environment.hpp"
#include "rotforch/grid.hpp"

namespace rotforch {

namespace detail {

/// First derivative along one axis: central in the interior, one-sided
/// second-order at the two boundary-adjacent layers. Stencils are written in
/// difference form so constants are annihilated exactly.
template <class At>
inline double d1(const At& u, int i, int n, double h) {
    if (i == 0) return (4.0 * (u(1) - u(0)) - (u(2) - u(0))) / (2.0 * h);
    if (i == n - 1) return (4.0 * (u(n - 1) - u(n - 2)) - (u(n - 1) - u(n - 3))) / (2.0 * h);
    return (u(i + 1) - u(i - 1)) / (2.0 * h);
}

template <class At>
inline double d2(const At& u, int i, int n, double h) {
    if (i == 0) return (2.0 * (u(0) - u(1)) - 3.0 * (u(1) - u(2)) + (u(2) - u(3))) / (h * h);
    if (i == n - 1)
        return (2.0 * (u(n - 1) - u(n - 2)) - 3.0 * (u(n - 2) - u(n - 3)) + (u(n - 3) - u(n - 4))) /
               (h * h);
    return ((u(i + 1) - u(i)) - (u(i) - u(i - 1))) / (h * h);
}

}  // namespace detail

/// Cell-centered gradient for diagnostics and flux tangential averaging.
inline VecField gradient(const ScalarField& u) {
    const Grid& g = u.grid;
    VecField out(g);
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const auto ux = [&](int q) { return u(q, j, k); };
                const auto uy = [&](int q) { return u(i, q, k); };
                const auto uz = [&](int q) { return u(i, j, q); };
                out(i, j, k) = {detail::d1(ux, i, g.n[0], g.dx.x),
                                detail::d1(uy, j, g.n[1], g.dx.y),
                                detail::d1(uz, k, g.n[2], g.dx.z)};
            }
    return out;
}

/// Two-point normal difference per interior face (boundary faces left zero).
/// This is the gradient operator whose negative adjoint is `divergence`.
inline FaceField face_normal_difference(const ScalarField& u) {
    const Grid& g = u.grid;
    FaceField out(g);
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 1; i < g.n[0]; ++i)
                out.at(0, i, j, k) = (u(i, j, k) - u(i - 1, j, k)) / g.dx.x;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 1; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                out.at(1, i, j, k) = (u(i, j, k) - u(i, j - 1, k)) / g.dx.y;
    for (int k = 1; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                out.at(2, i, j, k) = (u(i, j, k) - u(i, j, k - 1)) / g.dx.z;
    return out;
}

/// Conservative cell divergence of a face-flux field: the signed sum of face
/// values over the spacings. Exact discrete adjoint of the face difference.
inline ScalarField divergence(const FaceField& q) {
    const Grid& g = q.grid;
    ScalarField out(g);
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                out(i, j, k) = (q.at(0, i + 1, j, k) - q.at(0, i, j, k)) / g.dx.x +
                               (q.at(1, i, j + 1, k) - q.at(1, i, j, k)) / g.dx.y +
                               (q.at(2, i, j, k + 1) - q.at(2, i, j, k)) / g.dx.z;
    return out;
}

/// Squared Frobenius norm of the Hessian per cell; central stencils with
/// one-sided fallbacks on the outermost layers.
inline ScalarField hessian_frobenius2(const ScalarField& u) {
    const Grid& g = u.grid;
    ScalarField out(g);
    VecField gr = gradient(u);
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const auto ux = [&](int q) { return u(q, j, k); };
                const auto uy = [&](int q) { return u(i, q, k); };
                const auto uz = [&](int q) { return u(i, j, q); };
                const double dxx = detail::d2(ux, i, g.n[0], g.dx.x);
                const double dyy = detail::d2(uy, j, g.n[1], g.dx.y);
                const double dzz = detail::d2(uz, k, g.n[2], g.dx.z);
                // Mixed entries from first derivatives of the gradient field.
                const auto gyx = [&](int q) { return gr(q, j, k).y; };
                const auto gzx = [&](int q) { return gr(q, j, k).z; };
                const auto gzy = [&](int q) { return gr(i, q, k).z; };
                const double dxy = detail::d1(gyx, i, g.n[0], g.dx.x);
                const double dxz = detail::d1(gzx, i, g.n[0], g.dx.x);
                const double dyz = detail::d1(gzy, j, g.n[1], g.dx.y);
                out(i, j, k) = dxx * dxx + dyy * dyy + dzz * dzz +
                               2.0 * (dxy * dxy + dxz * dxz + dyz * dyz);
            }
    return out;
}

/// Midpoint-rule integral over the box.
inline double integrate(const ScalarField& f) {
    NeumaierSum s;
    for (double v : f.data) s.add(v);
    return s.value() * f.grid.cell_volume();
}

/// Midpoint-rule integral restricted to cells whose centers lie in
/// [box_lo, box_hi] (componentwise, closed).
inline double integrate_box(const ScalarField& f, const Vec3& box_lo, const Vec3& box_hi) {
    const Grid& g = f.grid;
    NeumaierSum s;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const Vec3 c = g.center(i, j, k);
                if (c.x >= box_lo.x && c.x <= box_hi.x && c.y >= box_lo.y && c.y <= box_hi.y &&
                    c.z >= box_lo.z && c.z <= box_hi.z)
                    s.add(f(i, j, k));
            }
    return s.value() * g.cell_volume();
}

}  // namespace rotforch
