#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rotforch/grid.hpp"

namespace rotforch {

/// The zeta == 1 inner box for a given margin: one cell of zero padding at
/// the boundary plus the ramp width.
inline std::pair<Vec3, Vec3> inner_box(const Grid& g, double margin) {
    Vec3 lo, hi;
    for (int d = 0; d < 3; ++d) {
        lo[d] = g.lo[d] + g.dx[d] + margin;
        hi[d] = g.hi[d] - g.dx[d] - margin;
        if (!(hi[d] > lo[d]))
            throw std::invalid_argument("cutoff: margin leaves no interior region");
    }
    return {lo, hi};
}

/// C^2 product cutoff built from 1-D smoothstep ramps s(r) = 3r^2 - 2r^3 of
/// width `margin`, vanishing within one cell of the boundary and equal to 1
/// on the inner box. The optional temporal factor ramps 0 -> 1 on
/// [T0 - t0, T0], so zeta(.,0) = 0 and 0 <= zeta_t <= 1.5/t0.
struct Cutoff {
    Grid grid;
    double margin = 0.0;
    Vec3 inner_lo, inner_hi;
    bool temporal = false;
    double T0 = 0.0, t0 = 0.0;

    static double smoothstep(double r) {
        if (r <= 0.0) return 0.0;
        if (r >= 1.0) return 1.0;
        return r * r * (3.0 - 2.0 * r);
    }
    static double smoothstep_d(double r) {
        if (r <= 0.0 || r >= 1.0) return 0.0;
        return 6.0 * r * (1.0 - r);
    }

    // 1-D spatial profile and its derivative along axis d.
    double wall(int d, double x) const {
        const double pad = grid.dx[d];
        const double up = (x - (grid.lo[d] + pad)) / margin;
        const double dn = ((grid.hi[d] - pad) - x) / margin;
        return smoothstep(std::min(up, dn));
    }
    double wall_d(int d, double x) const {
        const double pad = grid.dx[d];
        const double up = (x - (grid.lo[d] + pad)) / margin;
        const double dn = ((grid.hi[d] - pad) - x) / margin;
        if (up < dn) return smoothstep_d(up) / margin;
        return -smoothstep_d(dn) / margin;
    }

    double ramp(double t) const {
        return temporal ? smoothstep((t - (T0 - t0)) / t0) : 1.0;
    }
    double ramp_d(double t) const {
        return temporal ? smoothstep_d((t - (T0 - t0)) / t0) / t0 : 0.0;
    }

    double zeta(const Vec3& x, double t) const {
        return ramp(t) * wall(0, x.x) * wall(1, x.y) * wall(2, x.z);
    }
    Vec3 grad_zeta(const Vec3& x, double t) const {
        const double w0 = wall(0, x.x), w1 = wall(1, x.y), w2 = wall(2, x.z);
        const double tau = ramp(t);
        return {tau * wall_d(0, x.x) * w1 * w2, tau * w0 * wall_d(1, x.y) * w2,
                tau * w0 * w1 * wall_d(2, x.z)};
    }
    double zeta_t(const Vec3& x, double t) const {
        return ramp_d(t) * wall(0, x.x) * wall(1, x.y) * wall(2, x.z);
    }

    // Analytic suprema: d/dr (3r^2-2r^3) peaks at 1.5.
    double sup_grad_component() const { return 1.5 / margin; }
    double sup_zeta_t() const { return temporal ? 1.5 / t0 : 0.0; }
};

inline Cutoff build_cutoff(const Grid& grid, double margin,
                           std::optional<std::pair<double, double>> temporal = std::nullopt,
                           double T = std::numeric_limits<double>::infinity()) {
    const double max_dx = std::max({grid.dx.x, grid.dx.y, grid.dx.z});
    if (!(margin >= 2.0 * max_dx))
        throw std::invalid_argument("cutoff: margin must be at least two cells wide");
    Cutoff z;
    z.grid = grid;
    z.margin = margin;
    std::tie(z.inner_lo, z.inner_hi) = inner_box(grid, margin);
    if (temporal) {
        const auto [T0, t0] = *temporal;
        if (!(t0 > 0.0 && t0 < T0 && T0 < T))
            throw std::invalid_argument("cutoff: need 0 < t0 < T0 < T");
        z.temporal = true;
        z.T0 = T0;
        z.t0 = t0;
    }
    return z;
}

}  // namespace rotforch
