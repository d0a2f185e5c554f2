#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rotforch/bound_report.hpp"
#include "rotforch/kernel.hpp"

namespace rotforch {

namespace detail {

inline void check_kernel_point(const ForchheimerLaw& law, const RotationSpec& rot,
                               const KernelConstants& kc, const ToleranceSpec& tol,
                               const Vec3& y, Sampler& xi_rng, BoundReport& report) {
    const double yn = y.norm();
    const double wa = std::pow(1.0 + yn, -kc.a);  // (1+|y|)^{-a}
    const double point_tol = 1e-12 * (1.0 + yn) * (1.0 + yn);

    const Vec3 x = invert_F(law, rot, y, tol);
    const double xn = x.norm();
    const double xy = x.dot(y);

    // |X(y)| against both norm-bound forms.
    report.record("xnorm_ratio_lower", y, xn - kc.c1 / kc.chi1 * yn * wa, point_tol);
    report.record("xnorm_ratio_upper", y, kc.c2 * std::pow(kc.chi1, kc.a) * yn * wa - xn, point_tol);
    report.record("xnorm_power_lower", y,
                  xn - (std::pow(kc.chi1, kc.a - 1.0) * std::pow(yn, 1.0 - kc.a) - 1.0), point_tol);
    report.record("xnorm_power_upper", y, kc.c3 * std::pow(yn, 1.0 - kc.a) - xn, point_tol);

    // X(y).y against both forms.
    report.record("xdoty_ratio_lower", y, xy - kc.c4 / (kc.chi1 * kc.chi1) * yn * yn * wa, point_tol);
    report.record("xdoty_ratio_upper", y, kc.c2 * std::pow(kc.chi1, kc.a) * yn * yn * wa - xy, point_tol);
    report.record("xdoty_power_lower", y,
                  xy - kc.c5 / (kc.chi1 * kc.chi1) * (std::pow(yn, 2.0 - kc.a) - 1.0), point_tol);
    report.record("xdoty_power_upper", y, kc.c3 * std::pow(yn, 2.0 - kc.a) - xy, point_tol);

    // Jacobian norm bounds and ellipticity.
    const Mat3 xp = jacobian_F(law, rot, x).inverse();
    const double xpn = xp.frobenius();
    report.record("xjac_norm_lower", y, xpn - kc.c6 / kc.chi1 * wa, point_tol);
    report.record("xjac_norm_upper", y, kc.c7 * std::pow(1.0 + kc.chi1, kc.a) * wa - xpn, point_tol);

    const double ell = kc.c8 / (kc.chi1 * kc.chi1) * wa;
    for (int i = 0; i < 16; ++i) {
        const Vec3 xi = xi_rng.unit_vector();
        report.record("xjac_ellipticity", y, xi.dot(xp * xi) - ell * xi.norm2(), point_tol);
    }

    // Dissipativity of the rotation coupling: sym(X'(y)) : J^2 <= 0.
    report.record("rotation_dissipation", y, -(xp.sym().ddot(rot.J2())), 1e-12);
}

}  // namespace detail

/// Samples the inversion kernel over a ball (plus deterministic edge points)
/// and checks every explicit norm, ellipticity, monotonicity and rotation
/// inequality with the constants from kernel_constants. A correct kernel
/// yields zero violations; violations are data, not errors.
inline BoundReport verify_kernel_bounds(const ForchheimerLaw& law, const RotationSpec& rot,
                                        long num_samples, double radius, std::uint64_t seed,
                                        const KernelConstants& kc) {
    if (num_samples < 1) throw std::invalid_argument("verify_kernel_bounds: num_samples >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("verify_kernel_bounds: radius > 0");
    const ToleranceSpec tol{};
    BoundReport report;
    Sampler rng(seed);
    Sampler xi_rng(seed ^ 0x5851f42d4c957f2dULL);

    // Deterministic coverage: the origin, coordinate/rotation axis points at
    // several magnitudes (the norm bounds are tightest as |y| -> 0), the unit
    // sphere, and the sampling radius itself.
    std::vector<Vec3> edge = {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, rot.axis * radius, {radius, 0, 0}};
    // A deterministic direction orthogonal to the rotation axis.
    Vec3 perp = rot.axis.cross(std::abs(rot.axis.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0});
    perp = perp / perp.norm();
    for (double mag : {0.01, 0.1, 0.2, 0.5, 1.0, 10.0}) {
        edge.push_back(rot.axis * mag);
        edge.push_back(rot.axis * -mag);
        edge.push_back(perp * mag);
        edge.push_back(perp * -mag);
    }
    for (const Vec3& y : edge) detail::check_kernel_point(law, rot, kc, tol, y, xi_rng, report);
    for (long i = 0; i < num_samples; ++i)
        detail::check_kernel_point(law, rot, kc, tol, rng.in_ball(radius), xi_rng, report);

    // Monotonicity, explicit part only: (F(v)-F(w)).(v-w) >= a0 |v-w|^2.
    for (long i = 0; i < num_samples; ++i) {
        const Vec3 v = rng.in_ball(radius);
        const Vec3 w = rng.in_ball(radius);
        const Vec3 d = v - w;
        const double slack = (eval_F(law, rot, v) - eval_F(law, rot, w)).dot(d) - law.a0() * d.norm2();
        report.record("monotonicity_a0", d, slack, 1e-12);
    }
    return report;
}

inline BoundReport verify_kernel_bounds(const ForchheimerLaw& law, const RotationSpec& rot,
                                        long num_samples, double radius, std::uint64_t seed) {
    return verify_kernel_bounds(law, rot, num_samples, radius, seed, kernel_constants(law, rot));
}

}  // namespace rotforch
