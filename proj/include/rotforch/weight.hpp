#pragma once

#include <cmath>

#include "rotforch/bound_report.hpp"
#include "rotforch/environment.hpp"
#include "rotforch/operators.hpp"

namespace rotforch {

/// Cell-centered Phi = grad u + u^2 Z(x,t), the argument of the inversion
/// kernel in the density equation.
inline VecField phi_field(const EnvironmentParams& env, const ScalarField& u, double t) {
    const FrozenZ z = freeze_Z(env, t);
    VecField out = gradient(u);
    const Grid& g = u.grid;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const double uc = u(i, j, k);
                out(i, j, k) += z(g.center(i, j, k)) * (uc * uc);
            }
    return out;
}

/// Degeneracy weight K = (1+|Phi|)^{-a}, values in (0,1], equal to 1 exactly
/// where Phi vanishes.
inline ScalarField weight_K(const EnvironmentParams& env, const ScalarField& u, double t, double a) {
    const VecField phi = phi_field(env, u, t);
    ScalarField out(u.grid);
    for (std::size_t c = 0; c < out.data.size(); ++c)
        out.data[c] = std::pow(1.0 + phi.data[c].norm(), -a);
    return out;
}

/// Pointwise verification of the weight inequalities for K[w,Q] at s >= a:
///   K |Dw|^s <= 2^{2s-a} |Dw|^{s-a} + 2^{2s+1-a} (1 + |w^2 Q|^s)
///   K |Dw|^s >= (|Dw|^{s-a} - (1 + |w^2 Q|^s)) / 3
///   |Dw|^s   <= 3 K |Dw|^{s+a} + (1 + |w^2 Q|^{s+a})
/// These are exact algebraic facts for any vectors, so the discrete gradient
/// may be plugged in directly. Violations are data; the checker never throws
/// on them.
inline BoundReport kug_verify(const ScalarField& w, const VecField& Q, double a, double s) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("kug_verify: a must lie in (0,1)");
    if (!(s >= a)) throw std::invalid_argument("kug_verify: s must satisfy s >= a");
    const Grid& g = w.grid;
    if (!Q.grid.same_as(g)) throw std::invalid_argument("kug_verify: field shape mismatch");

    const VecField gw = gradient(w);
    BoundReport report;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const double wc = w(i, j, k);
                const Vec3 grad = gw(i, j, k);
                const Vec3 wq = Q(i, j, k) * (wc * wc);
                const double gn = grad.norm();
                const double qn = wq.norm();
                const double K = std::pow(1.0 + (grad + wq).norm(), -a);
                const Vec3 where = g.center(i, j, k);

                const double lhs = K * std::pow(gn, s);
                const double up = std::pow(2.0, 2.0 * s - a) * std::pow(gn, s - a) +
                                  std::pow(2.0, 2.0 * s + 1.0 - a) * (1.0 + std::pow(qn, s));
                const double low = (std::pow(gn, s - a) - (1.0 + std::pow(qn, s))) / 3.0;
                double tol = 1e-12 * (1.0 + std::abs(lhs) + std::abs(up));
                report.record("weight_upper", where, up - lhs, tol);
                tol = 1e-12 * (1.0 + std::abs(lhs) + std::abs(low));
                report.record("weight_lower", where, lhs - low, tol);

                const double lhs2 = std::pow(gn, s);
                const double rhs2 = 3.0 * K * std::pow(gn, s + a) + (1.0 + std::pow(qn, s + a));
                tol = 1e-12 * (1.0 + std::abs(lhs2) + std::abs(rhs2));
                report.record("weight_shifted", where, rhs2 - lhs2, tol);
            }
    return report;
}

}  // namespace rotforch
