#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rotforch/law.hpp"
#include "rotforch/math.hpp"

namespace rotforch {

struct ToleranceSpec {
    double atol = 1e-12;
    double rtol = 1e-12;
    double threshold(double ynorm) const { return std::max(atol, rtol * ynorm); }
};

/// Explicit constants attached to a (law, rotation) pair. They make the
/// kernel's norm/ellipticity bounds fully quantitative:
///   c1 |y| / (chi1 (1+|y|)^a)  <=  |X(y)|  <=  c2 chi1^a |y| / (1+|y|)^a
///   chi1^{a-1} |y|^{1-a} - 1   <=  |X(y)|  <=  c3 |y|^{1-a}
///   c4 |y|^2 / (chi1^2 (1+|y|)^a)  <=  X(y).y  <=  c2 chi1^a |y|^2 / (1+|y|)^a
///   c5 (|y|^{2-a}-1) / chi1^2      <=  X(y).y  <=  c3 |y|^{2-a}
///   c6 / (chi1 (1+|y|)^a)  <=  |X'(y)|  <=  c7 (1+chi1)^a / (1+|y|)^a
///   xi' X'(y) xi  >=  c8 |xi|^2 / (chi1^2 (1+|y|)^a)
/// c_star is the Euclidean-vs-operator matrix norm factor, fixed to sqrt(3)
/// (tightest universal value for 3x3 matrices).
struct KernelConstants {
    double a = 0.0;      // alpha_N / (1 + alpha_N), in (0,1)
    double chi0 = 0.0;   // g(1) = sum a_i
    double chi1 = 0.0;   // chi0 + coriolis
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
    double c_star = 0.0;
};

inline KernelConstants kernel_constants(const ForchheimerLaw& law, const RotationSpec& rot) {
    law.validate();
    rot.validate();
    KernelConstants k;
    const double alN = law.alpha_N();
    const double mn0N = std::min(law.a0(), law.aN());
    k.a = alN / (1.0 + alN);
    k.chi0 = eval_g(law, 1.0);
    k.chi1 = k.chi0 + rot.coriolis;
    k.c_star = std::sqrt(3.0);
    k.c1 = std::pow(std::min(1.0, k.chi0), k.a);
    k.c2 = std::pow(2.0, k.a) / (k.c1 * mn0N);
    k.c3 = std::pow(law.aN(), k.a - 1.0);
    k.c4 = std::pow(std::min({1.0, law.a0(), law.aN()}) / std::pow(2.0, alN), 1.0 + k.a);
    k.c5 = std::pow(2.0, -k.a) * k.c4;
    k.c6 = std::sqrt(3.0) * std::pow(std::min(1.0, law.aN()) / std::pow(2.0, alN), k.a) / (alN + 2.0);
    k.c7 = k.c_star * std::pow(2.0, alN) / mn0N;
    k.c8 = k.c4 / ((alN + 2.0) * (alN + 2.0));
    k.c9 = std::sqrt(3.0) / (alN + 2.0);
    return k;
}

/// F(v) = g(|v|) v + R k x v. Odd, F(0)=0, and a bijection of R^3.
inline Vec3 eval_F(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& v) {
    if (!v.finite()) throw std::domain_error("eval_F: non-finite input");
    const double g = eval_g(law, v.norm());
    Vec3 out = v * g;
    if (rot.coriolis != 0.0) out += rot.axis.cross(v) * rot.coriolis;
    return out;
}

/// F'(v) = g'(|v|) v v^T / |v| + g(|v|) I + R J   (v != 0)
/// F'(0) = g(0) I + R J.
/// The rank-one term has norm g'(r) r -> 0 as r -> 0, so F' is continuous
/// even when g' itself blows up at the origin (alpha_1 < 1).
inline Mat3 jacobian_F(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& v) {
    if (!v.finite()) throw std::domain_error("jacobian_F: non-finite input");
    const double r = v.norm();
    Mat3 m;
    if (r == 0.0) {
        const double g0 = law.a0();
        m = Mat3::identity() * g0;
    } else {
        const GDeriv g = eval_g_deriv(law, r);
        m = Mat3::outer(v, v) * (*g.derivative / r) + Mat3::identity() * g.value;
    }
    if (rot.coriolis != 0.0) {
        const Vec3& k = rot.axis;
        const double R = rot.coriolis;
        m(0, 1) += -k.z * R; m(0, 2) += k.y * R;
        m(1, 0) += k.z * R;  m(1, 2) += -k.x * R;
        m(2, 0) += -k.y * R; m(2, 1) += k.x * R;
    }
    return m;
}

class KernelConvergenceError : public std::runtime_error {
public:
    KernelConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
};

struct InvertStats {
    int iterations = 0;
    int backtracks = 0;
    bool continuation = false;
    double residual = 0.0;
};

namespace detail {

/// Root of g(h) h = m on [0, 1 + (m/a_N)^{1-a}] by a Newton iteration
/// safeguarded with bisection on the (always valid) bracket.
inline double scalar_magnitude_root(const ForchheimerLaw& law, double m, double tol = 1e-12) {
    if (m <= 0.0) return 0.0;
    const double a = law.alpha_N() / (1.0 + law.alpha_N());
    double lo = 0.0;
    double hi = 1.0 + std::pow(m / law.aN(), 1.0 - a);
    double h = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const GDeriv g = eval_g_deriv(law, h);
        const double f = g.value * h - m;
        if (std::abs(f) <= tol * std::max(1.0, m)) return h;
        if (f > 0.0) hi = h; else lo = h;
        const double fp = g.value + (g.derivative ? *g.derivative * h : 0.0);
        double next = h - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-16 * hi) return 0.5 * (lo + hi);
        h = next;
    }
    return h;
}

/// F(v) and F'(v) sharing one |v| and one g/g' evaluation.
inline void eval_F_and_jacobian(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& v,
                                Vec3& fv, Mat3& jf) {
    const double r = v.norm();
    if (r == 0.0) {
        fv = {0.0, 0.0, 0.0};
        jf = Mat3::identity() * law.a0();
    } else {
        const GDeriv g = eval_g_deriv(law, r);
        fv = v * g.value;
        jf = Mat3::outer(v, v) * (*g.derivative / r) + Mat3::identity() * g.value;
    }
    const double R = rot.coriolis;
    if (R != 0.0) {
        const Vec3& k = rot.axis;
        fv += k.cross(v) * R;
        jf(0, 1) += -k.z * R; jf(0, 2) += k.y * R;
        jf(1, 0) += k.z * R;  jf(1, 2) += -k.x * R;
        jf(2, 0) += -k.y * R; jf(2, 1) += k.x * R;
    }
}

/// Damped Newton on F(v) = y with residual-halving backtracking.
/// Returns true on |F(v)-y| <= thresh within max_iter iterations.
inline bool newton_core(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& y,
                        double thresh, int max_iter, Vec3& v, double& resid, InvertStats* stats) {
    Vec3 fv;
    Mat3 jf;
    eval_F_and_jacobian(law, rot, v, fv, jf);
    resid = (fv - y).norm();
    for (int it = 0; it < max_iter; ++it) {
        if (resid <= thresh) return true;
        const Vec3 dv = jf.inverse() * (y - fv);
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            const Vec3 vt = v + dv * lambda;
            Vec3 ft;
            Mat3 jt;
            eval_F_and_jacobian(law, rot, vt, ft, jt);
            const double rt = (ft - y).norm();
            if (rt < resid) {
                v = vt;
                fv = ft;
                jf = jt;
                resid = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
            if (stats) ++stats->backtracks;
        }
        if (stats) ++stats->iterations;
        if (!accepted) return resid <= thresh;
    }
    return resid <= thresh;
}

}  // namespace detail

/// X(y) = F^{-1}(y). Newton initialized from the rotation-free scalar shell
/// g(h) h = |y|; on stagnation, restarts with continuation in the Coriolis
/// coefficient from 0 to its target in 8 steps.
inline Vec3 invert_F(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& y,
                     const ToleranceSpec& tol = {}, InvertStats* stats = nullptr,
                     const Vec3* initial_guess = nullptr) {
    if (!y.finite()) throw std::domain_error("invert_F: non-finite input");
    if (stats) *stats = {};
    const double ynorm = y.norm();
    if (ynorm == 0.0) return {0.0, 0.0, 0.0};
    const double thresh = tol.threshold(ynorm);

    Vec3 v;
    if (initial_guess && initial_guess->finite()) {
        v = *initial_guess;
    } else {
        const double h = detail::scalar_magnitude_root(law, ynorm);
        v = y * (h / ynorm);
    }

    double resid = 0.0;
    if (detail::newton_core(law, rot, y, thresh, 100, v, resid, stats)) {
        if (stats) stats->residual = resid;
        return v;
    }

    // Continuation: at R=0 the map is the gradient of a strictly convex
    // potential and Newton is robust; track the root as R ramps up.
    if (stats) stats->continuation = true;
    const double h = detail::scalar_magnitude_root(law, ynorm);
    v = y * (h / ynorm);
    for (int k = 1; k <= 8; ++k) {
        RotationSpec rk = rot;
        rk.coriolis = rot.coriolis * static_cast<double>(k) / 8.0;
        const double step_thresh = (k == 8) ? thresh : std::max(thresh, 1e-10 * ynorm);
        if (!detail::newton_core(law, rk, y, step_thresh, 100, v, resid, stats) && k == 8)
            throw KernelConvergenceError("invert_F: Newton did not converge", resid);
    }
    if (stats) stats->residual = resid;
    return v;
}

/// X'(y) = (F'(X(y)))^{-1} via closed-form 3x3 inversion.
inline Mat3 jacobian_X(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& y,
                       const ToleranceSpec& tol = {}) {
    const Vec3 v = invert_F(law, rot, y, tol);
    return jacobian_F(law, rot, v).inverse();
}

}  // namespace rotforch
