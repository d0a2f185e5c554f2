#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotforch/math.hpp"

namespace rotforch {

/// Monotone generalized-polynomial momentum law
///   g(s) = a_0 + a_1 s^{alpha_1} + ... + a_N s^{alpha_N},  s >= 0,
/// with 0 < alpha_1 < ... < alpha_N, a_0 > 0, a_N > 0, middle a_i >= 0.
struct ForchheimerLaw {
    std::vector<double> coeffs;     // a_0 .. a_N
    std::vector<double> exponents;  // alpha_1 .. alpha_N (alpha_0 = 0 implicit)

    static ForchheimerLaw make(std::vector<double> coeffs, std::vector<double> exponents) {
        ForchheimerLaw law{std::move(coeffs), std::move(exponents)};
        law.validate();
        return law;
    }

    void validate() const {
        if (exponents.empty() || coeffs.size() != exponents.size() + 1)
            throw std::invalid_argument("law: need N>=1 with coeffs a_0..a_N and exponents alpha_1..alpha_N");
        if (!(coeffs.front() > 0.0) || !(coeffs.back() > 0.0))
            throw std::invalid_argument("law: a_0 and a_N must be positive");
        for (double c : coeffs)
            if (!(c >= 0.0) || !std::isfinite(c))
                throw std::invalid_argument("law: coefficients must be finite and nonnegative");
        double prev = 0.0;
        for (double al : exponents) {
            if (!(al > prev) || !std::isfinite(al))
                throw std::invalid_argument("law: exponents must be finite, positive, strictly increasing");
            prev = al;
        }
    }

    int num_terms() const { return static_cast<int>(exponents.size()); }
    double a0() const { return coeffs.front(); }
    double aN() const { return coeffs.back(); }
    double alpha_N() const { return exponents.back(); }
    double alpha_1() const { return exponents.front(); }
    /// g' is unbounded at s=0 when alpha_1 < 1; derivative-based consumers
    /// must treat a neighborhood of the origin specially in that regime.
    bool singular_gradient_at_origin() const { return alpha_1() < 1.0; }
};

inline double eval_g(const ForchheimerLaw& law, double s) {
    if (!(s >= 0.0)) throw std::domain_error("eval_g: negative argument");
    double g = law.coeffs[0];
    for (std::size_t i = 0; i < law.exponents.size(); ++i)
        g += law.coeffs[i + 1] * pow_nonneg(s, law.exponents[i]);
    return g;
}

struct GDeriv {
    double value = 0.0;
    /// Absent exactly when s == 0 and alpha_1 < 1 (singular derivative).
    std::optional<double> derivative;
};

inline GDeriv eval_g_deriv(const ForchheimerLaw& law, double s) {
    if (!(s >= 0.0)) throw std::domain_error("eval_g_deriv: negative argument");
    GDeriv out;
    out.value = eval_g(law, s);
    if (s == 0.0) {
        if (law.singular_gradient_at_origin()) return out;  // derivative left absent
        double d = 0.0;
        for (std::size_t i = 0; i < law.exponents.size(); ++i)
            if (law.exponents[i] == 1.0) d += law.coeffs[i + 1];
        out.derivative = d;
        return out;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < law.exponents.size(); ++i)
        d += law.coeffs[i + 1] * law.exponents[i] * pow_nonneg(s, law.exponents[i] - 1.0);
    out.derivative = d;
    return out;
}

/// Rotation axis and Coriolis strength. J is the matrix of k x (.), so J is
/// antisymmetric with |J|^2 = |J^2|^2 = 2 for a unit axis.
struct RotationSpec {
    Vec3 axis{0.0, 0.0, 1.0};
    double coriolis = 0.0;

    static RotationSpec make(const Vec3& axis, double coriolis) {
        RotationSpec rot{axis, coriolis};
        rot.validate();
        return rot;
    }

    void validate() const {
        if (std::abs(axis.norm() - 1.0) > 1e-14)
            throw std::invalid_argument("rotation: axis must be a unit vector (|k|=1 within 1e-14)");
        if (!(coriolis >= 0.0) || !std::isfinite(coriolis))
            throw std::invalid_argument("rotation: coriolis coefficient must be finite and nonnegative");
    }

    Mat3 J() const {
        Mat3 m;
        m(0, 1) = -axis.z; m(0, 2) = axis.y;
        m(1, 0) = axis.z;  m(1, 2) = -axis.x;
        m(2, 0) = -axis.y; m(2, 1) = axis.x;
        return m;
    }
    Mat3 J2() const { return J() * J(); }
    /// True when the rotation is about the vertical axis (k = +-e3); the
    /// domain radius entering the environment bounds may then be planar.
    bool vertical_axis() const {
        return std::abs(std::abs(axis.z) - 1.0) < 1e-14;
    }
};

inline std::pair<Mat3, Mat3> rotation_matrices(const RotationSpec& rot) {
    rot.validate();
    return {rot.J(), rot.J2()};
}

}  // namespace rotforch
