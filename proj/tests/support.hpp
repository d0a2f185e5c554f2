#pragma once

// Shared helpers for the test suites: random constitutive laws/rotations and
// a finite-difference oracle for the analytic Jacobian.

#include <algorithm>
#include <vector>

#include "rotforch/kernel.hpp"
#include "rotforch/law.hpp"
#include "rotforch/math.hpp"

namespace rotforch::test {

inline ForchheimerLaw random_law(Sampler& rng, int max_terms = 3, double max_exponent = 4.0) {
    const int n = 1 + static_cast<int>(rng.uniform() * max_terms) % max_terms;
    std::vector<double> exps;
    double al = 0.0;
    for (int i = 0; i < n; ++i) {
        al += rng.uniform(0.2, max_exponent / n);
        exps.push_back(std::min(al, max_exponent));
    }
    std::vector<double> coeffs;
    coeffs.push_back(rng.uniform(0.1, 5.0));  // a_0 > 0
    for (int i = 1; i < n; ++i) coeffs.push_back(rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 5.0));
    coeffs.push_back(rng.uniform(0.1, 5.0));  // a_N > 0
    return ForchheimerLaw::make(coeffs, exps);
}

inline RotationSpec random_rotation(Sampler& rng, double max_coriolis = 10.0) {
    return RotationSpec::make(rng.unit_vector(), rng.uniform(0.0, max_coriolis));
}

/// Central-difference Jacobian of F, step h = 1e-6 (1 + |v|).
inline Mat3 fd_jacobian_F(const ForchheimerLaw& law, const RotationSpec& rot, const Vec3& v) {
    const double h = 1e-6 * (1.0 + v.norm());
    Mat3 m;
    for (int j = 0; j < 3; ++j) {
        Vec3 vp = v, vm = v;
        vp[j] += h;
        vm[j] -= h;
        const Vec3 col = (eval_F(law, rot, vp) - eval_F(law, rot, vm)) / (2.0 * h);
        for (int i = 0; i < 3; ++i) m(i, j) = col[i];
    }
    return m;
}

inline double rel_matrix_error(const Mat3& approx, const Mat3& exact) {
    return (approx - exact).frobenius() / std::max(1.0, exact.frobenius());
}

}  // namespace rotforch::test
