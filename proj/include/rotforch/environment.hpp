#pragma once

#include <cmath>
#include <stdexcept>

#include "rotforch/grid.hpp"
#include "rotforch/law.hpp"
#include "rotforch/math.hpp"

namespace rotforch {

/// Dimensional inputs. The nondimensional environment is obtained through
/// the compressibility scalings phi = kappa*phi~, G = kappa^2*G~,
/// Omega = kappa*Omega~, and R = 2 rho* Omega~ / phi~.
struct PhysicalParams {
    double kappa = 1.0;        // compressibility, > 0
    double phi_tilde = 0.5;    // porosity, in (0,1)
    double G_tilde = 1.0;      // gravitational constant, > 0
    double Omega_tilde = 0.0;  // angular speed, >= 0
    double rho_star = 0.0;     // reference density in the Coriolis term, >= 0
    double theta = 0.0;        // angle between gravity and the axis, in [0,pi]
    double omega0 = 0.0;       // gravity phase

    void validate() const {
        if (!(kappa > 0.0)) throw std::invalid_argument("physical: kappa must be positive");
        if (!(phi_tilde > 0.0 && phi_tilde < 1.0))
            throw std::invalid_argument("physical: porosity must lie in (0,1)");
        if (!(G_tilde > 0.0)) throw std::invalid_argument("physical: gravitational constant must be positive");
        if (!(Omega_tilde >= 0.0)) throw std::invalid_argument("physical: angular speed must be nonnegative");
        if (!(rho_star >= 0.0)) throw std::invalid_argument("physical: rho_star must be nonnegative");
        if (!(theta >= 0.0 && theta <= 3.14159265358979323846 + 1e-12))
            throw std::invalid_argument("physical: theta must lie in [0,pi]");
    }
};

/// Nondimensional environment defining the forcing field Z(x,t).
/// `forcing_on = false` is the dedicated Z == 0 regime: it zeroes the whole
/// forcing field (gravity and centrifugal term) without requiring G = 0,
/// which the derived bounds forbid. The Coriolis coefficient is unaffected.
struct EnvironmentParams {
    double phi = 1.0;    // > 0
    double G = 1.0;      // > 0
    double Omega = 0.0;  // >= 0
    double theta = 0.0;
    double omega0 = 0.0;
    bool forcing_on = true;
    RotationSpec rot;

    void validate() const {
        if (!(phi > 0.0)) throw std::invalid_argument("environment: phi must be positive");
        if (!(G > 0.0)) throw std::invalid_argument("environment: G must be positive");
        if (!(Omega >= 0.0)) throw std::invalid_argument("environment: Omega must be nonnegative");
        if (!(theta >= 0.0 && theta <= 3.14159265358979323846 + 1e-12))
            throw std::invalid_argument("environment: theta must lie in [0,pi]");
        rot.validate();
    }
};

inline EnvironmentParams nondimensionalize(const PhysicalParams& p, const Vec3& axis) {
    p.validate();
    EnvironmentParams env;
    env.phi = p.kappa * p.phi_tilde;
    env.G = p.kappa * p.kappa * p.G_tilde;
    env.Omega = p.kappa * p.Omega_tilde;
    env.theta = p.theta;
    env.omega0 = p.omega0;
    env.rot = RotationSpec::make(axis, 2.0 * p.rho_star * p.Omega_tilde / p.phi_tilde);
    env.validate();
    return env;
}

/// Unit gravity direction in the rotating frame.
inline Vec3 eval_e0(const EnvironmentParams& env, double t) {
    const double ph = env.Omega * t + env.omega0;
    const double st = std::sin(env.theta);
    return {-st * std::cos(ph), -st * std::sin(ph), std::cos(env.theta)};
}

/// Z(x,t) = -G e0(t) + Omega^2 J^2 x, frozen at one time level so the
/// per-cell evaluation is a single matrix-vector product.
struct FrozenZ {
    Vec3 g_term;
    Mat3 rot_term;
    Vec3 operator()(const Vec3& x) const { return g_term + rot_term * x; }
};

inline FrozenZ freeze_Z(const EnvironmentParams& env, double t) {
    FrozenZ z;
    if (env.forcing_on) {
        z.g_term = eval_e0(env, t) * (-env.G);
        z.rot_term = env.rot.J2() * (env.Omega * env.Omega);
    }
    return z;
}

inline Vec3 eval_Z(const EnvironmentParams& env, const Vec3& x, double t) {
    return freeze_Z(env, t)(x);
}

/// Parameters derived from the environment and the domain: the domain radius
/// r0, the rotation number Omega* = Omega sqrt(r0/G), and the single bound
/// chi* = max(1, d*(1+Omega*)) that dominates R, sup|Z| and |DZ|.
struct DerivedEnvBounds {
    double r0 = 0.0;
    double Omega_star = 0.0;
    double d_star = 0.0;
    double chi_star = 1.0;
    double M_Z = 0.0;   // G (1+Omega*)^2, an upper bound for sup |Z| over U
    double mu_Z = 0.0;  // |DZ| = sqrt(2) Omega^2, exact
};

inline DerivedEnvBounds env_bounds(const EnvironmentParams& env, const Grid& grid) {
    env.validate();
    DerivedEnvBounds b;
    const bool planar = env.rot.vertical_axis();
    for (int ci = 0; ci < 8; ++ci) {
        const Vec3 c{(ci & 1) ? grid.hi.x : grid.lo.x, (ci & 2) ? grid.hi.y : grid.lo.y,
                     (ci & 4) ? grid.hi.z : grid.lo.z};
        const double r = planar ? std::sqrt(c.x * c.x + c.y * c.y) : c.norm();
        b.r0 = std::max(b.r0, r);
    }
    if (!(b.r0 > 0.0)) throw std::domain_error("env_bounds: domain radius is zero");
    b.Omega_star = env.Omega * std::sqrt(b.r0 / env.G);
    // 2 rho*/phi recovered from R = 2 rho* Omega / phi; zero rotation has no
    // Coriolis scale to recover and contributes nothing.
    const double rho_term = env.Omega > 0.0 ? env.rot.coriolis / env.Omega : 0.0;
    b.d_star = std::sqrt(env.G / b.r0) *
               std::max({rho_term, std::sqrt(b.r0), std::pow(2.0, 0.25)});
    b.chi_star = std::max(1.0, b.d_star * (1.0 + b.Omega_star));
    b.M_Z = env.G * (1.0 + b.Omega_star) * (1.0 + b.Omega_star);
    b.mu_Z = std::sqrt(2.0) * env.Omega * env.Omega;
    return b;
}

}  // namespace rotforch
