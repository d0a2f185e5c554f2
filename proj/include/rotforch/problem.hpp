#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "rotforch/environment.hpp"
#include "rotforch/grid.hpp"
#include "rotforch/kernel.hpp"

namespace rotforch {

/// Analytic space-time scalar with the derivatives the energy functionals
/// need. Used for the boundary extension Psi and for exact solutions.
struct TimeField {
    std::function<double(const Vec3&, double)> value;
    std::function<Vec3(const Vec3&, double)> grad;
    std::function<double(const Vec3&, double)> dt;

    static TimeField constant(double c) {
        return {[c](const Vec3&, double) { return c; },
                [](const Vec3&, double) { return Vec3{0, 0, 0}; },
                [](const Vec3&, double) { return 0.0; }};
    }
    static TimeField zero() { return constant(0.0); }
};

/// Dirichlet problem for the density equation on a box: initial data u0,
/// boundary extension Psi (trace and interior extension in one handle),
/// final time T, and an optional manufactured source.
struct ProblemSpec {
    EnvironmentParams env;
    ForchheimerLaw law;
    Grid grid;
    ScalarField u0;
    TimeField psi;
    double T = 0.0;
    std::function<double(const Vec3&, double)> source;  // null for the physical problem

    void validate() const {
        env.validate();
        law.validate();
        if (!(T >= 0.0)) throw std::invalid_argument("problem: T must be nonnegative");
        if (!u0.grid.same_as(grid)) throw std::invalid_argument("problem: u0 grid mismatch");
        for (double v : u0.data)
            if (!std::isfinite(v)) throw std::invalid_argument("problem: u0 must be finite");
        if (!psi.value) throw std::invalid_argument("problem: Psi handle required");
    }
};

struct StepControls {
    double safety = 0.4;  // in (0,1]
    double max_dt = std::numeric_limits<double>::infinity();
    int snapshot_every = 10;  // steps between stored snapshots

    void validate() const {
        if (!(safety > 0.0 && safety <= 1.0))
            throw std::invalid_argument("controls: safety must lie in (0,1]");
        if (snapshot_every < 1) throw std::invalid_argument("controls: snapshot cadence >= 1");
    }
};

/// Initial-data presets keyed by the config file's data block. Coordinates
/// are normalized to the box so presets work on any domain.
inline ScalarField make_u0(const Grid& g, const std::string& preset, double amplitude,
                           double offset) {
    using std::numbers::pi;
    const Vec3 ext = g.hi - g.lo;
    auto hat = [&](const Vec3& p) {
        return Vec3{(p.x - g.lo.x) / ext.x, (p.y - g.lo.y) / ext.y, (p.z - g.lo.z) / ext.z};
    };
    if (preset == "constant") return ScalarField(g, offset);
    if (preset == "bump")
        return ScalarField::from_function(g, [&](const Vec3& p) {
            const Vec3 q = hat(p);
            const double sx = std::sin(pi * q.x), sy = std::sin(pi * q.y), sz = std::sin(pi * q.z);
            return offset + amplitude * sx * sx * sy * sy * sz * sz;
        });
    if (preset == "sine-x")
        return ScalarField::from_function(
            g, [&](const Vec3& p) { return offset + amplitude * std::sin(pi * hat(p).x); });
    if (preset == "peak")
        // Compact cos^2 hump of half-width a quarter of the box, centered on
        // the box midpoint (a cell corner on even grids, so the sampled
        // maximum sits below the analytic one).
        return ScalarField::from_function(g, [&](const Vec3& p) {
            const Vec3 q = hat(p);
            auto b = [](double r) {
                r = std::abs(r);
                if (r >= 1.0) return 0.0;
                const double c = std::cos(0.5 * pi * r);
                return c * c;
            };
            return offset +
                   amplitude * b((q.x - 0.5) / 0.25) * b((q.y - 0.5) / 0.25) * b((q.z - 0.5) / 0.25);
        });
    throw std::invalid_argument("unknown u0 preset: " + preset);
}

inline TimeField make_psi(const std::string& preset, double value) {
    if (preset == "zero") return TimeField::zero();
    if (preset == "constant") return TimeField::constant(value);
    throw std::invalid_argument("unknown psi preset: " + preset);
}

/// Exact solution with enough derivatives to manufacture a source term.
struct ExactSolution {
    std::function<double(const Vec3&, double)> value;
    std::function<Vec3(const Vec3&, double)> grad;
    std::function<double(const Vec3&, double)> dt;
    std::function<Mat3(const Vec3&, double)> hess;

    TimeField as_time_field() const { return {value, grad, dt}; }
};

struct ManufacturedCase {
    ProblemSpec spec;
    ExactSolution exact;
};

/// Source completing u_exact to a solution:
///   f = phi du/dt - X'(Phi) : (D^2 u + u^2 Om^2 J^2 + 2 u  (grad u) Z^T),
/// with Phi = grad u + u^2 Z and the kernel derivative evaluated pointwise.
inline std::function<double(const Vec3&, double)> manufactured_source(
    const EnvironmentParams& env, const ForchheimerLaw& law, const ExactSolution& ex) {
    const Mat3 J2 = env.rot.J2();
    const double om2 = env.Omega * env.Omega;
    return [env, law, ex, J2, om2](const Vec3& x, double t) {
        const double u = ex.value(x, t);
        const Vec3 gu = ex.grad(x, t);
        const Vec3 z = eval_Z(env, x, t);
        const Vec3 phi_arg = gu + z * (u * u);
        const Mat3 xp = jacobian_X(law, env.rot, phi_arg);
        const Mat3 m = ex.hess(x, t) + J2 * (u * u * om2) + Mat3::outer(gu, z) * (2.0 * u);
        return env.phi * ex.dt(x, t) - xp.ddot(m);
    };
}

/// Catalog: "steady-const" (zero forcing fixed point), "mms-quadratic"
/// (first-order-in-time probe), "mms-trig" (second-order-in-space probe).
inline ManufacturedCase manufactured_case(const std::string& id, int cells_per_axis = 16) {
    using std::numbers::pi;
    const Grid grid = Grid::make({0, 0, 0}, {1, 1, 1}, {cells_per_axis, cells_per_axis, cells_per_axis});

    ManufacturedCase mc;
    mc.spec.law = ForchheimerLaw::make({1.0, 1.0}, {1.0});
    mc.spec.grid = grid;
    mc.spec.T = 0.01;

    if (id == "steady-const") {
        EnvironmentParams env;
        env.phi = 1.0;
        env.G = 1.0;
        env.Omega = 0.0;
        env.forcing_on = false;  // Z == 0 exactly
        env.rot = RotationSpec::make({0, 0, 1}, 0.0);
        mc.spec.env = env;
        mc.exact.value = [](const Vec3&, double) { return 1.0; };
        mc.exact.grad = [](const Vec3&, double) { return Vec3{0, 0, 0}; };
        mc.exact.dt = [](const Vec3&, double) { return 0.0; };
        mc.exact.hess = [](const Vec3&, double) { return Mat3{}; };
        mc.spec.u0 = ScalarField(grid, 1.0);
        mc.spec.psi = mc.exact.as_time_field();
        mc.spec.source = nullptr;  // identically zero by construction
        return mc;
    }

    EnvironmentParams env;
    env.phi = 1.0;
    env.G = 0.5;
    env.Omega = 0.3;
    env.theta = pi / 3.0;
    env.omega0 = 0.2;
    env.rot = RotationSpec::make({0, 0, 1}, 0.5);
    mc.spec.env = env;

    if (id == "mms-quadratic") {
        mc.exact.value = [](const Vec3& p, double t) { return 1.0 + 0.1 * p.x * (1.0 - p.x) * t; };
        mc.exact.grad = [](const Vec3& p, double t) {
            return Vec3{0.1 * t * (1.0 - 2.0 * p.x), 0.0, 0.0};
        };
        mc.exact.dt = [](const Vec3& p, double) { return 0.1 * p.x * (1.0 - p.x); };
        mc.exact.hess = [](const Vec3&, double t) {
            Mat3 h;
            h(0, 0) = -0.2 * t;
            return h;
        };
    } else if (id == "mms-trig") {
        mc.exact.value = [](const Vec3& p, double t) {
            return 1.0 + 0.1 * std::sin(pi * p.x) * std::sin(pi * p.y) * std::exp(-t);
        };
        mc.exact.grad = [](const Vec3& p, double t) {
            const double e = 0.1 * std::exp(-t);
            return Vec3{e * pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                        e * pi * std::sin(pi * p.x) * std::cos(pi * p.y), 0.0};
        };
        mc.exact.dt = [](const Vec3& p, double t) {
            return -0.1 * std::sin(pi * p.x) * std::sin(pi * p.y) * std::exp(-t);
        };
        mc.exact.hess = [](const Vec3& p, double t) {
            const double e = 0.1 * std::exp(-t);
            Mat3 h;
            h(0, 0) = -e * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y);
            h(1, 1) = h(0, 0);
            h(0, 1) = h(1, 0) = e * pi * pi * std::cos(pi * p.x) * std::cos(pi * p.y);
            return h;
        };
    } else {
        throw std::invalid_argument("unknown manufactured case: " + id);
    }

    const auto& ex = mc.exact;
    mc.spec.u0 = ScalarField::from_function(grid, [&](const Vec3& p) { return ex.value(p, 0.0); });
    mc.spec.psi = mc.exact.as_time_field();
    mc.spec.source = manufactured_source(mc.spec.env, mc.spec.law, mc.exact);
    return mc;
}

}  // namespace rotforch
