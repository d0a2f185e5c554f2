#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "rotforch/cutoff.hpp"
#include "rotforch/operators.hpp"
#include "rotforch/problem.hpp"
#include "rotforch/solver.hpp"
#include "rotforch/weight.hpp"

namespace rotforch {

struct MaxPrincipleReport {
    double violation = 0.0;          // worst interior excess over parabolic data
    std::vector<double> M0_curve;    // sup|u0| + sup_{tau<=t}|psi| per snapshot
};

namespace detail {

/// Max of |psi| (or signed psi) over all boundary face centers at time t.
template <class Reduce>
inline double boundary_trace_extreme(const Grid& g, const TimeField& psi, double t, Reduce red,
                                     double init) {
    double m = init;
    for (int d = 0; d < 3; ++d) {
        const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
        for (int b = 0; b < g.n[t2]; ++b)
            for (int a = 0; a < g.n[t1]; ++a) {
                Vec3 p;
                p[t1] = g.lo[t1] + (a + 0.5) * g.dx[t1];
                p[t2] = g.lo[t2] + (b + 0.5) * g.dx[t2];
                p[d] = g.lo[d];
                m = red(m, psi.value(p, t));
                p[d] = g.hi[d];
                m = red(m, psi.value(p, t));
            }
    }
    return m;
}

}  // namespace detail

/// Parabolic-boundary maximum audit: the violation is the largest positive
/// excess of any interior value over the running maximum of the data (initial
/// values and boundary trace up to that time). Exactly 0 for a constant run;
/// refinement-vanishing for consistent schemes.
inline MaxPrincipleReport max_principle_audit(const Trajectory& traj, const ProblemSpec& spec,
                                              bool requires_nonneg) {
    if (traj.snapshots.empty()) throw std::invalid_argument("max_principle_audit: empty trajectory");
    const Grid& g = spec.grid;
    const auto maxr = [](double a, double b) { return std::max(a, b); };

    if (requires_nonneg) {
        for (double v : spec.u0.data)
            if (v < 0.0)
                throw std::invalid_argument("max_principle_audit: negative initial data");
        for (double t : traj.times) {
            const double psi_min = -detail::boundary_trace_extreme(
                g, spec.psi, t, [](double a, double b) { return std::max(a, -b); },
                -std::numeric_limits<double>::infinity());
            if (psi_min < 0.0)
                throw std::invalid_argument("max_principle_audit: negative boundary data");
        }
    }

    double u0_max = -std::numeric_limits<double>::infinity();
    double u0_abs = 0.0;
    for (double v : spec.u0.data) {
        u0_max = std::max(u0_max, v);
        u0_abs = std::max(u0_abs, std::abs(v));
    }

    MaxPrincipleReport rep;
    double data_max = u0_max;   // parabolic running max (signed)
    double psi_abs_run = 0.0;   // running sup |psi| for the M0 curve
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const double t = traj.times[s];
        if (s > 0) {
            data_max = detail::boundary_trace_extreme(g, spec.psi, t, maxr, data_max);
            psi_abs_run = detail::boundary_trace_extreme(
                g, spec.psi, t, [](double a, double b) { return std::max(a, std::abs(b)); },
                psi_abs_run);
        }
        rep.M0_curve.push_back(u0_abs + psi_abs_run);
        double snap_max = -std::numeric_limits<double>::infinity();
        for (double v : traj.snapshots[s].data) snap_max = std::max(snap_max, v);
        rep.violation = std::max(rep.violation, snap_max - data_max);
    }
    rep.violation = std::max(rep.violation, 0.0);
    return rep;
}

/// The scalar functionals of a trajectory that the estimate audits consume.
/// Space integrals use the midpoint rule, time integrals the trapezoid rule
/// over stored snapshots; sup-type quantities are maxima over snapshots.
struct EnergyQuantities {
    double M_star = 0.0;   // sup |u|
    double E0 = 0.0;       // chi1-weighted boundary-extension energy
    double E_star = 0.0;   // plain boundary-extension energy
    double N0 = 0.0;
    double N_star = 0.0;
    double N2 = 0.0;
    std::map<double, double> N_s;  // s > 2
    std::map<double, double> D_s;  // with the supplied cutoff at t = 0
    std::vector<double> M0_curve;

    // Shared raw ingredients (also used by the audits).
    double ubar0_l2sq = 0.0;
    double gradu0_l2sq = 0.0;
    double u_l2sq_spacetime = 0.0;
    double u_l4_spacetime = 0.0;
    double MZ_sup = 0.0;  // discrete sup |Z| over cells and snapshot times
};

namespace detail {

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) s += 0.5 * (v[k] + v[k + 1]) * (t[k + 1] - t[k]);
    return s;
}

}  // namespace detail

inline EnergyQuantities energy_quantities(const Trajectory& traj, const ProblemSpec& spec,
                                          const std::vector<double>& ns_list,
                                          const std::vector<double>& ds_list = {},
                                          const Cutoff* cutoff = nullptr) {
    if (traj.snapshots.empty()) throw std::invalid_argument("energy_quantities: empty trajectory");
    if (!ds_list.empty() && !cutoff)
        throw std::invalid_argument("energy_quantities: D_s requires a cutoff");
    const Grid& g = spec.grid;
    const KernelConstants kc = kernel_constants(spec.law, spec.env.rot);
    EnergyQuantities eq;

    for (const ScalarField& u : traj.snapshots)
        for (double v : u.data) eq.M_star = std::max(eq.M_star, std::abs(v));

    // Boundary-extension energies and the u-norms, trapezoid in time.
    std::vector<double> es_t, e0_t, u2_t, u4_t;
    const double w_grad0 = std::pow(kc.chi1, 2.0 * (2.0 + kc.a));
    const double chi1sq = kc.chi1 * kc.chi1;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const double t = traj.times[s];
        NeumaierSum es, e0, u2, u4;
        const FrozenZ z = freeze_Z(spec.env, t);
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    const Vec3 p = g.center(i, j, k);
                    const double pv = spec.psi.value(p, t);
                    const double pg = spec.psi.grad ? spec.psi.grad(p, t).norm2() : 0.0;
                    const double pt = spec.psi.dt ? spec.psi.dt(p, t) : 0.0;
                    es.add(pg + spec.env.phi * (pt * pt + pv * pv));
                    e0.add(w_grad0 * pg + spec.env.phi * chi1sq * (pt * pt + pv * pv));
                    const double uv = traj.snapshots[s](i, j, k);
                    u2.add(uv * uv);
                    u4.add(uv * uv * uv * uv);
                    eq.MZ_sup = std::max(eq.MZ_sup, z(p).norm());
                }
        const double vol = g.cell_volume();
        es_t.push_back(es.value() * vol);
        e0_t.push_back(e0.value() * vol);
        u2_t.push_back(u2.value() * vol);
        u4_t.push_back(u4.value() * vol);
    }
    eq.E_star = detail::trapezoid(traj.times, es_t);
    eq.E0 = detail::trapezoid(traj.times, e0_t);
    eq.u_l2sq_spacetime = detail::trapezoid(traj.times, u2_t);
    eq.u_l4_spacetime = detail::trapezoid(traj.times, u4_t);

    // Initial-data norms (discrete gradient, consistent with the audits).
    {
        ScalarField ub0 = spec.u0;
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) ub0(i, j, k) -= spec.psi.value(g.center(i, j, k), 0.0);
        for (double& v : ub0.data) v *= v;
        eq.ubar0_l2sq = integrate(ub0);
    }
    const VecField g0 = gradient(spec.u0);
    {
        ScalarField g2(g);
        for (std::size_t c = 0; c < g0.data.size(); ++c) g2.data[c] = g0.data[c].norm2();
        eq.gradu0_l2sq = integrate(g2);
    }

    const double T = spec.T;
    const double phi = spec.env.phi;
    eq.N0 = phi * eq.ubar0_l2sq + T * eq.M_star * eq.M_star + eq.E_star;
    eq.N_star = phi * eq.ubar0_l2sq + T + eq.E_star;
    eq.N2 = phi * (eq.ubar0_l2sq + eq.gradu0_l2sq) + T + eq.E_star;
    for (double s : ns_list) {
        if (!(s > 2.0)) throw std::invalid_argument("energy_quantities: N_s requires s > 2");
        ScalarField gs(g);
        for (std::size_t c = 0; c < g0.data.size(); ++c)
            gs.data[c] = std::pow(g0.data[c].norm(), s);
        eq.N_s[s] = eq.N2 + phi * integrate(gs);
    }
    for (double s : ds_list) {
        if (!(s >= 0.0)) throw std::invalid_argument("energy_quantities: D_s requires s >= 0");
        ScalarField ds(g);
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    const double zc = cutoff->zeta(g.center(i, j, k), 0.0);
                    ds(i, j, k) = std::pow(g0(i, j, k).norm(), 2.0 * s + 2.0) * zc * zc;
                }
        eq.D_s[s] = integrate(ds);
    }

    eq.M0_curve = max_principle_audit(traj, spec, false).M0_curve;
    return eq;
}

}  // namespace rotforch
