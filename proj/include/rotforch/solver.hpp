#pragma once

#include <cmath>
#include <vector>

#include "rotforch/flux.hpp"
#include "rotforch/problem.hpp"

namespace rotforch {

struct StepRecord {
    double t = 0.0;   // time at the start of the step
    double dt = 0.0;
    double balance_rel = 0.0;
    double max_residual = 0.0;
    bool dt_warning = false;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ScalarField> snapshots;
    std::vector<StepRecord> steps;
    bool completed = true;        // false when a kernel failure aborted the run
    std::string failure;          // diagnostic from the failed step

    const ScalarField& front() const { return snapshots.front(); }
    const ScalarField& back() const { return snapshots.back(); }
    std::size_t size() const { return snapshots.size(); }
};

/// Explicit-Euler step bound from the global Lipschitz constant of the
/// inversion kernel, Lambda = c7 (1+chi1)^a >= sup |X'|:
///   dt = safety * phi * min(dx_i^2) / (6 Lambda), capped by max_dt.
inline double stable_dt(const ProblemSpec& spec, const StepControls& controls = {}) {
    controls.validate();
    const KernelConstants kc = kernel_constants(spec.law, spec.env.rot);
    const double lambda = kc.c7 * std::pow(1.0 + kc.chi1, kc.a);
    const double h2 = std::min({spec.grid.dx.x * spec.grid.dx.x, spec.grid.dx.y * spec.grid.dx.y,
                                spec.grid.dx.z * spec.grid.dx.z});
    return std::min(controls.safety * spec.env.phi * h2 / (6.0 * lambda), controls.max_dt);
}

struct StepOutput {
    ScalarField u;
    double balance_rel = 0.0;
    double max_residual = 0.0;
    bool dt_warning = false;  // dt exceeded the stability bound (not fatal)
};

/// One explicit conservative update u += (dt/phi)(div q + f). The balance
/// residual compares the compensated sum of cell net flows against the signed
/// boundary-face total; the identity is algebraic for this assembly, so the
/// relative residual sits at rounding level.
inline StepOutput step(const ProblemSpec& spec, const ScalarField& u, double t, double dt,
                       FaceVecCache* warm = nullptr) {
    const Grid& g = spec.grid;
    const FluxResult fr = flux(spec, u, t, /*with_momentum=*/false, warm);
    const double vol = g.cell_volume();

    ScalarField source_cell;
    if (spec.source) {
        source_cell = ScalarField(g);
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i)
                    source_cell(i, j, k) = spec.source(g.center(i, j, k), t);
    }

    StepOutput out;
    out.u = u;
    out.max_residual = fr.stats.max_residual;
    {
        StepControls unscaled;
        unscaled.safety = 1.0;
        out.dt_warning = dt > stable_dt(spec, unscaled) * (1.0 + 1e-12);
    }

    NeumaierSum cell_total, boundary_total, scale;
    const double inv_phi_dt = dt / spec.env.phi;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const double net =
                    (fr.q.at(0, i + 1, j, k) - fr.q.at(0, i, j, k)) * g.face_area(0) +
                    (fr.q.at(1, i, j + 1, k) - fr.q.at(1, i, j, k)) * g.face_area(1) +
                    (fr.q.at(2, i, j, k + 1) - fr.q.at(2, i, j, k)) * g.face_area(2);
                const double f = spec.source ? source_cell(i, j, k) : 0.0;
                out.u(i, j, k) = u(i, j, k) + inv_phi_dt * (net / vol + f);
                cell_total.add(net + f * vol);
                scale.add(std::abs(net) + std::abs(f) * vol);
            }

    for (int d = 0; d < 3; ++d) {
        const double area = g.face_area(d);
        std::array<int, 3> hi = {g.n[0], g.n[1], g.n[2]};
        std::array<int, 3> c{};
        const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
        for (c[t2] = 0; c[t2] < hi[t2]; ++c[t2])
            for (c[t1] = 0; c[t1] < hi[t1]; ++c[t1]) {
                c[d] = hi[d];
                boundary_total.add(fr.q.comp[d][fr.q.fidx(d, c[0], c[1], c[2])] * area);
                scale.add(std::abs(fr.q.comp[d][fr.q.fidx(d, c[0], c[1], c[2])]) * area);
                c[d] = 0;
                boundary_total.add(-fr.q.comp[d][fr.q.fidx(d, c[0], c[1], c[2])] * area);
                scale.add(std::abs(fr.q.comp[d][fr.q.fidx(d, c[0], c[1], c[2])]) * area);
            }
    }
    if (spec.source)
        for (double f : source_cell.data) boundary_total.add(f * vol);

    const double denom = std::max(scale.value(), 1e-300);
    out.balance_rel = std::abs(cell_total.value() - boundary_total.value()) / denom;
    return out;
}

/// Integrate on [0,T] with dt = stable_dt, shrinking the final step to land
/// on T exactly. Snapshots at the configured cadence plus t=0 and t=T.
inline Trajectory run(const ProblemSpec& spec, const StepControls& controls = {}) {
    spec.validate();
    controls.validate();
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.snapshots.push_back(spec.u0);
    if (spec.T == 0.0) return traj;

    const double dt0 = stable_dt(spec, controls);
    FaceVecCache warm;
    ScalarField u = spec.u0;
    double t = 0.0;
    long step_count = 0;
    const double t_eps = 1e-14 * std::max(1.0, spec.T);
    while (t < spec.T - t_eps) {
        const double dt = std::min(dt0, spec.T - t);
        StepOutput so;
        try {
            so = step(spec, u, t, dt, &warm);
        } catch (const KernelConvergenceError& e) {
            // Return what we have for diagnosis; callers check `completed`.
            traj.completed = false;
            traj.failure = e.what();
            if (traj.times.back() != t) {
                traj.times.push_back(t);
                traj.snapshots.push_back(u);
            }
            return traj;
        }
        u = std::move(so.u);
        ++step_count;
        const bool last = (t + dt >= spec.T - t_eps);
        t = last ? spec.T : t + dt;
        traj.steps.push_back(
            {last ? spec.T - dt : t - dt, dt, so.balance_rel, so.max_residual, so.dt_warning});
        if (step_count % controls.snapshot_every == 0 || last) {
            traj.times.push_back(t);
            traj.snapshots.push_back(u);
        }
    }
    return traj;
}

/// Boundary shift: the trajectory of u - Psi(.,t), which vanishes on the
/// Dirichlet trace by construction.
inline Trajectory shifted(const Trajectory& traj, const TimeField& psi) {
    Trajectory out;
    out.times = traj.times;
    out.steps = traj.steps;
    out.snapshots.reserve(traj.snapshots.size());
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        ScalarField ub = traj.snapshots[s];
        const Grid& g = ub.grid;
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i)
                    ub(i, j, k) -= psi.value(g.center(i, j, k), traj.times[s]);
        out.snapshots.push_back(std::move(ub));
    }
    return out;
}

}  // namespace rotforch
