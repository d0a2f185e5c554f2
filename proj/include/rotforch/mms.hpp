#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rotforch/solver.hpp"

namespace rotforch {

struct MmsRow {
    std::string label;   // grid or step-size tag
    double resolution;   // h for spatial runs, dt for temporal runs
    double error;        // L2 error against the exact solution at t = T
    double pair_order;   // order vs the previous row (NaN on the first)
};

struct MmsResult {
    std::string case_id;
    std::string mode;  // "spatial" | "temporal"
    std::vector<MmsRow> rows;
    double observed_order = 0.0;
};

inline double l2_error(const ScalarField& u, const ExactSolution& ex, double t) {
    ScalarField d(u.grid);
    const Grid& g = u.grid;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const double e = u(i, j, k) - ex.value(g.center(i, j, k), t);
                d(i, j, k) = e * e;
            }
    return std::sqrt(integrate(d));
}

/// Grid-refinement study at fixed T with dt tied to the stability bound
/// (so dt scales with h^2). The observed order is the finest-pair slope.
inline MmsResult mms_spatial(const std::string& case_id, const std::vector<int>& grids, double T,
                             const StepControls& controls = {}) {
    if (grids.size() < 2) throw std::invalid_argument("mms: need at least two grids");
    MmsResult res;
    res.case_id = case_id;
    res.mode = "spatial";
    double prev = 0.0;
    for (std::size_t m = 0; m < grids.size(); ++m) {
        ManufacturedCase mc = manufactured_case(case_id, grids[m]);
        mc.spec.T = T;
        const Trajectory traj = run(mc.spec, controls);
        const double e = l2_error(traj.back(), mc.exact, T);
        MmsRow row;
        row.label = std::to_string(grids[m]) + "^3";
        row.resolution = mc.spec.grid.dx.x;
        row.error = e;
        row.pair_order = m == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : std::log2(prev / e) /
                                      std::log2(double(grids[m]) / double(grids[m - 1]));
        res.rows.push_back(row);
        prev = e;
    }
    res.observed_order = res.rows.back().pair_order;
    return res;
}

/// Step-refinement study on one grid: dt0 is the stability bound, halved per
/// level. The spatial error is dt-independent, so the observed order is the
/// three-point difference slope log2((e0-e1)/(e1-e2)), which cancels it.
inline MmsResult mms_temporal(const std::string& case_id, int grid_n, double T, int levels = 3,
                              const StepControls& controls = {}) {
    if (levels < 3) throw std::invalid_argument("mms: temporal study needs >= 3 levels");
    MmsResult res;
    res.case_id = case_id;
    res.mode = "temporal";
    ManufacturedCase mc = manufactured_case(case_id, grid_n);
    mc.spec.T = T;
    const double dt0 = stable_dt(mc.spec, controls);
    std::vector<double> errors;
    for (int m = 0; m < levels; ++m) {
        StepControls ctl = controls;
        ctl.max_dt = dt0 / double(1 << m);
        const Trajectory traj = run(mc.spec, ctl);
        const double e = l2_error(traj.back(), mc.exact, T);
        MmsRow row;
        row.label = "dt0/" + std::to_string(1 << m);
        row.resolution = ctl.max_dt;
        row.error = e;
        row.pair_order = m == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : std::log2(errors.back() / e);
        res.rows.push_back(row);
        errors.push_back(e);
    }
    const double d01 = std::abs(errors[0] - errors[1]);
    const double d12 = std::abs(errors[1] - errors[2]);
    res.observed_order = std::log2(d01 / d12);
    return res;
}

}  // namespace rotforch
