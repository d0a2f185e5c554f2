#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rotforch/config.hpp"
#include "rotforch/kernel_checks.hpp"
#include "rotforch/report.hpp"

namespace rotforch {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
    std::vector<std::string> estimates;  // overrides the config's audit list
    bool quiet = false;
};

namespace detail {

inline std::vector<AuditEntry> audit_entries(const RunConfig& cfg, const CliOverrides& ov) {
    std::vector<AuditEntry> entries;
    if (!ov.estimates.empty()) {
        for (const auto& id : ov.estimates) entries.push_back({id, {}, {}, {}});
    } else {
        entries = cfg.audit.estimates;
    }
    if (entries.empty())
        for (const auto& id : estimate_catalog()) entries.push_back({id, {}, {}, {}});
    return entries;
}

inline int run_simulate(const RunConfig& cfg, const std::string& out_dir, bool quiet) {
    const ProblemSpec spec = cfg.make_problem();
    const Trajectory traj = run(spec, cfg.controls);
    if (!traj.completed) throw std::runtime_error("simulate: run aborted: " + traj.failure);

    ordered_json manifest;
    manifest["subcommand"] = "simulate";
    manifest["grid"] = {spec.grid.n[0], spec.grid.n[1], spec.grid.n[2]};
    manifest["T"] = spec.T;
    manifest["steps"] = traj.steps.size();
    manifest["snapshots"] = traj.size();
    manifest["kernel_failures"] = 0;  // a failure aborts before this point
    double max_bal = 0.0, max_res = 0.0;
    for (const auto& s : traj.steps) {
        max_bal = std::max(max_bal, s.balance_rel);
        max_res = std::max(max_res, s.max_residual);
    }
    manifest["max_balance_residual"] = max_bal;
    manifest["max_kernel_residual"] = max_res;

    ordered_json files = ordered_json::array();
    for (std::size_t s = 0; s < traj.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof name, "snap_%06zu.csv", s);
        write_snapshot_csv(out_dir + "/" + name, traj.snapshots[s], traj.times[s]);
        files.push_back(std::string(name));
    }
    manifest["snapshot_files"] = files;
    write_json(out_dir + "/manifest.json", manifest);
    if (!quiet)
        std::cout << "simulate: " << traj.steps.size() << " steps, " << traj.size()
                  << " snapshots, max balance residual " << max_bal << "\n";
    return 0;
}

inline int run_audit(const RunConfig& cfg, const std::string& out_dir, const CliOverrides& ov) {
    const ProblemSpec spec = cfg.make_problem();
    const Trajectory traj = run(spec, cfg.controls);
    if (!traj.completed) throw std::runtime_error("audit: run aborted: " + traj.failure);
    AuditContext ctx(traj, spec);

    ordered_json rep;
    rep["subcommand"] = "audit";
    rep["energy"] = to_json(ctx.eq());
    const auto mp = max_principle_audit(traj, spec, cfg.audit.require_nonneg);
    rep["max_principle"] = {{"violation", mp.violation},
                            {"M0_final", mp.M0_curve.back()}};

    ordered_json audits = ordered_json::array();
    for (const auto& entry : audit_entries(cfg, ov)) {
        AuditParams p = default_params(entry.id, ctx.kc().a, spec.T, cfg.audit.margin);
        if (entry.s) p.s = *entry.s;
        if (entry.T0) p.T0 = *entry.T0;
        if (entry.t0) p.t0 = *entry.t0;
        audits.push_back(to_json(estimate_audit(ctx, entry.id, p)));
    }
    rep["estimates"] = audits;
    write_json(out_dir + "/audit_report.json", rep);
    if (!ov.quiet) std::cout << "audit: " << audits.size() << " estimates reported\n";
    return 0;
}

inline int run_verify_kernel(const RunConfig& cfg, const std::string& out_dir,
                             const CliOverrides& ov) {
    const long samples = ov.samples.value_or(cfg.kernel.samples);
    const std::uint64_t seed = ov.seed.value_or(cfg.seed);
    const BoundReport report =
        verify_kernel_bounds(cfg.law, cfg.env.rot, samples, cfg.kernel.radius, seed);
    ordered_json rep;
    rep["subcommand"] = "verify-kernel";
    rep["samples"] = samples;
    rep["radius"] = cfg.kernel.radius;
    rep["seed"] = seed;
    rep["report"] = to_json(report);
    write_json(out_dir + "/kernel_report.json", rep);
    if (!ov.quiet)
        std::cout << "verify-kernel: " << report.samples_checked << " checks, "
                  << report.violations.size() << " violations\n";
    return report.violations.empty() ? 0 : 1;
}

inline int run_sweep(const RunConfig& cfg, const std::string& out_dir, const CliOverrides& ov) {
    if (!cfg.sweep) throw ConfigError("sweep: config has no 'sweep' block");
    std::vector<std::string> ids =
        !ov.estimates.empty() ? ov.estimates : cfg.sweep->estimates;
    if (ids.empty()) ids = estimate_catalog();
    const ProblemSpec spec = cfg.make_problem();
    const SweepSummary sw = sweep_report(spec, cfg.rho_star, cfg.sweep->omega_star, ids,
                                         cfg.audit.margin, cfg.controls);
    ordered_json rep;
    rep["subcommand"] = "sweep";
    rep["summary"] = to_json(sw);
    write_json(out_dir + "/sweep_report.json", rep);
    bool ok = sw.orderings_ok;
    for (const auto& row : sw.rows) ok = ok && row.all_finite;
    if (!ov.quiet)
        std::cout << "sweep: " << sw.rows.size() << " estimates x " << sw.omega_star.size()
                  << " points, " << (ok ? "all finite" : "NON-FINITE RATIOS") << "\n";
    return ok ? 0 : 1;
}

inline int run_mms(const RunConfig& cfg, const std::string& out_dir, bool quiet) {
    const MmsResult res =
        cfg.mms.mode == "spatial"
            ? mms_spatial(cfg.mms.case_id, cfg.mms.grids, cfg.mms.T, cfg.controls)
            : mms_temporal(cfg.mms.case_id, cfg.mms.grid, cfg.mms.T, cfg.mms.levels, cfg.controls);
    ordered_json rep;
    rep["subcommand"] = "mms";
    rep["result"] = to_json(res);
    write_json(out_dir + "/mms_report.json", rep);
    if (!quiet) {
        std::cout << "mms " << res.case_id << " (" << res.mode << ")\n";
        for (const auto& r : res.rows)
            std::cout << "  " << r.label << "  error " << r.error << "  order "
                      << (std::isnan(r.pair_order) ? 0.0 : r.pair_order) << "\n";
        std::cout << "  observed order " << res.observed_order << "\n";
    }
    return 0;
}

}  // namespace detail

/// Subcommand dispatch. Any module error is rendered as a machine-readable
/// record on stdout and a nonzero exit status.
inline int dispatch(const std::string& subcommand, const RunConfig& cfg,
                    const std::string& out_dir, const CliOverrides& ov = {}) {
    std::filesystem::create_directories(out_dir);
    try {
        if (subcommand == "simulate") return detail::run_simulate(cfg, out_dir, ov.quiet);
        if (subcommand == "audit") return detail::run_audit(cfg, out_dir, ov);
        if (subcommand == "verify-kernel") return detail::run_verify_kernel(cfg, out_dir, ov);
        if (subcommand == "sweep") return detail::run_sweep(cfg, out_dir, ov);
        if (subcommand == "mms") return detail::run_mms(cfg, out_dir, ov.quiet);
        throw std::invalid_argument("unknown subcommand: " + subcommand);
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = {{"subcommand", subcommand}, {"message", e.what()}};
        std::cout << err.dump() << "\n";
        return 2;
    }
}

}  // namespace rotforch
