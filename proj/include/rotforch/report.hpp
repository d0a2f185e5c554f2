#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rotforch/bound_report.hpp"
#include "rotforch/energy.hpp"
#include "rotforch/estimates.hpp"
#include "rotforch/mms.hpp"
#include "rotforch/solver.hpp"

namespace rotforch {

using ordered_json = nlohmann::ordered_json;

/// Snapshot CSV, one file per stored time level. Column order is part of the
/// format: t, i, j, k, x, y, z, u.
inline void write_snapshot_csv(const std::string& path, const ScalarField& u, double t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,i,j,k,x,y,z,u\n";
    const Grid& g = u.grid;
    char buf[160];
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const Vec3 c = g.center(i, j, k);
                std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", t, i, j,
                              k, c.x, c.y, c.z, u(i, j, k));
                out << buf;
            }
}

inline ordered_json to_json(const BoundReport& report) {
    ordered_json j;
    j["samples_checked"] = report.samples_checked;
    j["worst_slack"] = report.worst_slack;
    j["violation_count"] = report.violations.size();
    ordered_json viol = ordered_json::array();
    std::size_t shown = 0;
    for (const auto& v : report.violations) {
        if (++shown > 100) break;  // cap the record, the count is complete
        viol.push_back({{"inequality", v.inequality},
                        {"point", {v.point.x, v.point.y, v.point.z}},
                        {"slack", v.slack}});
    }
    j["violations"] = viol;
    return j;
}

inline ordered_json to_json(const EstimateReport& rep) {
    ordered_json j;
    j["id"] = rep.id;
    if (!std::isnan(rep.params.s)) j["s"] = rep.params.s;
    j["margin"] = rep.params.margin;
    if (rep.params.T0) j["T0"] = *rep.params.T0;
    if (rep.params.t0) j["t0"] = *rep.params.t0;
    j["lhs"] = rep.lhs;
    j["rhs_data"] = rep.rhs_data;
    j["ratio"] = rep.ratio;
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

inline ordered_json to_json(const EnergyQuantities& eq) {
    ordered_json j;
    j["M_star"] = eq.M_star;
    j["E0"] = eq.E0;
    j["E_star"] = eq.E_star;
    j["N0"] = eq.N0;
    j["N_star"] = eq.N_star;
    j["N2"] = eq.N2;
    ordered_json ns = ordered_json::object();
    for (const auto& [s, v] : eq.N_s) ns["s=" + std::to_string(s)] = v;
    j["N_s"] = ns;
    ordered_json ds = ordered_json::object();
    for (const auto& [s, v] : eq.D_s) ds["s=" + std::to_string(s)] = v;
    j["D_s"] = ds;
    j["MZ_sup"] = eq.MZ_sup;
    j["M0_final"] = eq.M0_curve.empty() ? 0.0 : eq.M0_curve.back();
    return j;
}

inline ordered_json to_json(const MmsResult& res) {
    ordered_json j;
    j["case"] = res.case_id;
    j["mode"] = res.mode;
    ordered_json rows = ordered_json::array();
    for (const auto& r : res.rows) {
        ordered_json row;
        row["level"] = r.label;
        row["resolution"] = r.resolution;
        row["error"] = r.error;
        if (!std::isnan(r.pair_order)) row["pair_order"] = r.pair_order;
        rows.push_back(row);
    }
    j["table"] = rows;
    j["observed_order"] = res.observed_order;
    return j;
}

inline ordered_json to_json(const SweepSummary& sw) {
    ordered_json j;
    j["omega_star"] = sw.omega_star;
    j["coriolis"] = sw.coriolis;
    j["M_star"] = sw.M_star;
    ordered_json rows = ordered_json::array();
    for (const auto& row : sw.rows) {
        ordered_json r;
        r["id"] = row.id;
        r["ratios"] = row.ratios;
        r["max_ratio"] = row.max_ratio;
        r["min_ratio"] = row.min_ratio;
        if (row.min_ratio > 0.0) r["spread"] = row.max_ratio / row.min_ratio;
        r["all_finite"] = row.all_finite;
        rows.push_back(r);
    }
    j["estimates"] = rows;
    j["orderings_ok"] = sw.orderings_ok;
    return j;
}

inline void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace rotforch
