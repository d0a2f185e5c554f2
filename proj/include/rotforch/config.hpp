#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotforch/problem.hpp"

namespace rotforch {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AuditEntry {
    std::string id;
    std::optional<double> s;
    std::optional<double> T0;
    std::optional<double> t0;
};

struct AuditBlock {
    std::vector<AuditEntry> estimates;
    double margin = 0.15;
    bool require_nonneg = false;
};

struct SweepBlock {
    std::vector<double> omega_star;
    std::vector<std::string> estimates;
};

struct MmsBlock {
    std::string case_id = "mms-trig";
    std::string mode = "spatial";  // or "temporal"
    std::vector<int> grids = {8, 16, 32};
    int grid = 8;
    int levels = 3;
    double T = 0.01;
};

struct KernelBlock {
    long samples = 10000;
    double radius = 1000.0;
};

/// Fully validated run configuration. Exactly one of the physical /
/// nondimensional parameter blocks is present in the file; physical blocks
/// pass through the compressibility scalings on load.
struct RunConfig {
    EnvironmentParams env;
    double rho_star = 0.0;  // Coriolis reference density (sweeps need it)
    ForchheimerLaw law{{1.0, 1.0}, {1.0}};
    Grid grid = Grid::make({0, 0, 0}, {1, 1, 1}, {8, 8, 8});
    std::string u0_preset = "constant";
    double u0_amplitude = 0.0;
    double u0_offset = 1.0;
    std::string psi_preset = "constant";
    double psi_value = 1.0;
    double T = 0.01;
    StepControls controls;
    AuditBlock audit;
    std::optional<SweepBlock> sweep;
    MmsBlock mms;
    KernelBlock kernel;
    std::uint64_t seed = 0;

    ProblemSpec make_problem() const {
        ProblemSpec spec;
        spec.env = env;
        spec.law = law;
        spec.grid = grid;
        spec.u0 = make_u0(grid, u0_preset, u0_amplitude, u0_offset);
        spec.psi = make_psi(psi_preset, psi_value);
        spec.T = T;
        spec.validate();
        return spec;
    }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(path + ": unknown key '" + key + "'");
}

inline double num(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(path + ": missing key '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return obj[key].get<double>();
}

inline double num_or(const json& obj, const std::string& key, double fallback) {
    return obj.contains(key) ? obj[key].get<double>() : fallback;
}

inline Vec3 vec3(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_array() || obj[key].size() != 3)
        throw ConfigError(path + "." + key + ": expected an array of 3 numbers");
    return {obj[key][0].get<double>(), obj[key][1].get<double>(), obj[key][2].get<double>()};
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& root) {
    using detail::check_keys;
    using detail::num;
    using detail::num_or;
    using detail::vec3;
    using nlohmann::json;

    check_keys(root, "config",
               {"physical", "nondimensional", "rotation", "law", "grid", "data", "time", "audit",
                "sweep", "mms", "kernel", "seed"});

    RunConfig cfg;

    const bool has_phys = root.contains("physical");
    const bool has_nd = root.contains("nondimensional");
    if (has_phys == has_nd)
        throw ConfigError("config: exactly one of 'physical' or 'nondimensional' is required");

    if (!root.contains("rotation")) throw ConfigError("config: missing 'rotation' block");
    const json& rot = root["rotation"];
    check_keys(rot, "rotation", {"axis", "rho_star", "R"});
    const Vec3 axis = vec3(rot, "rotation", "axis");

    if (has_phys) {
        const json& ph = root["physical"];
        check_keys(ph, "physical",
                   {"kappa", "phi_tilde", "G_tilde", "Omega_tilde", "theta", "omega0"});
        if (rot.contains("R"))
            throw ConfigError("rotation: physical blocks derive R; give rho_star instead");
        PhysicalParams p;
        p.kappa = num(ph, "physical", "kappa");
        p.phi_tilde = num(ph, "physical", "phi_tilde");
        p.G_tilde = num(ph, "physical", "G_tilde");
        p.Omega_tilde = num(ph, "physical", "Omega_tilde");
        p.rho_star = num(rot, "rotation", "rho_star");
        p.theta = num_or(ph, "theta", 0.0);
        p.omega0 = num_or(ph, "omega0", 0.0);
        try {
            cfg.env = nondimensionalize(p, axis);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("physical: ") + e.what());
        }
        cfg.rho_star = p.rho_star;
    } else {
        const json& nd = root["nondimensional"];
        check_keys(nd, "nondimensional", {"phi", "G", "Omega", "theta", "omega0", "forcing"});
        cfg.env.phi = num(nd, "nondimensional", "phi");
        cfg.env.G = num(nd, "nondimensional", "G");
        cfg.env.Omega = num(nd, "nondimensional", "Omega");
        cfg.env.theta = num_or(nd, "theta", 0.0);
        cfg.env.omega0 = num_or(nd, "omega0", 0.0);
        if (nd.contains("forcing")) cfg.env.forcing_on = nd["forcing"].get<bool>();
        if (rot.contains("R") == rot.contains("rho_star"))
            throw ConfigError("rotation: give exactly one of 'R' or 'rho_star'");
        double R;
        if (rot.contains("R")) {
            R = num(rot, "rotation", "R");
            cfg.rho_star = cfg.env.Omega > 0.0 ? R * cfg.env.phi / (2.0 * cfg.env.Omega) : 0.0;
        } else {
            cfg.rho_star = num(rot, "rotation", "rho_star");
            R = 2.0 * cfg.rho_star * cfg.env.Omega / cfg.env.phi;
        }
        try {
            cfg.env.rot = RotationSpec::make(axis, R);
            cfg.env.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("nondimensional: ") + e.what());
        }
    }

    if (!root.contains("law")) throw ConfigError("config: missing 'law' block");
    {
        const json& law = root["law"];
        check_keys(law, "law", {"coeffs", "exponents"});
        if (!law.contains("coeffs") || !law.contains("exponents"))
            throw ConfigError("law: need 'coeffs' and 'exponents'");
        try {
            cfg.law = ForchheimerLaw::make(law["coeffs"].get<std::vector<double>>(),
                                           law["exponents"].get<std::vector<double>>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("law: ") + e.what());
        }
    }

    if (!root.contains("grid")) throw ConfigError("config: missing 'grid' block");
    {
        const json& gr = root["grid"];
        check_keys(gr, "grid", {"lo", "hi", "n"});
        const Vec3 lo = vec3(gr, "grid", "lo");
        const Vec3 hi = vec3(gr, "grid", "hi");
        if (!gr.contains("n") || !gr["n"].is_array() || gr["n"].size() != 3)
            throw ConfigError("grid.n: expected an array of 3 integers");
        try {
            cfg.grid = Grid::make(lo, hi,
                                  {gr["n"][0].get<int>(), gr["n"][1].get<int>(), gr["n"][2].get<int>()});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("grid: ") + e.what());
        }
    }

    if (root.contains("data")) {
        const json& da = root["data"];
        check_keys(da, "data", {"u0", "psi"});
        if (da.contains("u0")) {
            check_keys(da["u0"], "data.u0", {"preset", "amplitude", "offset"});
            cfg.u0_preset = da["u0"].value("preset", cfg.u0_preset);
            cfg.u0_amplitude = num_or(da["u0"], "amplitude", cfg.u0_amplitude);
            cfg.u0_offset = num_or(da["u0"], "offset", cfg.u0_offset);
        }
        if (da.contains("psi")) {
            check_keys(da["psi"], "data.psi", {"preset", "value"});
            cfg.psi_preset = da["psi"].value("preset", cfg.psi_preset);
            cfg.psi_value = num_or(da["psi"], "value", cfg.psi_value);
        }
    }

    if (root.contains("time")) {
        const json& tm = root["time"];
        check_keys(tm, "time", {"T", "safety", "max_dt", "cadence"});
        cfg.T = num(tm, "time", "T");
        cfg.controls.safety = num_or(tm, "safety", cfg.controls.safety);
        cfg.controls.max_dt = num_or(tm, "max_dt", cfg.controls.max_dt);
        if (tm.contains("cadence")) cfg.controls.snapshot_every = tm["cadence"].get<int>();
        try {
            cfg.controls.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("time: ") + e.what());
        }
    }

    if (root.contains("audit")) {
        const json& au = root["audit"];
        check_keys(au, "audit", {"estimates", "margin", "require_nonneg"});
        cfg.audit.margin = num_or(au, "margin", cfg.audit.margin);
        if (au.contains("require_nonneg")) cfg.audit.require_nonneg = au["require_nonneg"].get<bool>();
        if (au.contains("estimates")) {
            for (const auto& e : au["estimates"]) {
                AuditEntry entry;
                if (e.is_string()) {
                    entry.id = e.get<std::string>();
                } else {
                    check_keys(e, "audit.estimates[]", {"id", "s", "T0", "t0"});
                    entry.id = e.at("id").get<std::string>();
                    if (e.contains("s")) entry.s = e["s"].get<double>();
                    if (e.contains("T0")) entry.T0 = e["T0"].get<double>();
                    if (e.contains("t0")) entry.t0 = e["t0"].get<double>();
                }
                cfg.audit.estimates.push_back(entry);
            }
        }
    }

    if (root.contains("sweep")) {
        const json& sw = root["sweep"];
        check_keys(sw, "sweep", {"omega_star", "estimates"});
        SweepBlock blk;
        blk.omega_star = sw.at("omega_star").get<std::vector<double>>();
        if (sw.contains("estimates"))
            blk.estimates = sw["estimates"].get<std::vector<std::string>>();
        cfg.sweep = blk;
    }

    if (root.contains("mms")) {
        const json& mm = root["mms"];
        check_keys(mm, "mms", {"case", "mode", "grids", "grid", "levels", "T"});
        cfg.mms.case_id = mm.value("case", cfg.mms.case_id);
        cfg.mms.mode = mm.value("mode", cfg.mms.mode);
        if (mm.contains("grids")) cfg.mms.grids = mm["grids"].get<std::vector<int>>();
        if (mm.contains("grid")) cfg.mms.grid = mm["grid"].get<int>();
        if (mm.contains("levels")) cfg.mms.levels = mm["levels"].get<int>();
        cfg.mms.T = num_or(mm, "T", cfg.mms.T);
        if (cfg.mms.mode != "spatial" && cfg.mms.mode != "temporal")
            throw ConfigError("mms.mode: must be 'spatial' or 'temporal'");
    }

    if (root.contains("kernel")) {
        const json& kn = root["kernel"];
        check_keys(kn, "kernel", {"samples", "radius"});
        if (kn.contains("samples")) cfg.kernel.samples = kn["samples"].get<long>();
        cfg.kernel.radius = num_or(kn, "radius", cfg.kernel.radius);
    }

    if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return parse_config(root);
}

}  // namespace rotforch
