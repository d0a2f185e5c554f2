// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Reference cases mirror the configs/ directory.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rotforch/cli.hpp"
#include "rotforch/kernel_checks.hpp"
#include "rotforch/mms.hpp"
#include "support.hpp"

using namespace rotforch;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

CliOverrides quiet_ov() {
    CliOverrides ov;
    ov.quiet = true;
    return ov;
}

void report(int n, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-22s %s\n", pass ? "PASS" : "FAIL", n, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// The reference case: chi* == 1 across the whole rotation sweep by design
// (small G over the planar domain radius keeps d*(1+Omega*) below 1).
ProblemSpec reference_spec(int n = 16) {
    ProblemSpec spec;
    spec.env.phi = 1.0;
    spec.env.G = 0.005;
    spec.env.Omega = 0.1;
    spec.env.theta = 1.0471975511965976;
    spec.env.omega0 = 0.0;
    spec.env.rot = RotationSpec::make({0, 0, 1}, 2.0 * 0.05 * 0.1 / 1.0);
    spec.law = ForchheimerLaw::make({1.0, 1.0}, {1.0});
    spec.grid = Grid::make({0, 0, 0}, {1, 1, 1}, {n, n, n});
    spec.u0 = make_u0(spec.grid, "bump", 0.5, 1.0);
    spec.psi = TimeField::constant(1.0);
    spec.T = 0.05;
    return spec;
}

// The maximum-principle shadow case: strong steady drift, compact peak whose
// analytic maximum falls between cell centers.
ProblemSpec shadow_spec(int n) {
    ProblemSpec spec;
    spec.env.phi = 1.0;
    spec.env.G = 60.0;
    spec.env.Omega = 0.2;
    spec.env.theta = 1.5707963267948966;
    spec.env.omega0 = 0.0;
    spec.env.rot = RotationSpec::make({0, 0, 1}, 0.5);
    spec.law = ForchheimerLaw::make({1.0, 1.0}, {1.0});
    spec.grid = Grid::make({0, 0, 0}, {1, 1, 1}, {n, n, n});
    spec.u0 = make_u0(spec.grid, "peak", 1.0, 1.0);
    spec.psi = TimeField::constant(1.0);
    spec.T = 0.01;
    return spec;
}

ProblemSpec constant_spec(int n) {
    ProblemSpec spec;
    spec.env.phi = 1.0;
    spec.env.G = 1.0;
    spec.env.Omega = 0.0;
    spec.env.forcing_on = false;
    spec.env.rot = RotationSpec::make({0, 0, 1}, 0.0);
    spec.law = ForchheimerLaw::make({1.0, 1.0}, {1.0});
    spec.grid = Grid::make({0, 0, 0}, {1, 1, 1}, {n, n, n});
    spec.u0 = ScalarField(spec.grid, 1.0);
    spec.psi = TimeField::constant(1.0);
    spec.T = 0.05;
    return spec;
}

void criterion_1_roundtrip() {
    const auto t0 = std::chrono::steady_clock::now();
    Sampler rng(1001);
    long failures = 0;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto law = test::random_law(rng, 3, 4.0);
        const auto rot = test::random_rotation(rng, 10.0);
        const Vec3 v = rng.in_ball(1000.0);
        try {
            const Vec3 y = eval_F(law, rot, v);
            const Vec3 back = invert_F(law, rot, y);
            worst = std::max(worst, (back - v).norm() / std::max(1.0, v.norm()));
        } catch (const KernelConvergenceError&) {
            ++failures;
        }
    }
    const double dt = seconds_since(t0);
    const bool pass = failures == 0 && worst <= 1e-9 && dt < 10.0;
    report(1, "kernel roundtrip", pass,
           fmt("10^4 samples, worst rel err %.2e, %ld failures, %.1f s", worst, failures, dt));
}

void criteria_2_3_4_bounds() {
    Sampler rng(2002);
    long viol_norm = 0, viol_jac = 0, viol_mono = 0, viol_rot = 0;
    double worst = 0.0;
    for (int c = 0; c < 20; ++c) {
        const auto law = test::random_law(rng, 3, 4.0);
        const auto rot = test::random_rotation(rng, 10.0);
        const BoundReport rep = verify_kernel_bounds(law, rot, 10000, 1000.0, 3000 + c);
        worst = std::min(worst, rep.worst_slack);
        for (const auto& v : rep.violations) {
            if (v.inequality.rfind("xnorm", 0) == 0 || v.inequality.rfind("xdoty", 0) == 0)
                ++viol_norm;
            else if (v.inequality.rfind("xjac", 0) == 0)
                ++viol_jac;
            else if (v.inequality == "monotonicity_a0")
                ++viol_mono;
            else if (v.inequality == "rotation_dissipation")
                ++viol_rot;
        }
    }
    report(2, "norm bound suite", viol_norm == 0,
           fmt("20 configs x 10^4 samples, %ld violations", viol_norm));
    report(3, "derivative bound suite", viol_jac == 0 && viol_rot == 0,
           fmt("jacobian %ld, rotation dissipation %ld violations", viol_jac, viol_rot));
    report(4, "monotonicity", viol_mono == 0,
           fmt("20 configs x 10^4 pairs, %ld violations", viol_mono));
}

void criterion_5_jacobian() {
    Sampler rng(5005);
    double worst_fd = 0.0, worst_inv = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto law = test::random_law(rng, 3, 4.0);
        const auto rot = test::random_rotation(rng, 10.0);
        Vec3 v = rng.in_ball(50.0);
        if (v.norm() < 1e-3) v += Vec3{0.01, 0, 0};
        worst_fd = std::max(worst_fd, test::rel_matrix_error(test::fd_jacobian_F(law, rot, v),
                                                             jacobian_F(law, rot, v)));
        const Vec3 y = eval_F(law, rot, v);
        const Vec3 x = invert_F(law, rot, y);
        const Mat3 prod = jacobian_F(law, rot, x) * jacobian_X(law, rot, y);
        double dev = 0.0;
        const Mat3 eye = Mat3::identity();
        for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc) dev = std::max(dev, std::abs(prod(r, cc) - eye(r, cc)));
        worst_inv = std::max(worst_inv, dev);
    }
    const bool pass = worst_fd <= 1e-6 && worst_inv <= 1e-10;
    report(5, "jacobian consistency", pass,
           fmt("FD rel err %.2e, |X'F' - I| %.2e over 10^3 samples", worst_fd, worst_inv));
}

void criterion_6_weight() {
    const Grid g = Grid::make({0, 0, 0}, {1, 1, 1}, {16, 16, 16});
    Sampler rng(6006);
    const double a = 0.5;  // two-term reference law
    long violations = 0;
    long checks = 0;
    for (int trial = 0; trial < 10; ++trial) {
        ScalarField w(g);
        VecField Q(g);
        // Random low-frequency trigonometric fields.
        const double ax = rng.uniform(1.0, 4.0), ay = rng.uniform(1.0, 4.0),
                     az = rng.uniform(1.0, 4.0);
        const double c1 = rng.uniform(-2.0, 2.0), c2 = rng.uniform(-2.0, 2.0);
        for (int k = 0; k < 16; ++k)
            for (int j = 0; j < 16; ++j)
                for (int i = 0; i < 16; ++i) {
                    const Vec3 p = g.center(i, j, k);
                    w(i, j, k) = c1 * std::sin(ax * p.x + 0.2) * std::cos(ay * p.y) +
                                 c2 * std::sin(az * p.z);
                    Q(i, j, k) = {std::sin(ay * p.y + 0.4) * c2, std::cos(ax * p.z) * c1,
                                  std::sin(ax * p.x) * std::cos(az * p.y)};
                }
        for (double s : {a, 1.0, 2.0, 4.0}) {
            const BoundReport rep = kug_verify(w, Q, a, s);
            violations += static_cast<long>(rep.violations.size());
            checks += rep.samples_checked;
        }
    }
    report(6, "weight inequality suite", violations == 0,
           fmt("10 fields x 4 exponents, %ld checks, %ld violations", checks, violations));
}

void criterion_7_max_principle() {
    const ProblemSpec s16 = shadow_spec(16);
    const ProblemSpec s32 = shadow_spec(32);
    const double v16 = max_principle_audit(run(s16, {}), s16, true).violation;
    const double v32 = max_principle_audit(run(s32, {}), s32, true).violation;
    const ProblemSpec cs = constant_spec(8);
    const double vconst = max_principle_audit(run(cs, {}), cs, true).violation;
    const bool pass = v16 > 0.0 && v32 <= 0.65 * v16 && vconst == 0.0;
    report(7, "max principle shadow", pass,
           fmt("V16=%.3e, V32=%.3e (<= 0.65 V16), constant V=%.1e", v16, v32, vconst));
}

void criterion_8_conservation() {
    const ProblemSpec spec = reference_spec(16);
    const Trajectory traj = run(spec, {});
    double worst = 0.0;
    for (const auto& s : traj.steps) worst = std::max(worst, s.balance_rel);
    const bool pass = traj.steps.size() >= 500 && worst <= 1e-12;
    report(8, "flux balance", pass,
           fmt("%zu steps, worst relative residual %.2e", traj.steps.size(), worst));
}

void criterion_9_mms() {
    auto t0 = std::chrono::steady_clock::now();
    const MmsResult sp = mms_spatial("mms-trig", {8, 16, 32}, 0.01);
    const double t_sp = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const MmsResult tm = mms_temporal("mms-quadratic", 8, 0.05, 3);
    const double t_tm = seconds_since(t0);
    const bool order_sp = std::abs(sp.observed_order - 2.0) <= 0.3;
    const bool order_tm = std::abs(tm.observed_order - 1.0) <= 0.3;
    // Whole studies under 2 minutes bounds every constituent run by it too.
    const bool runtime = t_sp < 120.0 && t_tm < 120.0;
    report(9, "manufactured solutions", order_sp && order_tm && runtime,
           fmt("spatial order %.2f, temporal order %.2f, %.0f s + %.0f s", sp.observed_order,
               tm.observed_order, t_sp, t_tm));
}

void criterion_10_sweep() {
    const std::vector<std::string> ids = {"gradu6a", "gradu6b", "ab23", "ab24",
                                          "ab33",    "ab34",    "ih0",  "ih1",
                                          "ih2",     "kug4",    "pwt6", "LUembed"};
    const SweepSummary sw =
        sweep_report(reference_spec(16), 0.05, {0.0, 1.0, 5.0, 10.0}, ids, 0.15, {});
    bool finite = true, spread_ok = true;
    double worst_spread = 0.0;
    std::string worst_id = "-";
    for (const auto& row : sw.rows) {
        finite = finite && row.all_finite;
        const double spread = row.min_ratio > 0.0
                                  ? row.max_ratio / row.min_ratio
                                  : std::numeric_limits<double>::infinity();
        if (spread > worst_spread) {
            worst_spread = spread;
            worst_id = row.id;
        }
        spread_ok = spread_ok && spread <= 100.0;
    }
    report(10, "estimate ratio sweep", finite && spread_ok && sw.orderings_ok,
           fmt("12 estimates x 4 rotation numbers, worst spread %.2f (%s), orderings %s",
               worst_spread, worst_id.c_str(), sw.orderings_ok ? "exact" : "VIOLATED"));
}

void criterion_11_determinism() {
    auto j = nlohmann::json::parse(R"({
        "nondimensional": {"phi": 1.0, "G": 0.5, "Omega": 0.4, "theta": 0.9},
        "rotation": {"axis": [0, 0, 1], "R": 0.8},
        "law": {"coeffs": [1.0, 1.0], "exponents": [1.0]},
        "grid": {"lo": [0, 0, 0], "hi": [1, 1, 1], "n": [8, 8, 8]},
        "data": {"u0": {"preset": "bump", "amplitude": 0.5, "offset": 1.0},
                 "psi": {"preset": "constant", "value": 1.0}},
        "time": {"T": 0.004, "cadence": 5},
        "audit": {"margin": 0.3, "estimates": ["gradu6a", "ab23", "pwt6", "LUembed"]},
        "sweep": {"omega_star": [0.0, 2.0], "estimates": ["gradu6a", "LUembed"]},
        "mms": {"case": "mms-quadratic", "mode": "temporal", "grid": 8, "levels": 3, "T": 0.01},
        "kernel": {"samples": 2000, "radius": 1000.0},
        "seed": 7
    })");
    const RunConfig cfg = parse_config(j);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const fs::path a = fs::temp_directory_path() / "rotforch_acc_a";
    const fs::path b = fs::temp_directory_path() / "rotforch_acc_b";
    fs::remove_all(a);
    fs::remove_all(b);
    bool ok = true;
    for (const std::string sub : {"verify-kernel", "audit", "simulate", "sweep", "mms"}) {
        ok = ok && dispatch(sub, cfg, a.string(), quiet_ov()) == 0;
        ok = ok && dispatch(sub, cfg, b.string(), quiet_ov()) == 0;
    }
    long compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        ok = ok && slurp(entry.path()) == slurp(b / name);
        ++compared;
    }
    report(11, "determinism", ok && compared > 2,
           fmt("%ld artifacts byte-compared across repeated invocations", compared));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_roundtrip();
    criteria_2_3_4_bounds();
    criterion_5_jacobian();
    criterion_6_weight();
    criterion_7_max_principle();
    criterion_8_conservation();
    criterion_9_mms();
    criterion_10_sweep();
    criterion_11_determinism();
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
