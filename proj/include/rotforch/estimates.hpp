#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rotforch/cutoff.hpp"
#include "rotforch/energy.hpp"

namespace rotforch {

struct AuditParams {
    double s = std::numeric_limits<double>::quiet_NaN();
    double margin = 0.0;
    std::optional<double> T0;
    std::optional<double> t0;          // temporal cutoff ramp, when used
    std::optional<double> slice_time;  // embedding audit time slice
};

/// One ratio audit: the estimate's left side by quadrature on the trajectory
/// against its right-side data functional with every generic constant set
/// to 1. Ratios are the reported observable; the generic constants are not
/// recoverable, so no pass/fail threshold is attached to a single report.
struct EstimateReport {
    std::string id;
    AuditParams params;
    double lhs = 0.0;
    double rhs_data = 0.0;
    double ratio = 0.0;
    std::string notes;
};

/// Shared per-trajectory caches for the audits: cell gradients, the weight
/// K = (1+|Phi|)^{-a}, and |D^2 u|^2 per snapshot, plus the scalar energy
/// functionals.
class AuditContext {
public:
    AuditContext(const Trajectory& traj, const ProblemSpec& spec)
        : traj_(traj), spec_(spec), kc_(kernel_constants(spec.law, spec.env.rot)),
          bounds_(env_bounds(spec.env, spec.grid)),
          eq_(energy_quantities(traj, spec, {})), grad0_(gradient(spec.u0)) {}

    const Trajectory& traj() const { return traj_; }
    const ProblemSpec& spec() const { return spec_; }
    const KernelConstants& kc() const { return kc_; }
    const DerivedEnvBounds& bounds() const { return bounds_; }
    const EnergyQuantities& eq() const { return eq_; }

    const VecField& grad(std::size_t s) {
        ensure_grad();
        return grads_[s];
    }
    const ScalarField& K(std::size_t s) {
        ensure_K();
        return K_[s];
    }
    const ScalarField& hess2(std::size_t s) {
        if (hess2_.empty()) {
            hess2_.reserve(traj_.size());
            for (const auto& u : traj_.snapshots) hess2_.push_back(hessian_frobenius2(u));
        }
        return hess2_[s];
    }

    /// N_* family member with initial-gradient integrability r >= 2.
    double N_of(double r) {
        if (r <= 2.0 + 1e-14) return eq_.N2;
        auto it = ns_cache_.find(r);
        if (it != ns_cache_.end()) return it->second;
        ScalarField gs(spec_.grid);
        for (std::size_t c = 0; c < grad0_.data.size(); ++c)
            gs.data[c] = std::pow(grad0_.data[c].norm(), r);
        const double v = eq_.N2 + spec_.env.phi * integrate(gs);
        ns_cache_[r] = v;
        return v;
    }

    /// D_s for a given cutoff: the (2s+2)-th power of the initial gradient
    /// against zeta(.,0)^2.
    double D_of(double s, const Cutoff& z) const {
        const Grid& g = spec_.grid;
        NeumaierSum acc;
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    const double zc = z.zeta(g.center(i, j, k), 0.0);
                    acc.add(std::pow(grad0_(i, j, k).norm(), 2.0 * s + 2.0) * zc * zc);
                }
        return acc.value() * g.cell_volume();
    }

    double int_gradu0_pow(double p) const {
        ScalarField gs(spec_.grid);
        for (std::size_t c = 0; c < grad0_.data.size(); ++c)
            gs.data[c] = std::pow(grad0_.data[c].norm(), p);
        return integrate(gs);
    }

    /// Trapezoid-in-time over snapshots with t >= t_lo of a per-snapshot
    /// space integral.
    double time_integral(double t_lo, const std::function<double(std::size_t)>& space_int) {
        const auto& t = traj_.times;
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < t.size(); ++k)
            if (t[k] >= t_lo - 1e-12 * std::max(1.0, spec_.T)) idx.push_back(k);
        if (idx.size() < 2) throw std::domain_error("audit: too few snapshots in the time window");
        double acc = 0.0;
        double prev = space_int(idx[0]);
        for (std::size_t m = 0; m + 1 < idx.size(); ++m) {
            const double next = space_int(idx[m + 1]);
            acc += 0.5 * (prev + next) * (t[idx[m + 1]] - t[idx[m]]);
            prev = next;
        }
        return acc;
    }

    double sup_over(double t_lo, const std::function<double(std::size_t)>& space_int) {
        double m = 0.0;
        bool any = false;
        for (std::size_t k = 0; k < traj_.times.size(); ++k)
            if (traj_.times[k] >= t_lo - 1e-12 * std::max(1.0, spec_.T)) {
                m = std::max(m, space_int(k));
                any = true;
            }
        if (!any) throw std::domain_error("audit: no snapshots in the time window");
        return m;
    }

    /// Midpoint space integral of a cell functional at snapshot s.
    template <class F>
    double space_int(F&& cell) const {
        const Grid& g = spec_.grid;
        NeumaierSum acc;
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) acc.add(cell(i, j, k));
        return acc.value() * g.cell_volume();
    }

    bool in_box(int i, int j, int k, const Vec3& lo, const Vec3& hi) const {
        const Vec3 c = spec_.grid.center(i, j, k);
        return c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y && c.z >= lo.z &&
               c.z <= hi.z;
    }

private:
    void ensure_grad() {
        if (grads_.empty()) {
            grads_.reserve(traj_.size());
            for (const auto& u : traj_.snapshots) grads_.push_back(gradient(u));
        }
    }
    void ensure_K() {
        ensure_grad();
        if (K_.empty()) {
            K_.reserve(traj_.size());
            const Grid& g = spec_.grid;
            for (std::size_t s = 0; s < traj_.size(); ++s) {
                const FrozenZ z = freeze_Z(spec_.env, traj_.times[s]);
                ScalarField Ks(g);
                for (int k = 0; k < g.n[2]; ++k)
                    for (int j = 0; j < g.n[1]; ++j)
                        for (int i = 0; i < g.n[0]; ++i) {
                            const double uv = traj_.snapshots[s](i, j, k);
                            const Vec3 phi =
                                grads_[s](i, j, k) + z(g.center(i, j, k)) * (uv * uv);
                            Ks(i, j, k) = std::pow(1.0 + phi.norm(), -kc_.a);
                        }
                K_.push_back(std::move(Ks));
            }
        }
    }

    const Trajectory& traj_;
    const ProblemSpec& spec_;
    KernelConstants kc_;
    DerivedEnvBounds bounds_;
    EnergyQuantities eq_;
    VecField grad0_;
    std::vector<VecField> grads_;
    std::vector<ScalarField> K_;
    std::vector<ScalarField> hess2_;
    std::map<double, double> ns_cache_;
};

inline const std::vector<std::string>& estimate_catalog() {
    static const std::vector<std::string> ids = {
        "gradu0", "gradu1", "gradu2", "gradu3", "gradu4", "gradu6a", "gradu6b",
        "ab4",    "ab1",    "ab11",   "ab2",    "ab22",   "ab23",    "ab24",
        "ab31",   "ab32",   "ab33",   "ab34",   "ih0",    "ih1",     "ih2",
        "kug4",   "pwtall", "pwtnew", "pwt6",   "LUembed", "iterate1", "Kug3"};
    return ids;
}

/// Fills unset parameters with the documented defaults for one estimate id:
/// s in the middle of the admissible range, T0 = T/2 for windowed audits,
/// and the supplied spatial margin.
inline AuditParams default_params(const std::string& id, double a, double T, double margin) {
    AuditParams p;
    p.margin = margin;
    auto needs_T0 = [&] { p.T0 = T / 2.0; };
    if (id == "ab23") p.s = 3.0;
    else if (id == "ab24") { p.s = 3.0; needs_T0(); }
    else if (id == "ab33") p.s = 3.0 - a;
    else if (id == "ab34") { p.s = 3.0 - a; needs_T0(); }
    else if (id == "ih0") p.s = 4.0;
    else if (id == "ih1") p.s = 4.0;
    else if (id == "ih2") { p.s = 4.0; needs_T0(); }
    else if (id == "kug4") { p.s = 5.0; needs_T0(); }
    else if (id == "pwtall") p.s = 2.0;
    else if (id == "pwtnew") { p.s = 2.0; needs_T0(); }
    else if (id == "pwt6") { p.s = 2.0; needs_T0(); }
    else if (id == "LUembed") { p.s = 1.0; p.slice_time = T; }
    else if (id == "iterate1" || id == "Kug3") p.s = 0.0;
    else if (id == "ab2" || id == "ab22" || id == "ab32") needs_T0();
    return p;
}

namespace detail {

inline void require_snapshot_cadence(const Trajectory& traj) {
    double max_dt = 0.0;
    for (const auto& s : traj.steps) max_dt = std::max(max_dt, s.dt);
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k)
        if (traj.times[k + 1] - traj.times[k] > 10.0 * max_dt * (1.0 + 1e-9))
            throw std::domain_error("audit: snapshot cadence coarser than 10 dt");
}

}  // namespace detail

inline EstimateReport estimate_audit(AuditContext& ctx, const std::string& id,
                                     const AuditParams& params) {
    const ProblemSpec& spec = ctx.spec();
    const Grid& grid = spec.grid;
    const double a = ctx.kc().a;
    const double chi1 = ctx.kc().chi1;
    const double X = ctx.bounds().chi_star;
    const double M = ctx.eq().M_star;
    const double M1 = M + 1.0;
    const double phi = spec.env.phi;
    const double T = spec.T;
    const double Es = ctx.eq().E_star;
    const double ub0 = ctx.eq().ubar0_l2sq;
    const double g0sq = ctx.eq().gradu0_l2sq;
    const double MZ = ctx.eq().MZ_sup;
    const double muZ = ctx.bounds().mu_Z;
    const double N0 = ctx.eq().N0;
    const double Ns = ctx.eq().N_star;
    const double N2 = ctx.eq().N2;
    const double s = params.s;

    EstimateReport rep;
    rep.id = id;
    rep.params = params;

    auto pw = [](double b, double e) { return std::pow(b, e); };
    auto need_s = [&](double lo, double hi, bool lo_open = false, bool hi_open = false) {
        if (std::isnan(s)) throw std::invalid_argument("audit " + id + ": s required");
        if (s < lo || s > hi || (lo_open && s == lo) || (hi_open && s == hi))
            throw std::domain_error("audit " + id + ": s out of range");
    };
    auto need_T0 = [&]() -> double {
        if (!params.T0) throw std::invalid_argument("audit " + id + ": T0 required");
        if (!(*params.T0 > 0.0 && *params.T0 < T))
            throw std::domain_error("audit " + id + ": T0 must lie in (0,T)");
        return *params.T0;
    };
    auto need_margin = [&]() {
        if (!(params.margin > 0.0)) throw std::invalid_argument("audit " + id + ": margin required");
    };

    // Whole-domain K-weighted and plain gradient norms.
    auto IK2 = [&] {
        return ctx.time_integral(0.0, [&](std::size_t sn) {
            const auto& K = ctx.K(sn);
            const auto& gr = ctx.grad(sn);
            return ctx.space_int([&](int i, int j, int k) {
                return K(i, j, k) * gr(i, j, k).norm2();
            });
        });
    };
    auto I2a = [&] {
        return ctx.time_integral(0.0, [&](std::size_t sn) {
            const auto& gr = ctx.grad(sn);
            return ctx.space_int(
                [&](int i, int j, int k) { return pw(gr(i, j, k).norm(), 2.0 - a); });
        });
    };
    // U'-restricted gradient integrals (optionally K-weighted), windowed.
    auto Iprime = [&](double p, bool weighted, double t_lo) {
        need_margin();
        const auto [blo, bhi] = inner_box(grid, params.margin);
        return ctx.time_integral(t_lo, [&, blo = blo, bhi = bhi](std::size_t sn) {
            const auto& gr = ctx.grad(sn);
            const ScalarField* K = weighted ? &ctx.K(sn) : nullptr;
            return ctx.space_int([&](int i, int j, int k) {
                if (!ctx.in_box(i, j, k, blo, bhi)) return 0.0;
                const double base = pw(gr(i, j, k).norm(), p);
                return K ? (*K)(i, j, k) * base : base;
            });
        });
    };
    auto sup_prime = [&](double p, double t_lo) {
        need_margin();
        detail::require_snapshot_cadence(ctx.traj());
        const auto [blo, bhi] = inner_box(grid, params.margin);
        return ctx.sup_over(t_lo, [&, blo = blo, bhi = bhi](std::size_t sn) {
            const auto& gr = ctx.grad(sn);
            return ctx.space_int([&](int i, int j, int k) {
                return ctx.in_box(i, j, k, blo, bhi) ? pw(gr(i, j, k).norm(), p) : 0.0;
            });
        });
    };
    // zeta-weighted space integral at one snapshot; `mode` picks the
    // integrand family shared by the cutoff lemmas.
    auto make_cutoff = [&]() {
        need_margin();
        std::optional<std::pair<double, double>> temporal;
        if (params.T0 && params.t0) temporal = std::make_pair(*params.T0, *params.t0);
        return build_cutoff(grid, params.margin, temporal, T);
    };

    if (id == "gradu0") {
        rep.lhs = IK2();
        rep.rhs_data = chi1 * chi1 * phi * (ub0 + ctx.eq().u_l2sq_spacetime) +
                       pw(1.0 + chi1, 2.0 * (2.0 + a)) * MZ * MZ * ctx.eq().u_l4_spacetime +
                       ctx.eq().E0;
    } else if (id == "gradu1") {
        rep.lhs = I2a();
        rep.rhs_data = chi1 * chi1 * phi * (ub0 + ctx.eq().u_l2sq_spacetime) +
                       pw(1.0 + chi1, 2.0 * (2.0 + a)) * (T + MZ * MZ * ctx.eq().u_l4_spacetime) +
                       ctx.eq().E0;
    } else if (id == "gradu2") {
        rep.lhs = IK2();
        rep.rhs_data = X * X * phi * ub0 + pw(X, 2.0 * (4.0 + a)) * T * M * M * M1 * M1 +
                       pw(X, 2.0 * (2.0 + a)) * Es;
    } else if (id == "gradu3") {
        rep.lhs = I2a();
        rep.rhs_data = X * X * phi * ub0 + pw(X, 2.0 * (4.0 + a)) * T * pw(M1, 4.0) +
                       pw(X, 2.0 * (2.0 + a)) * Es;
    } else if (id == "gradu4") {
        rep.lhs = IK2();
        rep.rhs_data = pw(X, 2.0 * (4.0 + a)) * M1 * M1 * N0;
    } else if (id == "gradu6a") {
        rep.lhs = IK2();
        rep.rhs_data = pw(X, 2.0 * (4.0 + a)) * pw(M1, 4.0) * Ns;
    } else if (id == "gradu6b") {
        rep.lhs = I2a();
        rep.rhs_data = pw(X, 2.0 * (4.0 + a)) * pw(M1, 4.0) * Ns;
    } else if (id == "ab4") {
        const Cutoff z = make_cutoff();
        auto zeta_int = [&](std::size_t sn, auto&& cell) {
            const double t = ctx.traj().times[sn];
            return ctx.space_int([&](int i, int j, int k) {
                const double zc = z.zeta(grid.center(i, j, k), t);
                return cell(i, j, k, zc);
            });
        };
        const double i4 = ctx.time_integral(0.0, [&](std::size_t sn) {
            const auto& K = ctx.K(sn);
            const auto& gr = ctx.grad(sn);
            return zeta_int(sn, [&](int i, int j, int k, double zc) {
                return K(i, j, k) * pw(gr(i, j, k).norm(), 4.0) * zc * zc;
            });
        });
        const double ih = ctx.time_integral(0.0, [&](std::size_t sn) {
            const auto& K = ctx.K(sn);
            const auto& h2 = ctx.hess2(sn);
            return zeta_int(sn, [&](int i, int j, int k, double zc) {
                return K(i, j, k) * h2(i, j, k) * zc * zc;
            });
        });
        rep.lhs = i4 + M * M * ih;
        const double zshape = 1.0 + pw(z.sup_grad_component(), 2.0) + pw(z.sup_zeta_t(), 2.0);
        rep.rhs_data = zshape * (pw(X, 2.0 * (5.0 + a)) * M * M * pw(M1, 4.0) * phi *
                                     (ub0 + ctx.D_of(0.0, z)) +
                                 pw(X, 4.0 * (4.0 + a)) * T * pw(M, 4.0) * pw(M1, 8.0) +
                                 pw(X, 4.0 * (3.0 + a)) * M * M * pw(M1, 4.0) * Es);
    } else if (id == "ab1" || id == "ab11") {
        rep.lhs = Iprime(4.0, true, 0.0);
        if (id == "ab1")
            rep.rhs_data = pw(X, 2.0 * (5.0 + a)) * M * M * pw(M1, 4.0) * phi * (ub0 + g0sq) +
                           pw(X, 4.0 * (4.0 + a)) * T * pw(M, 4.0) * pw(M1, 8.0) +
                           pw(X, 4.0 * (3.0 + a)) * M * M * pw(M1, 4.0) * Es;
        else
            rep.rhs_data = pw(X, 4.0 * (4.0 + a)) * M * M * pw(M1, 10.0) * N2;
    } else if (id == "ab2" || id == "ab22") {
        const double T0 = need_T0();
        rep.lhs = Iprime(4.0, true, T0);
        const double w = pw(1.0 + 1.0 / T0, 2.0);
        if (id == "ab2")
            rep.rhs_data = w * (pw(X, 2.0 * (5.0 + a)) * M * M * pw(M1, 4.0) * phi * ub0 +
                                pw(X, 4.0 * (4.0 + a)) * T * pw(M, 4.0) * pw(M1, 8.0) +
                                pw(X, 4.0 * (3.0 + a)) * M * M * pw(M1, 4.0) * Es);
        else
            rep.rhs_data = w * pw(X, 4.0 * (4.0 + a)) * M * M * pw(M1, 10.0) * Ns;
    } else if (id == "ab23") {
        need_s(2.0, 4.0);
        rep.lhs = Iprime(s, true, 0.0);
        rep.rhs_data = pw(X, (4.0 + a) * s) * pw(M, s - 2.0) * pw(M1, 3.0 * s - 2.0) * N2;
    } else if (id == "ab24") {
        need_s(2.0, 4.0);
        const double T0 = need_T0();
        rep.lhs = Iprime(s, true, T0);
        rep.rhs_data = pw(1.0 + 1.0 / T0, s - 2.0) * pw(X, (4.0 + a) * s) * pw(M, s - 2.0) *
                       pw(M1, 3.0 * s - 2.0) * Ns;
    } else if (id == "ab31") {
        rep.lhs = Iprime(4.0 - a, false, 0.0);
        rep.rhs_data = pw(X, 4.0 * (4.0 + a)) * pw(M1, 12.0) * N2;
    } else if (id == "ab32") {
        const double T0 = need_T0();
        rep.lhs = Iprime(4.0 - a, false, T0);
        rep.rhs_data = pw(1.0 + 1.0 / T0, 2.0) * pw(X, 4.0 * (4.0 + a)) * pw(M1, 12.0) * Ns;
    } else if (id == "ab33") {
        need_s(2.0 - a, 4.0 - a, true, true);
        rep.lhs = Iprime(s, false, 0.0);
        rep.rhs_data = pw(X, (4.0 + a) * (s + a)) * pw(M1, 4.0 * (s + a - 1.0)) * N2;
    } else if (id == "ab34") {
        need_s(2.0 - a, 4.0 - a, true, true);
        const double T0 = need_T0();
        rep.lhs = Iprime(s, false, T0);
        rep.rhs_data = pw(1.0 + 1.0 / T0, s + a - 2.0) * pw(X, (4.0 + a) * (s + a)) *
                       pw(M1, 4.0 * (s + a - 1.0)) * Ns;
    } else if (id == "ih0") {
        need_s(4.0, std::numeric_limits<double>::infinity());
        rep.lhs = Iprime(s, true, 0.0);
        rep.rhs_data = pw(X, (4.0 + a) * (s + 2.0)) * M * M * pw(M1, 4.0 * s) * ctx.N_of(s - 2.0);
    } else if (id == "ih1") {
        need_s(4.0 - a, std::numeric_limits<double>::infinity(), true);
        rep.lhs = Iprime(s, false, 0.0);
        rep.rhs_data =
            pw(X, (4.0 + a) * (s + a + 2.0)) * pw(M1, 4.0 * (s + a + 0.5)) * ctx.N_of(s + a - 2.0);
    } else if (id == "ih2") {
        need_s(4.0 - a, std::numeric_limits<double>::infinity(), true);
        const double T0 = need_T0();
        rep.lhs = Iprime(s, false, T0);
        rep.rhs_data = pw(1.0 + 1.0 / T0, s + a) * pw(X, (4.0 + a) * (s + a + 2.0)) *
                       pw(M1, 4.0 * (s + a + 1.0)) * Ns;
    } else if (id == "kug4") {
        need_s(4.0, std::numeric_limits<double>::infinity(), true);
        const double T0 = need_T0();
        rep.lhs = Iprime(s, true, T0);
        rep.rhs_data = pw(1.0 + 1.0 / T0, s) * pw(X, (4.0 + a) * (s + 2.0)) * M * M *
                       pw(M1, 4.0 * s + 2.0) * Ns;
    } else if (id == "pwtall") {
        need_s(2.0, std::numeric_limits<double>::infinity());
        rep.lhs = phi * sup_prime(s, 0.0);
        double tail;
        if (s == 2.0)
            tail = pw(X, 4.0 * (4.0 + a)) * pw(M1, 6.0) * N0;
        else if (s <= 4.0)
            tail = pw(X, (s + 2.0) * (4.0 + a)) * pw(M, s - 2.0) * pw(M1, 3.0 * s + 2.0) * N2;
        else
            tail = pw(X, (s + 4.0) * (4.0 + a)) * M * M * pw(M1, 4.0 * (s + 1.0)) *
                   ctx.N_of(s - 2.0);
        rep.rhs_data = phi * ctx.int_gradu0_pow(s) + tail;
    } else if (id == "pwtnew" || id == "pwt6") {
        need_s(2.0, std::numeric_limits<double>::infinity());
        const double T0 = need_T0();
        rep.lhs = phi * sup_prime(s, T0);
        const double w = 1.0 + 1.0 / T0;
        if (id == "pwt6") {
            rep.rhs_data = pw(X, (4.0 + a) * (s + a + 4.0)) * pw(w, s + a + 1.0) *
                           pw(M1, 4.0 * (s + a + 2.0)) * Ns;
        } else if (s == 2.0) {
            rep.rhs_data = pw(X, (4.0 + a) * (4.0 + a)) * pw(w, 1.0 + a) * pw(M1, 2.0 * (3.0 + a)) *
                           (pw(M, a) * pw(M1, 2.0 + a) * Ns + N0);
        } else if (s <= 4.0 - a) {
            rep.rhs_data = pw(X, (4.0 + a) * (s + a + 2.0)) * pw(w, s + a - 1.0) *
                           pw(M, s - 2.0) * pw(M1, 3.0 * s + 4.0 * a + 2.0) * Ns;
        } else if (s <= 4.0) {
            rep.rhs_data = pw(X, (4.0 + a) * (s + a + 4.0)) * pw(w, s + a + 1.0) *
                           pw(M, s - 2.0) * pw(M1, 3.0 * s + 4.0 * a + 10.0) * Ns;
        } else {
            rep.rhs_data = pw(X, (4.0 + a) * (s + a + 4.0)) * pw(w, s + a + 1.0) * M * M *
                           pw(M1, 4.0 * s + 4.0 * a + 6.0) * Ns;
        }
    } else if (id == "LUembed") {
        need_s(1.0, std::numeric_limits<double>::infinity());
        const Cutoff z = make_cutoff();
        const double t_slice = params.slice_time.value_or(T);
        std::size_t sn = 0;
        for (std::size_t k = 0; k < ctx.traj().times.size(); ++k)
            if (std::abs(ctx.traj().times[k] - t_slice) <
                std::abs(ctx.traj().times[sn] - t_slice))
                sn = k;
        const double t = ctx.traj().times[sn];
        const auto& u = ctx.traj().snapshots[sn];
        const auto& gr = ctx.grad(sn);
        const auto& h2 = ctx.hess2(sn);
        const FrozenZ zf = freeze_Z(spec.env, t);

        double supw2 = 0.0;
        for (int k = 0; k < grid.n[2]; ++k)
            for (int j = 0; j < grid.n[1]; ++j)
                for (int i = 0; i < grid.n[0]; ++i)
                    if (z.zeta(grid.center(i, j, k), t) > 0.0)
                        supw2 = std::max(supw2, u(i, j, k) * u(i, j, k));

        auto KwQ = [&](int i, int j, int k) {
            const double w = u(i, j, k);
            return std::pow(1.0 + (gr(i, j, k) + zf(grid.center(i, j, k)) * (w * w)).norm(), -a);
        };
        rep.lhs = ctx.space_int([&](int i, int j, int k) {
            const double zc = z.zeta(grid.center(i, j, k), t);
            return KwQ(i, j, k) * pw(gr(i, j, k).norm(), 2.0 * s + 2.0) * zc * zc;
        });
        const double term_hess = ctx.space_int([&](int i, int j, int k) {
            const double zc = z.zeta(grid.center(i, j, k), t);
            return KwQ(i, j, k) * h2(i, j, k) * (pw(gr(i, j, k).norm(), 2.0 * s - 2.0) + 1.0) * zc *
                   zc;
        });
        const double term_grad = ctx.space_int([&](int i, int j, int k) {
            const Vec3 p = grid.center(i, j, k);
            const double zc = z.zeta(p, t);
            const double w = u(i, j, k);
            const double qn = zf(p).norm();
            const double coupling = (std::abs(w) * muZ + qn) * (std::abs(w) * muZ + qn) * zc * zc *
                                    w * w;
            return KwQ(i, j, k) * pw(gr(i, j, k).norm(), 2.0 * s) *
                   (z.grad_zeta(p, t).norm2() + coupling);
        });
        const double term_data = ctx.space_int([&](int i, int j, int k) {
            const Vec3 p = grid.center(i, j, k);
            const double zc = z.zeta(p, t);
            const double w2q = (zf(p) * (u(i, j, k) * u(i, j, k))).norm();
            return (1.0 + pw(w2q, 2.0 * s)) * pw(w2q, 2.0 * s + 2.0) * zc * zc;
        });
        rep.rhs_data = supw2 * (term_hess + term_grad) + term_data;
    } else if (id == "iterate1" || id == "Kug3") {
        if (std::isnan(s) || s < 0.0) throw std::domain_error("audit " + id + ": s >= 0 required");
        const Cutoff z = make_cutoff();
        auto zint = [&](double t_lo, auto&& cell) {
            return ctx.time_integral(t_lo, [&](std::size_t sn) {
                const double t = ctx.traj().times[sn];
                return ctx.space_int([&](int i, int j, int k) {
                    return cell(sn, i, j, k, grid.center(i, j, k), t);
                });
            });
        };
        const double int_K_h2_g2s_z2 =
            zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                const double zc = z.zeta(p, t);
                return ctx.K(sn)(i, j, k) * ctx.hess2(sn)(i, j, k) *
                       pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s) * zc * zc;
            });
        if (id == "iterate1") {
            const double sup_g = ctx.sup_over(0.0, [&](std::size_t sn) {
                const double t = ctx.traj().times[sn];
                return ctx.space_int([&](int i, int j, int k) {
                    const double zc = z.zeta(grid.center(i, j, k), t);
                    return pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s + 2.0) * zc * zc;
                });
            });
            rep.lhs = std::max(phi * sup_g,
                               (s + 1.0) * ctx.kc().c8 / (chi1 * chi1) * int_K_h2_g2s_z2);
            const double i0_a =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    const double zc = z.zeta(p, t);
                    const double uv = ctx.traj().snapshots[sn](i, j, k);
                    return ctx.K(sn)(i, j, k) * pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s) *
                           pw(uv, 4.0) * zc * zc;
                });
            const double i0_b =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    const double zc = z.zeta(p, t);
                    const double uv = ctx.traj().snapshots[sn](i, j, k);
                    return ctx.K(sn)(i, j, k) * pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s + 2.0) *
                           (MZ * MZ * uv * uv * zc * zc + z.grad_zeta(p, t).norm2());
                });
            const double i0_c =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    return pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s + 2.0) * z.zeta(p, t) *
                           std::abs(z.zeta_t(p, t));
                });
            rep.rhs_data = phi * ctx.D_of(s, z) + muZ * muZ * pw(1.0 + chi1, 2.0 * (1.0 + a)) * i0_a +
                           pw(1.0 + chi1, 2.0 * (1.0 + a)) * i0_b + i0_c;
        } else {  // Kug3
            const double int_K_g2s4_z2 =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    const double zc = z.zeta(p, t);
                    return ctx.K(sn)(i, j, k) * pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s + 4.0) *
                           zc * zc;
                });
            rep.lhs = int_K_g2s4_z2 + M * M * int_K_h2_g2s_z2;
            const double sgn_s = s > 0.0 ? 1.0 : 0.0;
            const double int_K_g2s2_mixed =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    const double zc = z.zeta(p, t);
                    return ctx.K(sn)(i, j, k) * pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s + 2.0) *
                           (zc * zc + z.grad_zeta(p, t).norm2());
                });
            const double int_K_h2_z2 =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    const double zc = z.zeta(p, t);
                    return ctx.K(sn)(i, j, k) * ctx.hess2(sn)(i, j, k) * zc * zc;
                });
            const double int_K_g2s2_zt2 =
                zint(0.0, [&](std::size_t sn, int i, int j, int k, const Vec3& p, double t) {
                    const double zt = z.zeta_t(p, t);
                    return ctx.K(sn)(i, j, k) * pw(ctx.grad(sn)(i, j, k).norm(), 2.0 * s + 2.0) *
                           zt * zt;
                });
            const double i_star = X * X * M * M * phi * ctx.D_of(s, z) +
                                  T * pw(X, 4.0 * (2.0 * s + 3.0)) * pw(M, 6.0) *
                                      pw(M1, 8.0 * s + 6.0) +
                                  pw(X, 2.0 * (4.0 + a)) * M * M * pw(M1, 4.0) * int_K_g2s2_mixed +
                                  sgn_s * M * M * int_K_h2_z2;
            const double j_star = T * pw(X, 4.0 * (1.0 + a)) * pw(M, 4.0) * pw(M1, 4.0 * a) *
                                      pw(z.sup_zeta_t(), 2.0) +
                                  pw(X, 4.0 * (1.0 + a * sgn_s)) * pw(M, 4.0) *
                                      pw(M1, 4.0 * a * sgn_s) * int_K_g2s2_zt2;
            rep.rhs_data = i_star + j_star;
        }
    } else {
        throw std::invalid_argument("unknown estimate id: " + id);
    }

    if (rep.rhs_data > 0.0)
        rep.ratio = rep.lhs / rep.rhs_data;
    else if (rep.lhs == 0.0)
        rep.ratio = 0.0;
    else {
        rep.ratio = std::numeric_limits<double>::infinity();
        rep.notes = "zero data functional with nonzero left side";
    }
    return rep;
}

inline EstimateReport estimate_audit(const Trajectory& traj, const ProblemSpec& spec,
                                     const std::string& id, const AuditParams& params) {
    AuditContext ctx(traj, spec);
    return estimate_audit(ctx, id, params);
}

struct SweepRow {
    std::string id;
    std::vector<double> ratios;  // one per sweep point
    double max_ratio = 0.0;
    double min_ratio = std::numeric_limits<double>::infinity();
    bool all_finite = true;
};

struct SweepSummary {
    std::vector<double> omega_star;
    std::vector<double> coriolis;  // realized R per point
    std::vector<double> M_star;    // realized sup|u| per point
    std::vector<SweepRow> rows;
    bool orderings_ok = true;  // E* <= N0 <= (M+1)^2 N*, E* <= N* <= N2 <= N_s per run
};

/// Runs the solver once per rotation number, Omega = Omega* sqrt(G/r0) and
/// R = 2 rho* Omega / phi adjusted consistently, audits each estimate, and
/// summarizes the ratio spread across the sweep.
inline SweepSummary sweep_report(const ProblemSpec& base, double rho_star,
                                 const std::vector<double>& omega_star_values,
                                 const std::vector<std::string>& ids, double margin,
                                 const StepControls& controls = {}) {
    if (omega_star_values.size() < 2)
        throw std::invalid_argument("sweep: need at least two sweep points");
    base.validate();
    const DerivedEnvBounds base_b = env_bounds(base.env, base.grid);

    SweepSummary summary;
    summary.omega_star = omega_star_values;
    summary.rows.reserve(ids.size());
    for (const auto& id : ids) {
        SweepRow row;
        row.id = id;
        summary.rows.push_back(row);
    }

    const double ord_slack = 1e-12;
    for (double om : omega_star_values) {
        ProblemSpec spec = base;
        spec.env.Omega = om * std::sqrt(base.env.G / base_b.r0);
        spec.env.rot.coriolis = 2.0 * rho_star * spec.env.Omega / spec.env.phi;
        summary.coriolis.push_back(spec.env.rot.coriolis);

        const Trajectory traj = run(spec, controls);
        if (!traj.completed) throw std::runtime_error("sweep: run aborted: " + traj.failure);
        AuditContext ctx(traj, spec);
        summary.M_star.push_back(ctx.eq().M_star);

        const double a = ctx.kc().a;
        for (std::size_t r = 0; r < ids.size(); ++r) {
            AuditParams p = default_params(ids[r], a, spec.T, margin);
            const EstimateReport rep = estimate_audit(ctx, ids[r], p);
            summary.rows[r].ratios.push_back(rep.ratio);
            summary.rows[r].max_ratio = std::max(summary.rows[r].max_ratio, rep.ratio);
            summary.rows[r].min_ratio = std::min(summary.rows[r].min_ratio, rep.ratio);
            if (!std::isfinite(rep.ratio)) summary.rows[r].all_finite = false;
        }

        const auto& eq = ctx.eq();
        const double m1sq = (eq.M_star + 1.0) * (eq.M_star + 1.0);
        const double scale = 1.0 + std::abs(eq.N2);
        if (!(eq.E_star <= eq.N0 + ord_slack * scale) ||
            !(eq.N0 <= m1sq * eq.N_star + ord_slack * scale * m1sq) ||
            !(eq.E_star <= eq.N_star + ord_slack * scale) ||
            !(eq.N_star <= eq.N2 + ord_slack * scale) ||
            !(eq.N2 <= ctx.N_of(3.0) + ord_slack * scale))
            summary.orderings_ok = false;
    }
    return summary;
}

}  // namespace rotforch
