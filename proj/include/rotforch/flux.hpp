#pragma once

#include <array>
#include <vector>

#include "rotforch/operators.hpp"
#include "rotforch/problem.hpp"
#include "rotforch/weight.hpp"

namespace rotforch {

/// Per-face kernel solutions kept across steps; warm-starting Newton from the
/// previous step's root cuts the dominant cost of a time step roughly in half.
struct FaceVecCache {
    std::array<std::vector<Vec3>, 3> comp;
    bool valid = false;

    void ensure(const Grid& g) {
        for (int d = 0; d < 3; ++d)
            if (comp[d].size() != FaceField::face_count(g, d)) {
                comp[d].assign(FaceField::face_count(g, d), Vec3{});
                valid = false;
            }
    }
};

struct FluxStats {
    double max_residual = 0.0;
    long solves = 0;
};

struct FluxResult {
    FaceField q;        // normal component of X(Phi_face) per face
    VecField momentum;  // cell-centered rho v = -X(Phi), when requested
    FluxStats stats;
};

/// Face flux assembly. Interior faces combine the two-point normal
/// difference, arithmetically averaged tangential cell gradients, and the
/// squared face-mean of u times Z at the face center. Boundary faces are
/// ghost-free: the Dirichlet trace Psi supplies the face value, the normal
/// difference (one-sided, second order, through the trace), and the
/// tangential derivatives (differenced along the face).
inline FluxResult flux(const ProblemSpec& spec, const ScalarField& u, double t,
                       bool with_momentum = true, FaceVecCache* warm = nullptr) {
    const Grid& g = spec.grid;
    if (!u.grid.same_as(g)) throw std::invalid_argument("flux: field shape mismatch");
    const FrozenZ z = freeze_Z(spec.env, t);
    const VecField gc = gradient(u);
    const ToleranceSpec tol{};

    FluxResult out;
    out.q = FaceField(g);
    if (warm) warm->ensure(g);

    InvertStats ist;
    for (int d = 0; d < 3; ++d) {
        const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
        std::array<int, 3> hi = {g.n[0], g.n[1], g.n[2]};
        hi[d] += 1;
        std::array<int, 3> c{};
        for (c[2] = 0; c[2] < hi[2]; ++c[2])
            for (c[1] = 0; c[1] < hi[1]; ++c[1])
                for (c[0] = 0; c[0] < hi[0]; ++c[0]) {
                    const int f = c[d];
                    Vec3 xf;
                    for (int e = 0; e < 3; ++e)
                        xf[e] = (e == d) ? g.lo[e] + f * g.dx[e] : g.lo[e] + (c[e] + 0.5) * g.dx[e];

                    std::array<int, 3> cm = c, cp = c;
                    cm[d] -= 1;
                    Vec3 phi;
                    double uf;
                    if (f == 0 || f == g.n[d]) {
                        const double psi_f = spec.psi.value(xf, t);
                        std::array<int, 3> c0 = c, c1 = c;
                        double sign;
                        if (f == 0) {
                            c1[d] = 1;
                            sign = 1.0;
                        } else {
                            c0[d] = g.n[d] - 1;
                            c1[d] = g.n[d] - 2;
                            sign = -1.0;
                        }
                        // d/dn from the trace and the two nearest cells
                        // (centers at h/2 and 3h/2 off the face).
                        const double u0 = u(c0[0], c0[1], c0[2]);
                        const double u1 = u(c1[0], c1[1], c1[2]);
                        phi[d] = sign * (9.0 * (u0 - psi_f) - (u1 - psi_f)) / (3.0 * g.dx[d]);
                        // Tangential derivatives of the trace along the face.
                        for (int e : {t1, t2}) {
                            const auto row = [&](int q) {
                                Vec3 p = xf;
                                p[e] = g.lo[e] + (q + 0.5) * g.dx[e];
                                return spec.psi.value(p, t);
                            };
                            phi[e] = detail::d1(row, c[e], g.n[e], g.dx[e]);
                        }
                        uf = psi_f;  // the trace is the exact face value
                    } else {
                        const double um = u(cm[0], cm[1], cm[2]);
                        const double up = u(cp[0], cp[1], cp[2]);
                        phi[d] = (up - um) / g.dx[d];
                        const Vec3& grm = gc(cm[0], cm[1], cm[2]);
                        const Vec3& grp = gc(cp[0], cp[1], cp[2]);
                        phi[t1] = 0.5 * (grm[t1] + grp[t1]);
                        phi[t2] = 0.5 * (grm[t2] + grp[t2]);
                        uf = 0.5 * (um + up);
                    }
                    phi += z(xf) * (uf * uf);

                    const std::size_t fi = out.q.fidx(d, c[0], c[1], c[2]);
                    const Vec3* guess =
                        (warm && warm->valid) ? &warm->comp[d][fi] : nullptr;
                    const Vec3 v = invert_F(spec.law, spec.env.rot, phi, tol, &ist, guess);
                    out.q.comp[d][fi] = v[d];
                    if (warm) warm->comp[d][fi] = v;
                    ++out.stats.solves;
                    if (ist.residual > out.stats.max_residual)
                        out.stats.max_residual = ist.residual;
                }
    }
    if (warm) warm->valid = true;

    if (with_momentum) {
        out.momentum = VecField(g);
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    const double uc = u(i, j, k);
                    const Vec3 phi = gc(i, j, k) + z(g.center(i, j, k)) * (uc * uc);
                    out.momentum(i, j, k) = -invert_F(spec.law, spec.env.rot, phi, tol);
                }
    }
    return out;
}

/// v = momentum / (kappa u), zeroed where the density kappa*u vanishes.
inline VecField velocity_from_momentum(const VecField& momentum, const ScalarField& u,
                                       double kappa, double eps_vel = 1e-12) {
    VecField v(momentum.grid);
    for (std::size_t c = 0; c < v.data.size(); ++c) {
        const double rho = kappa * u.data[c];
        v.data[c] = (std::abs(rho) > eps_vel) ? momentum.data[c] / rho : Vec3{0, 0, 0};
    }
    return v;
}

}  // namespace rotforch
