#include <catch2/catch_amalgamated.hpp>

#include "rotforch/environment.hpp"
#include "rotforch/grid.hpp"
#include "rotforch/operators.hpp"
#include "rotforch/weight.hpp"
#include "support.hpp"

using namespace rotforch;
using Catch::Approx;

namespace {

Grid unit_grid(int n) { return Grid::make({0, 0, 0}, {1, 1, 1}, {n, n, n}); }

/// Random smooth trigonometric field on the unit box.
ScalarField random_smooth_scalar(const Grid& g, Sampler& rng, double amp = 1.0) {
    struct Mode {
        double ax, ay, az, c;
    };
    std::vector<Mode> modes;
    for (int m = 0; m < 3; ++m)
        modes.push_back({rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0),
                         rng.uniform(-amp, amp)});
    return ScalarField::from_function(g, [modes](const Vec3& p) {
        double v = 0.0;
        for (const auto& m : modes) v += m.c * std::sin(m.ax * p.x + 0.3) * std::cos(m.ay * p.y) * std::sin(m.az * p.z + 0.7);
        return v;
    });
}

VecField random_smooth_vector(const Grid& g, Sampler& rng, double amp = 1.0) {
    VecField out(g);
    ScalarField a = random_smooth_scalar(g, rng, amp);
    ScalarField b = random_smooth_scalar(g, rng, amp);
    ScalarField c = random_smooth_scalar(g, rng, amp);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = {a.data[i], b.data[i], c.data[i]};
    return out;
}

}  // namespace

TEST_CASE("grid construction") {
    CHECK_THROWS_AS(Grid::make({0, 0, 0}, {1, 1, 1}, {3, 8, 8}), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make({0, 0, 0}, {0, 1, 1}, {8, 8, 8}), std::invalid_argument);
    const Grid g = unit_grid(8);
    CHECK(g.dx.x == Approx(0.125));
    CHECK(g.cells() == 512);
    const Vec3 c = g.center(0, 0, 0);
    CHECK(c.x == Approx(0.0625));
    // Cell centers strictly interior.
    CHECK(c.x > g.lo.x);
    CHECK(g.center(7, 7, 7).x < g.hi.x);
}

TEST_CASE("nondimensionalization") {
    PhysicalParams p;
    p.kappa = 1.0;
    p.phi_tilde = 0.5;
    p.G_tilde = 10.0;
    p.Omega_tilde = 2.0;
    p.rho_star = 1.0;
    const auto e1 = nondimensionalize(p, {0, 0, 1});
    CHECK(e1.phi == Approx(0.5));
    CHECK(e1.G == Approx(10.0));
    CHECK(e1.Omega == Approx(2.0));

    p.kappa = 0.1;
    const auto e2 = nondimensionalize(p, {0, 0, 1});
    CHECK(e2.phi == Approx(0.05));
    CHECK(e2.G == Approx(0.1));
    CHECK(e2.Omega == Approx(0.2));
    CHECK(e2.rot.coriolis == Approx(8.0));

    p.Omega_tilde = 0.0;
    CHECK(nondimensionalize(p, {0, 0, 1}).rot.coriolis == 0.0);

    p.phi_tilde = 1.5;
    CHECK_THROWS_AS(nondimensionalize(p, {0, 0, 1}), std::invalid_argument);
}

TEST_CASE("gravity direction") {
    EnvironmentParams env;
    env.rot = RotationSpec::make({0, 0, 1}, 0.0);

    env.theta = 0.0;
    for (double t : {0.0, 0.7, 13.0}) {
        const Vec3 e = eval_e0(env, t);
        CHECK(e.z == Approx(1.0));
        CHECK(std::abs(e.x) < 1e-15);
    }

    env.theta = 1.5707963267948966;
    env.omega0 = 0.0;
    env.Omega = 2.0;
    const Vec3 e = eval_e0(env, 0.0);
    CHECK(e.x == Approx(-1.0));
    CHECK(e.y == Approx(0.0).margin(1e-15));

    Sampler rng(3);
    for (int i = 0; i < 100; ++i) {
        env.theta = rng.uniform(0.0, 3.14159265358979);
        env.omega0 = rng.uniform(-3.0, 3.0);
        CHECK(std::abs(eval_e0(env, rng.uniform(0.0, 10.0)).norm() - 1.0) < 1e-15);
    }
}

TEST_CASE("forcing field Z") {
    EnvironmentParams env;
    env.G = 2.0;
    env.Omega = 0.0;
    env.theta = 0.3;
    env.rot = RotationSpec::make({0, 0, 1}, 0.0);

    const Vec3 x{0.4, 0.2, 0.9};
    const Vec3 z0 = eval_Z(env, x, 1.3);
    CHECK((z0 + eval_e0(env, 1.3) * env.G).norm() < 1e-15);

    // Rotation term isolated in the small-G limit: Omega=1, vertical axis.
    env.G = 1e-12;
    env.Omega = 1.0;
    const Vec3 z1 = eval_Z(env, {1, 0, 0}, 0.0);
    CHECK(z1.x == Approx(-1.0).margin(1e-11));
    CHECK(z1.y == Approx(0.0).margin(1e-11));
    CHECK(z1.z == Approx(0.0).margin(1e-11));
    env.G = 2.0;

    // The dedicated flag zeroes the whole forcing field.
    env.forcing_on = false;
    CHECK(eval_Z(env, {1, 0, 0}, 0.0).norm() == 0.0);
    env.forcing_on = true;

    // Triangle bound over the domain.
    env.forcing_on = true;
    env.Omega = 1.7;
    const Grid g = unit_grid(8);
    const auto b = env_bounds(env, g);
    Sampler rng(5);
    for (int i = 0; i < 200; ++i) {
        const Vec3 p{rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
        const double zn = eval_Z(env, p, rng.uniform(0, 5)).norm();
        CHECK(zn <= env.G + env.Omega * env.Omega * b.r0 + 1e-12);
    }
}

TEST_CASE("forcing field derivative identity") {
    // DZ = Omega^2 J^2 exactly, so |DZ| = sqrt(2) Omega^2; check by
    // differencing Z, which is affine in x.
    EnvironmentParams env;
    env.G = 1.3;
    env.Omega = 0.8;
    env.theta = 0.4;
    env.rot = RotationSpec::make({0.48, -0.6, 0.64}, 0.2);
    const Mat3 expected = env.rot.J2() * (env.Omega * env.Omega);
    Mat3 dz;
    const Vec3 x0{0.3, 0.5, 0.7};
    const double h = 0.25;
    for (int c = 0; c < 3; ++c) {
        Vec3 xp = x0, xm = x0;
        xp[c] += h;
        xm[c] -= h;
        const Vec3 col = (eval_Z(env, xp, 0.6) - eval_Z(env, xm, 0.6)) / (2.0 * h);
        for (int r = 0; r < 3; ++r) dz(r, c) = col[r];
    }
    CHECK((dz - expected).frobenius() < 1e-13);
    CHECK(dz.frobenius() == Approx(std::sqrt(2.0) * env.Omega * env.Omega).margin(1e-12));
}

TEST_CASE("derived environment bounds") {
    EnvironmentParams env;
    env.G = 1.0;
    env.Omega = 0.5;
    const Grid g = unit_grid(8);

    SECTION("vanishing gravitational constant is rejected") {
        EnvironmentParams bad = env;
        bad.rot = RotationSpec::make({0, 0, 1}, 0.0);
        bad.G = 0.0;
        CHECK_THROWS_AS(env_bounds(bad, g), std::invalid_argument);
    }

    env.rot = RotationSpec::make({1, 0, 0}, 0.3);
    const auto bg = env_bounds(env, g);
    CHECK(bg.r0 == Approx(std::sqrt(3.0)));

    env.rot = RotationSpec::make({0, 0, 1}, 0.3);
    const auto bv = env_bounds(env, g);
    CHECK(bv.r0 == Approx(std::sqrt(2.0)));  // planar radius for vertical axis

    env.Omega = 0.0;
    env.rot = RotationSpec::make({0, 0, 1}, 0.0);
    const auto b0 = env_bounds(env, g);
    CHECK(b0.Omega_star == 0.0);
    CHECK(b0.chi_star == Approx(std::max(1.0, b0.d_star)));

    // chi* dominates R, sup|Z| and |DZ|; mu_Z is exact.
    Sampler rng(7);
    for (int i = 0; i < 50; ++i) {
        env.Omega = rng.uniform(0.0, 3.0);
        env.G = rng.uniform(0.1, 4.0);
        const double rho_star = rng.uniform(0.0, 2.0);
        env.phi = rng.uniform(0.2, 2.0);
        env.rot = RotationSpec::make(rng.unit_vector(), 2.0 * rho_star * env.Omega / env.phi);
        const auto b = env_bounds(env, g);
        CHECK(b.chi_star >= 1.0);
        CHECK(b.mu_Z == Approx(std::sqrt(2.0) * env.Omega * env.Omega));
        CHECK(b.M_Z <= b.chi_star * b.chi_star + 1e-12);
        CHECK(b.mu_Z <= b.chi_star * b.chi_star + 1e-12);
        CHECK(env.rot.coriolis <= b.chi_star + 1e-12);
        // The closed-form bound really dominates the pointwise field.
        const double mz_samp = eval_Z(env, {1, 1, 1}, 0.3).norm();
        CHECK(mz_samp <= b.M_Z + 1e-12);
    }
}

TEST_CASE("discrete operators") {
    const Grid g = unit_grid(8);

    SECTION("gradient exact on linears everywhere") {
        const auto u = ScalarField::from_function(g, [](const Vec3& p) { return 2.0 * p.x - 0.5 * p.y + 3.0; });
        const VecField gr = gradient(u);
        for (const Vec3& v : gr.data) {
            CHECK(v.x == Approx(2.0).margin(1e-12));
            CHECK(v.y == Approx(-0.5).margin(1e-12));
            CHECK(v.z == Approx(0.0).margin(1e-12));
        }
    }

    SECTION("divergence annihilates constant fluxes") {
        FaceField q(g);
        for (int d = 0; d < 3; ++d)
            for (auto& v : q.comp[d]) v = 4.2;
        const ScalarField div = divergence(q);
        for (double v : div.data) CHECK(v == Approx(0.0).margin(1e-12));
    }

    SECTION("laplacian of x^2 is 2 at interior cells") {
        const auto u = ScalarField::from_function(g, [](const Vec3& p) { return p.x * p.x; });
        const ScalarField lap = divergence(face_normal_difference(u));
        for (int k = 0; k < 8; ++k)
            for (int j = 0; j < 8; ++j)
                for (int i = 1; i < 7; ++i) CHECK(lap(i, j, k) == Approx(2.0).margin(1e-12));
    }

    SECTION("summation by parts is exact") {
        Sampler rng(11);
        const auto u = random_smooth_scalar(g, rng);
        FaceField q(g);
        // Random interior-face flux, zero on boundary faces.
        for (int k = 0; k < 8; ++k)
            for (int j = 0; j < 8; ++j)
                for (int i = 1; i < 8; ++i) q.at(0, i, j, k) = rng.uniform(-1, 1);
        for (int k = 0; k < 8; ++k)
            for (int j = 1; j < 8; ++j)
                for (int i = 0; i < 8; ++i) q.at(1, i, j, k) = rng.uniform(-1, 1);
        for (int k = 1; k < 8; ++k)
            for (int j = 0; j < 8; ++j)
                for (int i = 0; i < 8; ++i) q.at(2, i, j, k) = rng.uniform(-1, 1);

        const FaceField fg = face_normal_difference(u);
        const ScalarField div = divergence(q);
        NeumaierSum lhs;
        for (int d = 0; d < 3; ++d)
            for (std::size_t c = 0; c < q.comp[d].size(); ++c) lhs.add(q.comp[d][c] * fg.comp[d][c]);
        NeumaierSum rhs;
        for (std::size_t c = 0; c < div.data.size(); ++c) rhs.add(div.data[c] * u.data[c]);
        const double pair_q_grad = lhs.value() * g.cell_volume();
        const double pair_div_u = rhs.value() * g.cell_volume();
        CHECK(pair_q_grad == Approx(-pair_div_u).epsilon(1e-12).margin(1e-13));
    }

    SECTION("hessian of a quadratic") {
        const auto u = ScalarField::from_function(
            g, [](const Vec3& p) { return p.x * p.x + 3.0 * p.x * p.y + 0.5 * p.z * p.z; });
        // |D^2u|^2 = dxx^2 + dzz^2 + 2 dxy^2 = 4 + 1 + 2*9 = 23.
        const ScalarField h2 = hessian_frobenius2(u);
        for (int k = 1; k < 7; ++k)
            for (int j = 1; j < 7; ++j)
                for (int i = 1; i < 7; ++i) CHECK(h2(i, j, k) == Approx(23.0).margin(1e-10));
    }
}

TEST_CASE("degeneracy weight") {
    const Grid g = unit_grid(8);
    EnvironmentParams env;
    env.G = 1.0;
    env.rot = RotationSpec::make({0, 0, 1}, 0.0);
    env.forcing_on = false;  // Z = 0 so Phi = grad u exactly

    SECTION("constant field gives K = 1") {
        const ScalarField u(g, 3.0);
        const ScalarField K = weight_K(env, u, 0.0, 0.5);
        for (double v : K.data) CHECK(v == Approx(1.0).margin(1e-14));
    }

    SECTION("|Phi| = 1 gives 2^{-a}") {
        const auto u = ScalarField::from_function(g, [](const Vec3& p) { return p.x; });
        const ScalarField K = weight_K(env, u, 0.0, 0.5);
        for (double v : K.data) CHECK(v == Approx(std::pow(2.0, -0.5)).margin(1e-12));
    }

    SECTION("range (0,1] with equality only at Phi = 0") {
        env.forcing_on = true;
        Sampler rng(13);
        const auto u = random_smooth_scalar(g, rng);
        const VecField phi = phi_field(env, u, 0.4);
        const ScalarField K = weight_K(env, u, 0.4, 0.5);
        for (std::size_t c = 0; c < K.data.size(); ++c) {
            CHECK(K.data[c] > 0.0);
            CHECK(K.data[c] <= 1.0);
            if (phi.data[c].norm() > 1e-12) CHECK(K.data[c] < 1.0);
        }
    }
}

TEST_CASE("weight inequalities on random fields") {
    const Grid g = unit_grid(8);
    Sampler rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const ScalarField w = random_smooth_scalar(g, rng, 1.5);
        const VecField Q = random_smooth_vector(g, rng, 2.0);
        const double a = rng.uniform(0.15, 0.85);
        for (double s : {a, 1.0, 2.0}) {
            const BoundReport rep = kug_verify(w, Q, a, s);
            INFO("trial " << trial << " a=" << a << " s=" << s << " worst " << rep.worst_slack);
            CHECK(rep.violations.empty());
        }
    }
    CHECK_THROWS_AS(kug_verify(ScalarField(g, 1.0), VecField(g), 0.5, 0.2), std::invalid_argument);
}
