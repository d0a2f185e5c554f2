#include <catch2/catch_amalgamated.hpp>

#include "rotforch/kernel.hpp"
#include "rotforch/kernel_checks.hpp"
#include "rotforch/law.hpp"
#include "support.hpp"

using namespace rotforch;
using Catch::Approx;

namespace {
ForchheimerLaw two_term() { return ForchheimerLaw::make({1.0, 1.0}, {1.0}); }
RotationSpec vertical(double R) { return RotationSpec::make({0.0, 0.0, 1.0}, R); }
}  // namespace

TEST_CASE("g evaluation and derivative") {
    const auto law = two_term();
    CHECK(eval_g(law, 2.0) == Approx(3.0));
    CHECK(eval_g(law, 0.0) == Approx(1.0));  // g(0) = a_0
    CHECK(eval_g(law, 1.0) == Approx(2.0));  // chi_0
    CHECK_THROWS_AS(eval_g(law, -1.0), std::domain_error);

    const auto gd = eval_g_deriv(law, 2.0);
    CHECK(*gd.derivative == Approx(1.0));

    // alpha_1 < 1: derivative at the origin is singular and must be absent.
    const auto rough = ForchheimerLaw::make({1.0, 1.0}, {0.5});
    CHECK_FALSE(eval_g_deriv(rough, 0.0).derivative.has_value());
    CHECK(eval_g_deriv(law, 0.0).derivative.has_value());

    CHECK_THROWS_AS(ForchheimerLaw::make({1.0, 1.0}, {2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ForchheimerLaw::make({0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("rotation matrices") {
    const auto rot = vertical(1.0);
    const auto [J, J2] = rotation_matrices(rot);

    CHECK(J(0, 1) == Approx(-1.0));
    CHECK(J(1, 0) == Approx(1.0));
    CHECK(J(0, 0) == 0.0);
    CHECK(J(2, 2) == 0.0);
    CHECK(J.frobenius2() == Approx(2.0));
    CHECK(J2.frobenius2() == Approx(2.0));

    const Vec3 jx2 = J2 * Vec3{1.0, 0.0, 0.0};
    CHECK(jx2.x == Approx(-1.0));
    CHECK(jx2.y == Approx(0.0).margin(1e-15));
    CHECK(jx2.z == Approx(0.0).margin(1e-15));

    Sampler rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto r = test::random_rotation(rng);
        const auto [Jr, J2r] = rotation_matrices(r);
        CHECK((Jr + Jr.transpose()).frobenius() < 1e-14);
        const Vec3 x = rng.in_ball(5.0);
        CHECK((Jr * x - r.axis.cross(x)).norm() < 1e-13 * (1.0 + x.norm()));
        CHECK(Jr.frobenius2() == Approx(2.0).margin(1e-12));
        CHECK(J2r.frobenius2() == Approx(2.0).margin(1e-12));
    }

    CHECK_THROWS_AS(RotationSpec::make({0.0, 0.0, 2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("F evaluation") {
    const auto law = two_term();
    const auto v1 = eval_F(law, vertical(0.0), {1.0, 0.0, 0.0});
    CHECK(v1.x == Approx(2.0));
    CHECK(v1.y == 0.0);

    const auto v2 = eval_F(law, vertical(1.0), {1.0, 0.0, 0.0});
    CHECK(v2.x == Approx(2.0));
    CHECK(v2.y == Approx(1.0));
    CHECK(v2.z == Approx(0.0).margin(1e-15));

    CHECK(eval_F(law, vertical(3.0), {0.0, 0.0, 0.0}).norm() == 0.0);

    Sampler rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto rlaw = test::random_law(rng);
        const auto rrot = test::random_rotation(rng);
        const Vec3 v = rng.in_ball(50.0);
        const Vec3 fp = eval_F(rlaw, rrot, v);
        const Vec3 fm = eval_F(rlaw, rrot, -v);
        CHECK((fp + fm).norm() < 1e-12 * (1.0 + fp.norm()));
    }

    CHECK_THROWS_AS(eval_F(law, vertical(0.0),
                           Vec3{std::numeric_limits<double>::infinity(), 0.0, 0.0}),
                    std::domain_error);
}

TEST_CASE("analytic Jacobian of F") {
    const auto law = two_term();
    const Mat3 jf = jacobian_F(law, vertical(0.0), {1.0, 0.0, 0.0});
    CHECK(jf(0, 0) == Approx(3.0));
    CHECK(jf(1, 1) == Approx(2.0));
    CHECK(jf(2, 2) == Approx(2.0));
    CHECK(jf(0, 1) == Approx(0.0).margin(1e-15));

    // At the origin: g(0) I + R J.
    const Mat3 j0 = jacobian_F(law, vertical(1.0), {0.0, 0.0, 0.0});
    CHECK(j0(0, 0) == Approx(1.0));
    CHECK(j0(0, 1) == Approx(-1.0));
    CHECK(j0(1, 0) == Approx(1.0));
    CHECK(j0(2, 2) == Approx(1.0));

    SECTION("matches central finite differences") {
        Sampler rng(23);
        for (int i = 0; i < 300; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            Vec3 v = rng.in_ball(20.0);
            // FD is unreliable near the origin when g' blows up there.
            if (rlaw.singular_gradient_at_origin() && v.norm() < 1e-3) v = v + Vec3{0.1, 0.0, 0.0};
            const double err = test::rel_matrix_error(test::fd_jacobian_F(rlaw, rrot, v),
                                                      jacobian_F(rlaw, rrot, v));
            CHECK(err < 1e-6);
        }
    }

    SECTION("quadratic-form lower bound g(|v|)|z|^2") {
        Sampler rng(29);
        for (int i = 0; i < 300; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const Vec3 v = rng.in_ball(10.0);
            const Vec3 z = rng.in_ball(3.0);
            const Mat3 jfv = jacobian_F(rlaw, rrot, v);
            CHECK(z.dot(jfv * z) >= eval_g(rlaw, v.norm()) * z.norm2() - 1e-10);
        }
    }
}

TEST_CASE("kernel inversion") {
    const auto law = two_term();

    SECTION("hand-checked point") {
        // F((1,0,0)) = (2,1,0) for the two-term law with R=1 about e3.
        const Vec3 x = invert_F(law, vertical(1.0), {2.0, 1.0, 0.0});
        CHECK((x - Vec3{1.0, 0.0, 0.0}).norm() < 1e-10);
    }

    SECTION("zero maps to zero exactly") {
        const Vec3 x = invert_F(law, vertical(2.0), {0.0, 0.0, 0.0});
        CHECK(x.x == 0.0);
        CHECK(x.y == 0.0);
        CHECK(x.z == 0.0);
    }

    SECTION("oddness and residual contract") {
        Sampler rng(31);
        const ToleranceSpec tol{};
        for (int i = 0; i < 300; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const Vec3 y = rng.in_ball(1000.0);
            const Vec3 xp = invert_F(rlaw, rrot, y, tol);
            const Vec3 xm = invert_F(rlaw, rrot, -y, tol);
            CHECK((eval_F(rlaw, rrot, xp) - y).norm() <= tol.threshold(y.norm()) * 1.000001);
            CHECK((xp + xm).norm() < 1e-9 * (1.0 + xp.norm()));
        }
    }

    SECTION("adversarial initial guesses still converge") {
        Sampler rng(47);
        const ToleranceSpec tol{};
        const Vec3 bad[] = {{1e8, -1e8, 1e8}, {-1e3, 0, 0}, {1e-9, 1e-9, -1e-9}};
        for (int i = 0; i < 50; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const Vec3 y = rng.in_ball(100.0);
            for (const Vec3& guess : bad) {
                const Vec3 x = invert_F(rlaw, rrot, y, tol, nullptr, &guess);
                CHECK((eval_F(rlaw, rrot, x) - y).norm() <= tol.threshold(y.norm()) * 1.000001);
            }
        }
    }

    SECTION("roundtrip through F") {
        Sampler rng(37);
        InvertStats stats;
        for (int i = 0; i < 500; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const Vec3 v = rng.in_ball(1000.0);
            const Vec3 y = eval_F(rlaw, rrot, v);
            const Vec3 back = invert_F(rlaw, rrot, y, {}, &stats);
            CHECK((back - v).norm() <= 1e-9 * std::max(1.0, v.norm()));
        }
    }

    SECTION("monotonicity, explicit part") {
        Sampler rng(41);
        for (int i = 0; i < 500; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const Vec3 v = rng.in_ball(100.0), w = rng.in_ball(100.0);
            const Vec3 d = v - w;
            const double lhs = (eval_F(rlaw, rrot, v) - eval_F(rlaw, rrot, w)).dot(d);
            CHECK(lhs >= rlaw.a0() * d.norm2() - 1e-12);
        }
    }
}

TEST_CASE("Jacobian of the inverse map") {
    const auto law = two_term();

    const Mat3 x0 = jacobian_X(law, vertical(0.0), {0.0, 0.0, 0.0});
    CHECK(test::rel_matrix_error(x0, Mat3::identity()) < 1e-12);

    const Mat3 x1 = jacobian_X(law, vertical(0.0), {2.0, 0.0, 0.0});
    CHECK(x1(0, 0) == Approx(1.0 / 3.0));
    CHECK(x1(1, 1) == Approx(0.5));
    CHECK(x1(2, 2) == Approx(0.5));

    SECTION("X'(y) inverts F' at the matched point") {
        Sampler rng(43);
        for (int i = 0; i < 200; ++i) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const Vec3 y = rng.in_ball(100.0);
            const Vec3 v = invert_F(rlaw, rrot, y);
            const Mat3 prod = jacobian_F(rlaw, rrot, v) * jacobian_X(rlaw, rrot, y);
            CHECK(test::rel_matrix_error(prod, Mat3::identity()) < 1e-10);
        }
    }
}

TEST_CASE("kernel constants") {
    const auto law = two_term();
    const auto k0 = kernel_constants(law, vertical(0.0));
    CHECK(k0.a == Approx(0.5));
    CHECK(k0.chi0 == Approx(2.0));
    CHECK(k0.c1 == Approx(1.0));
    CHECK(k0.c2 == Approx(std::sqrt(2.0)));
    CHECK(k0.c3 == Approx(1.0));
    CHECK(k0.c4 == Approx(std::pow(0.5, 1.5)));
    CHECK(k0.c5 == Approx(0.25));
    CHECK(k0.c6 == Approx(std::sqrt(3.0) * std::sqrt(0.5) / 3.0));
    CHECK(k0.c7 == Approx(2.0 * std::sqrt(3.0)));
    CHECK(k0.c8 == Approx(std::pow(0.5, 1.5) / 9.0));
    CHECK(k0.c9 == Approx(std::sqrt(3.0) / 3.0));
    CHECK(k0.c_star == Approx(std::sqrt(3.0)));

    const auto k3 = kernel_constants(law, vertical(3.0));
    CHECK(k3.chi1 == Approx(5.0));
}

TEST_CASE("kernel bound sweep") {
    const auto law = two_term();

    SECTION("clean with rotation") {
        const auto report = verify_kernel_bounds(law, vertical(1.0), 2000, 1000.0, 0);
        INFO("worst slack " << report.worst_slack);
        CHECK(report.violations.empty());
    }

    SECTION("clean without rotation") {
        const auto report = verify_kernel_bounds(law, vertical(0.0), 2000, 1000.0, 1);
        CHECK(report.violations.empty());
    }

    SECTION("mutated constant is caught") {
        // With a strong rotation the lower norm bound is tight near the
        // origin perpendicular to the axis; doubling c1 must trip it there.
        auto kc = kernel_constants(law, vertical(3.0));
        kc.c1 *= 2.0;
        const auto report = verify_kernel_bounds(law, vertical(3.0), 2000, 1000.0, 0, kc);
        CHECK(report.violations.size() > 0);
    }

    SECTION("random configurations stay clean") {
        Sampler rng(53);
        for (int c = 0; c < 5; ++c) {
            const auto rlaw = test::random_law(rng);
            const auto rrot = test::random_rotation(rng);
            const auto report = verify_kernel_bounds(rlaw, rrot, 500, 1000.0, 100 + c);
            INFO("config " << c << " worst slack " << report.worst_slack);
            CHECK(report.violations.empty());
        }
    }
}
