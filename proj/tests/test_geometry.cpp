#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fieldroad/geometry.hpp"

using namespace fieldroad;

TEST_CASE("half_angle formula") {
    CHECK(half_angle(0.0) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(half_angle(1.0) == doctest::Approx(M_PI / 4).epsilon(1e-15));
    CHECK(half_angle(-1.0) == doctest::Approx(3 * M_PI / 4).epsilon(1e-15));
    for (double a : {0.3, 1.0, 2.5, 7.0})
        CHECK(half_angle(a) + half_angle(-a) == doctest::Approx(M_PI).epsilon(1e-14));
}

TEST_CASE("exact cone blend coefficients solve the C^2 matching system") {
    // Oracle: p(s) = c2 s^2 + c4 s^4 + c6 s^6 with p(1)=1, p'(1)=1, p''(1)=0.
    const double c2 = 15.0 / 8.0, c4 = -5.0 / 4.0, c6 = 3.0 / 8.0;
    CHECK(c2 + c4 + c6 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(2 * c2 + 4 * c4 + 6 * c6 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(2 * c2 + 12 * c4 + 30 * c6 == doctest::Approx(0.0).epsilon(1e-15));
    // p' > 0 on (0, 1]
    for (int i = 1; i <= 1000; ++i) {
        const double s = i / 1000.0;
        CHECK((2 * c2 + 4 * c4 * s * s + 6 * c6 * s * s * s * s) * s > 0.0);
    }

    auto g = exact_cone(1.0);
    CHECK(g.rho(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.drho(0.0) == 0.0);
    // C^2 matching across |x| = 1
    CHECK(g.rho(1.0 - 1e-9) == doctest::Approx(g.rho(1.0 + 1e-9)).epsilon(1e-8));
    CHECK(g.drho(1.0 - 1e-9) == doctest::Approx(g.drho(1.0 + 1e-9)).epsilon(1e-7));
    CHECK(std::fabs((g.ddrho(1.0 - 1e-6)) - (0.0)) <= 1e-4);
}

TEST_CASE("hyperbola family") {
    auto g = hyperbola(1.0);
    CHECK(g.rho(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // algebraic identity sqrt(1+x^2) - x = 1/(sqrt(1+x^2)+x)
    const double x = 1000.0;
    const double expect = 1.0 / (std::sqrt(1.0 + x * x) + x);
    CHECK(g.rho(x) - x == doctest::Approx(expect).epsilon(1e-9));

    auto g0 = hyperbola(0.0);
    for (double xx : {-5.0, 0.0, 17.0}) CHECK(g0.rho(xx) == 0.0);
}

TEST_CASE("Hypothesis-1 decay for the built-in families") {
    for (auto g : {exact_cone(0.0), exact_cone(1.0), hyperbola(1.0), hyperbola(-0.5), bump_road()}) {
        CHECK_NOTHROW(g.validate());
        CHECK(std::fabs(g.drho(1e3) - g.a) <= 1e-3);
        CHECK(std::fabs(g.drho(-1e3) + g.a) <= 1e-3);
        CHECK(std::fabs(g.ddrho(1e3)) <= 1e-3);
        CHECK(g.even());
    }
}

TEST_CASE("polar orientation: x = r sin(theta), y = r cos(theta)") {
    auto [r1, t1] = polar(0.0, 1.0);
    CHECK(r1 == doctest::Approx(1.0));
    CHECK(t1 == doctest::Approx(0.0));
    auto [r2, t2] = polar(1.0, 0.0);
    CHECK(r2 == doctest::Approx(1.0));
    CHECK(t2 == doctest::Approx(M_PI / 2));
    auto [r3, t3] = polar(1.0, 1.0);
    CHECK(r3 == doctest::Approx(std::sqrt(2.0)));
    CHECK(t3 == doctest::Approx(M_PI / 4));
    CHECK_THROWS_AS(polar(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("metric: unit determinant, tau, and the boundary trace limit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-50.0, 50.0);
    for (auto g : {exact_cone(1.0), hyperbola(1.0), hyperbola(-2.0), bump_road()}) {
        auto m = metric(g);
        for (int i = 0; i < 200; ++i) {
            const double x = ux(rng);
            CHECK(std::fabs(m.A(x).det() - 1.0) <= 1e-14);
            CHECK(m.tau(x) >= 1.0);
            // symmetric positive definite: diagonal positive and det = 1 > 0
            CHECK(m.A(x).a11 > 0.0);
            CHECK(m.A(x).a12 == m.A(x).a21);
        }
    }

    auto flat = metric(hyperbola(0.0));
    for (double x : {-3.0, 0.0, 9.0}) {
        CHECK(flat.A(x).a11 == 1.0);
        CHECK(flat.A(x).a12 == 0.0);
        CHECK(flat.A(x).a22 == 1.0);
    }

    auto m1 = metric(hyperbola(1.0));
    CHECK(m1.tau(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m1.tau(1e4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
    // theta~(x) -> theta0
    CHECK(std::fabs(m1.thetatilde(1e4) - half_angle(1.0)) <= 1e-3);
    CHECK(std::fabs(m1.thetatilde(-1e4) + half_angle(1.0)) <= 1e-3);
}

TEST_CASE("custom geometry from a sampled table reproduces the hyperbola") {
    std::vector<double> xs, rs;
    auto g = hyperbola(1.0);
    for (int i = -1000; i <= 1000; ++i) {
        xs.push_back(i * 0.1);
        rs.push_back(g.rho(i * 0.1));
    }
    auto t = custom_from_table(1.0, xs, rs);
    for (double x : {-37.1, -2.3, 0.6, 55.5}) {
        CHECK(t.rho(x) == doctest::Approx(g.rho(x)).epsilon(1e-4));
        CHECK(std::fabs((t.drho(x)) - (g.drho(x))) <= 2e-2);
    }
    CHECK_THROWS_AS(custom_from_table(1.0, {0.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
}
