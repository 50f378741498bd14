#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fieldroad/model.hpp"

using namespace fieldroad;

TEST_CASE("logistic reaction values") {
    auto f = logistic_reaction();
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f(1.5) == 0.0);  // extended by zero past 1
    CHECK(f(1.0) == 0.0);
    CHECK(f.fprime0 == 1.0);
}

TEST_CASE("logistic passes kpp_check at several sample counts") {
    auto f = logistic_reaction();
    for (int n : {2, 10, 1000, 4096}) {
        auto rep = kpp_check(f.fn, n);
        CHECK(rep.ok);
    }
}

TEST_CASE("v^2 fails the endpoint check at v=1") {
    auto rep = kpp_check([](double v) { return v * v; }, 1000);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failure == KppReport::Failure::endpoint_one);
    CHECK(rep.v == 1.0);
}

TEST_CASE("sin(pi v) is KPP: the ratio sin(pi v)/v is nonincreasing on the grid") {
    // Oracle: scan the ratio over the same grid the checker uses and record
    // the first increase, if any.
    const int n = 1000;
    auto f = [](double v) { return std::sin(M_PI * v); };
    bool increase = false;
    double prev = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double v = static_cast<double>(k) / n;
        const double ratio = f(v) / v;
        if (k > 1 && ratio > prev + 1e-12) increase = true;
        prev = ratio;
    }
    CHECK_FALSE(increase);
    auto rep = kpp_check(f, n);
    CHECK(rep.ok);
}

TEST_CASE("a genuinely non-monotone ratio is caught with the first violating sample") {
    // f(v)/v = 1 + sin(4 pi v)/4 oscillates; the checker must report the first
    // sample where the ratio increases.
    auto f = [](double v) { return v * (1.0 + 0.25 * std::sin(4.0 * M_PI * v)) * (1.0 - v) * 4.0; };
    // endpooints: f(0)=0, f(1)=0, positive inside; ratio 4(1+sin/4)(1-v) is not monotone
    auto rep = kpp_check(f, 1000);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failure == KppReport::Failure::ratio_increase);
    // cross-check against a direct scan
    double prev = 0.0;
    double first = -1.0;
    for (int k = 1; k <= 1000; ++k) {
        const double v = k / 1000.0;
        const double ratio = f(v) / v;
        if (k > 1 && ratio > prev + 1e-12 && first < 0.0) first = v;
        prev = ratio;
    }
    CHECK(rep.v == doctest::Approx(first).epsilon(1e-15));
}

TEST_CASE("non-finite evaluations are a distinct failure kind") {
    auto f = [](double v) { return v > 0.5 ? std::numeric_limits<double>::quiet_NaN()
                                           : v * (1.0 - v); };
    auto rep = kpp_check(f, 100);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failure == KppReport::Failure::not_finite);
}

TEST_CASE("kpp bound f(v) <= fprime0 v on sampled (0,1]") {
    auto p = make_params(1.0, 4.0, 1.0, 1.0);
    for (int k = 1; k <= 1000; ++k) {
        const double v = k / 1000.0;
        CHECK(p.f(v) <= p.fprime0 * v + 1e-12);
    }
}

TEST_CASE("params validation") {
    CHECK_THROWS_WITH_AS(make_params(-1.0, 1.0, 1.0, 1.0), doctest::Contains("d"),
                         std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, 0.0, 1.0, 1.0), std::invalid_argument);

    // fprime0 mismatch guard
    ReactionRule bad = logistic_reaction();
    bad.fprime0 = 2.0;
    bad.kind = ReactionRule::Kind::custom;
    CHECK_THROWS_AS(make_params(1.0, 1.0, 1.0, 1.0, bad), std::invalid_argument);

    auto p = make_params(1.0, 4.0, 1.0, 1.0);
    CHECK(p.delta == doctest::Approx(0.05));
    p.delta = p.fprime0;  // must be < fprime0
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("kpp_check requires at least 2 samples") {
    CHECK_THROWS_AS(kpp_check([](double v) { return v * (1 - v); }, 1), std::invalid_argument);
}
