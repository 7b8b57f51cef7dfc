#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "infoclock/market.hpp"

using namespace infoclock;

namespace {
MarketParams figure_params() { return {0.02, 0.2, 0.08, 0.01, 2.0, 1000.0}; }
}

TEST_CASE("derive_t0 is sigma^2 / sigma0^2") {
    CHECK(derive_t0(figure_params()) == Catch::Approx(4.0).epsilon(1e-14));
    CHECK(derive_t0({0.0, 1.0, 0.0, 1.0, 1.0, 1.0}) == 1.0);
    // hand check: 0.09 / 0.045 = 2
    CHECK(derive_t0({0.0, 0.3, 0.0, 0.045, 1.0, 1.0}) == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("market validation") {
    MarketParams bad = figure_params();
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = figure_params();
    bad.sigma0_sq = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = figure_params();
    bad.T = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("classification of the CRRA regimes") {
    MarketParams p = figure_params(); // t0 = 4, T = 2
    CHECK(classify(p, Crra{2.0}).well_posed);
    CHECK(classify(p, Crra{0.5}).well_posed); // t0/T = 2 > (1-g)/g = 1
    CHECK(classify(p, Cara{0.001}).well_posed);
    CHECK(classify(p, LogUtility{}).well_posed);

    MarketParams small = p;
    small.sigma0_sq = 0.04; // t0 = 1
    WellPosedness w = classify(small, Crra{0.2}); // 0.5 <= 4
    CHECK_FALSE(w.well_posed);
    CHECK(w.reason.find("t0/T") != std::string::npos);
    CHECK_THROWS_AS(require_well_posed(small, Crra{0.2}), IllPosedProblem);
}

TEST_CASE("the boundary t0/T = (1-gamma)/gamma is ill-posed") {
    // gamma = 0.5 makes the threshold exactly 1; sigma = sigma0 = T = 1 hits it
    MarketParams p{0.0, 1.0, 0.0, 1.0, 1.0, 1.0};
    CHECK_FALSE(classify(p, Crra{0.5}).well_posed);
}

TEST_CASE("classification is monotone in t0") {
    MarketParams p = figure_params();
    p.x0 = 1.0;
    Crra u{0.3};
    bool seen_well_posed = false;
    // scan t0 upward; once well-posed it must stay well-posed
    for (double t0 : {0.5, 1.0, 2.0, 4.0, 5.0, 8.0, 20.0}) {
        p.sigma0_sq = p.sigma * p.sigma / t0;
        bool ok = classify(p, u).well_posed;
        if (seen_well_posed) CHECK(ok);
        seen_well_posed = seen_well_posed || ok;
    }
    CHECK(seen_well_posed);
}

TEST_CASE("utility parameter validation") {
    MarketParams p = figure_params();
    CHECK_THROWS_AS(validate(UtilitySpec{Cara{0.0}}), InvalidParams);
    CHECK_THROWS_AS(validate(UtilitySpec{Crra{-2.0}}), InvalidParams);
    CHECK_THROWS_AS(validate(UtilitySpec{Crra{1.0}}), InvalidParams);

    MarketParams broke = p;
    broke.x0 = -5.0;
    CHECK_NOTHROW(validate(broke, UtilitySpec{Cara{0.001}})); // CARA takes any wealth
    CHECK_THROWS_AS(validate(broke, UtilitySpec{Crra{2.0}}), InvalidParams);
    CHECK_THROWS_AS(validate(broke, UtilitySpec{LogUtility{}}), InvalidParams);
}

TEST_CASE("utility values and domains") {
    CHECK(utility_value(Cara{0.001}, 1000.0) ==
          Catch::Approx(-1000.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(utility_value(Crra{2.0}, 10.0) == Catch::Approx(-0.1).epsilon(1e-14));
    CHECK(utility_value(LogUtility{}, std::exp(1.0)) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(utility_value(Crra{2.0}, -1.0), DomainError);
    CHECK_THROWS_AS(utility_value(LogUtility{}, 0.0), DomainError);
}

TEST_CASE("quadratic cost is zero at 1, nondecreasing and convex on [1, 100]") {
    CostSpec cost = QuadraticCost{0.7};
    validate(cost);
    CHECK(cost_value(cost, 1.0) == 0.0);
    double prev = 0.0;
    double prev_slope = -1.0;
    for (int i = 1; i <= 200; ++i) {
        double x = 1.0 + 99.0 * i / 200.0;
        double v = cost_value(cost, x);
        CHECK(v >= prev);
        double slope = (v - prev) / (99.0 / 200.0);
        CHECK(slope >= prev_slope);
        prev = v;
        prev_slope = slope;
    }
}

TEST_CASE("tabulated costs validate shape") {
    TabulatedCost good{{1.0, 2.0, 3.0, 5.0}, {0.0, 1.0, 3.0, 9.0}};
    CHECK_NOTHROW(validate(CostSpec{good}));
    CHECK(cost_value(good, 2.5) == Catch::Approx(2.0));
    CHECK(cost_value(good, 7.0) == Catch::Approx(15.0)); // linear extension

    TabulatedCost concave{{1.0, 2.0, 3.0}, {0.0, 2.0, 3.0}};
    CHECK_THROWS_AS(validate(CostSpec{concave}), InvalidParams);
    TabulatedCost wrong_origin{{1.0, 2.0}, {0.5, 1.0}};
    CHECK_THROWS_AS(validate(CostSpec{wrong_origin}), InvalidParams);
    TabulatedCost decreasing{{1.0, 2.0}, {0.0, -1.0}};
    CHECK_THROWS_AS(validate(CostSpec{decreasing}), InvalidParams);
}
