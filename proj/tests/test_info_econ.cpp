#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "infoclock/info_econ.hpp"

using namespace infoclock;

namespace {

MarketParams figure_params() { return {0.02, 0.2, 0.08, 0.01, 2.0, 1000.0}; }

// Clock-domain closed forms for linear clocks tau = t0 + k t, used as test
// oracles only (production always integrates numerically).
double cara_c0_linear(double beta, double t0, double T, double k) {
    if (k == 1.0) return (std::log((t0 + T) / t0) - T / (t0 + T)) / (2.0 * beta);
    return (std::log((t0 + k * T) / t0) -
            k / (k - 1.0) * std::log((t0 + k * T) / (t0 + T))) /
           (2.0 * beta);
}

} // namespace

TEST_CASE("the natural clock carries exactly zero value") {
    MarketParams p = figure_params();
    InformativeClock nat = InformativeClock::natural(p.t0());
    CHECK(value_of_information(p, Cara{0.001}, nat) == 0.0);
    CHECK(value_of_information(p, Crra{2.0}, nat) == 0.0);
    CHECK(value_of_information(p, LogUtility{}, nat) == 0.0);
    // linear k = 1 is the same clock
    CHECK(value_of_information(p, Cara{0.001}, InformativeClock::linear(p.t0(), 1.0)) == 0.0);
}

TEST_CASE("CARA value for a linear clock matches the elementary-integral oracle") {
    MarketParams p = figure_params();
    const double beta = 0.001;
    const double t0 = p.t0();
    for (double k : {2.0, 5.0}) {
        double expected = cara_c0_linear(beta, t0, p.T, k) - cara_c0_linear(beta, t0, p.T, 1.0);
        double got = value_of_information(p, Cara{beta}, InformativeClock::linear(t0, k));
        CHECK(got == Catch::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("log value for a linear clock matches the elementary-integral oracle") {
    MarketParams p = figure_params();
    const double t0 = p.t0();
    const double k = 3.0;
    // c_k(0) = (1/2)[T/t0 - ln((t0+kT)/t0)/k]
    auto c0 = [&](double kk) {
        return 0.5 * (p.T / t0 - std::log((t0 + kk * p.T) / t0) / kk);
    };
    double expected = p.x0 * std::expm1(c0(k) - c0(1.0));
    double got = value_of_information(p, LogUtility{}, InformativeClock::linear(t0, k));
    CHECK(got == Catch::Approx(expected).epsilon(1e-8));
}

TEST_CASE("CRRA value is proportional to the endowment") {
    MarketParams p = figure_params();
    InformativeClock clock = InformativeClock::linear(p.t0(), 2.0);
    double v1 = value_of_information(p, Crra{2.0}, clock) / p.x0;
    p.x0 = 2000.0;
    double v2 = value_of_information(p, Crra{2.0}, clock) / p.x0;
    CHECK(v1 == v2);
}

TEST_CASE("insider bound: closed forms and attainment in the steep-clock limit") {
    MarketParams p = figure_params();
    const double beta = 0.001;
    const double t0 = p.t0();

    double bound = insider_bound(p, Cara{beta});
    double expected =
        std::log((t0 + p.T) / t0) / (2.0 * beta) - cara_c0_linear(beta, t0, p.T, 1.0);
    CHECK(bound == Catch::Approx(expected).epsilon(1e-8));

    // c_insider(0) = 500 ln 1.5 at the figure parameters
    CHECK(std::log((t0 + p.T) / t0) / (2.0 * beta) ==
          Catch::Approx(500.0 * std::log(1.5)).epsilon(1e-12));

    for (UtilitySpec u : {UtilitySpec{Cara{beta}}, UtilitySpec{Crra{2.0}},
                          UtilitySpec{Crra{0.6}}, UtilitySpec{LogUtility{}}}) {
        double b = insider_bound(p, u);
        double v = value_of_information(p, u, InformativeClock::linear(t0, 1e4));
        CHECK(v <= b);
        CHECK(b - v <= 0.01 * b);
    }

    MarketParams tiny = p;
    tiny.T = 1e-8;
    CHECK(std::abs(insider_bound(tiny, Cara{beta})) <= 1e-6);
}

TEST_CASE("cost of information") {
    MarketParams p = figure_params();
    CostSpec quad = QuadraticCost{1.0};
    CHECK(cost_of_information(quad, InformativeClock::natural(p.t0()), p.T) == 0.0);
    CHECK(cost_of_information(quad, InformativeClock::linear(p.t0(), 2.0), p.T) ==
          Catch::Approx(2.0).epsilon(1e-14));

    // tau' = 1 + t on [0, 2]: integral of t^2 is 8/3, exact for the aligned Simpson
    std::vector<double> t, dtau;
    for (int i = 0; i <= 64; ++i) {
        t.push_back(2.0 * i / 64);
        dtau.push_back(1.0 + t.back());
    }
    InformativeClock ramp = InformativeClock::from_grid(p.t0(), t, dtau);
    CHECK(cost_of_information(quad, ramp, p.T) == Catch::Approx(8.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("net bundles value, cost, bound") {
    MarketParams p = figure_params();
    InfoValuation nat =
        net_value(p, Cara{0.001}, QuadraticCost{1.0}, InformativeClock::natural(p.t0()));
    CHECK(nat.value == 0.0);
    CHECK(nat.cost == 0.0);
    CHECK(nat.net == 0.0);
    CHECK(nat.bound > 0.0);

    InfoValuation expensive = net_value(p, Cara{0.001}, QuadraticCost{1e9},
                                        InformativeClock::linear(p.t0(), 2.0));
    CHECK(expensive.net < 0.0);
}

TEST_CASE("value sweeps are increasing and concave in the clock slope") {
    MarketParams p = figure_params();
    for (UtilitySpec u : {UtilitySpec{Cara{0.001}}, UtilitySpec{Crra{2.0}},
                          UtilitySpec{LogUtility{}}}) {
        std::vector<double> vals;
        for (int k = 1; k <= 10; ++k) {
            vals.push_back(
                value_of_information(p, u, InformativeClock::linear(p.t0(), k)));
        }
        double bound = insider_bound(p, u);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            CHECK(vals[i] >= 0.0);
            CHECK(vals[i] <= bound);
            if (i > 0) CHECK(vals[i] > vals[i - 1]);
            if (i > 1) CHECK(vals[i] - vals[i - 1] < vals[i - 1] - vals[i - 2]);
        }
    }
}

TEST_CASE("value is independent of market conditions") {
    MarketParams p = figure_params();
    InformativeClock clock = InformativeClock::linear(p.t0(), 3.0);
    double ref_cara = value_of_information(p, Cara{0.001}, clock);
    double ref_crra = value_of_information(p, Crra{2.0}, clock);
    for (double r : {0.0, 0.02, 0.1}) {
        for (double mu0 : {0.0, 0.08}) {
            MarketParams q = p;
            q.r = r;
            q.mu0 = mu0;
            CHECK(value_of_information(q, Cara{0.001}, clock) == ref_cara);
            CHECK(value_of_information(q, Crra{2.0}, clock) == ref_crra);
        }
    }
    // CARA is additionally independent of the endowment
    MarketParams q = p;
    q.x0 = 123.0;
    CHECK(value_of_information(q, Cara{0.001}, clock) == ref_cara);
}

TEST_CASE("CARA value is inversely proportional to beta") {
    MarketParams p = figure_params();
    InformativeClock clock = InformativeClock::linear(p.t0(), 2.0);
    double ref = value_of_information(p, Cara{0.001}, clock) * 0.001;
    for (double beta : {0.0005, 0.002}) {
        double scaled = value_of_information(p, Cara{beta}, clock) * beta;
        CHECK(scaled == Catch::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("pointwise-larger clocks are worth more") {
    MarketParams p = figure_params();
    std::vector<double> t, lo, hi;
    for (int i = 0; i <= 64; ++i) {
        t.push_back(2.0 * i / 64);
        lo.push_back(1.0 + 0.5 * std::abs(std::sin(2.0 * t.back())));
        hi.push_back(lo.back() + 0.75);
    }
    InformativeClock c_lo = InformativeClock::from_grid(p.t0(), t, lo);
    InformativeClock c_hi = InformativeClock::from_grid(p.t0(), t, hi);
    for (UtilitySpec u : {UtilitySpec{Cara{0.001}}, UtilitySpec{Crra{2.0}},
                          UtilitySpec{LogUtility{}}}) {
        CHECK(value_of_information(p, u, c_hi) >= value_of_information(p, u, c_lo));
    }
}

TEST_CASE("error propagation") {
    MarketParams p = figure_params();
    MarketParams small = p;
    small.sigma0_sq = 0.04; // t0 = 1
    CHECK_THROWS_AS(
        value_of_information(small, Crra{0.2}, InformativeClock::natural(small.t0())),
        IllPosedProblem);
    CHECK_THROWS_AS(insider_bound(small, Crra{0.2}), IllPosedProblem);
    CHECK_THROWS_AS(
        value_of_information(p, Cara{0.001}, InformativeClock::insider(p.t0())),
        InadmissibleClock);
}
