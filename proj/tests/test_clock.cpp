#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <vector>

#include "infoclock/clock.hpp"

using namespace infoclock;

TEST_CASE("zero correlation yields the natural clock") {
    InformativeClock c = clock_from_correlation(CorrelationProfile::constant(0.0), 4.0, 2.0);
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(c.eval(t) == Catch::Approx(4.0 + t).epsilon(1e-14));
        CHECK(c.eval_derivative(t) == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("rho = sqrt(3)/2 quadruples the clock speed") {
    double rho = std::sqrt(3.0) / 2.0; // q^2 = 1/(1 - 3/4) = 4
    InformativeClock c = clock_from_correlation(CorrelationProfile::constant(rho), 4.0, 2.0);
    CHECK(c.eval(2.0) == Catch::Approx(4.0 + 4.0 * 2.0).epsilon(1e-12));
    CHECK(c.eval_derivative(1.0) == Catch::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("ramp profile integrates to the artanh antiderivative") {
    // rho(t) = 0.5 t on [0, 1]: integral of 1/(1 - 0.25 t^2) is
    // (1/(2a)) ln((1+at)/(1-at)) with a = 0.5, so tau(1) = t0 + ln 3.
    CorrelationProfile ramp = CorrelationProfile::grid({0.0, 1.0}, {0.0, 0.5});
    InformativeClock c = clock_from_correlation(ramp, 4.0, 1.0, 8192);
    double expected = 4.0 + std::log(3.0);
    CHECK(c.eval(1.0) == Catch::Approx(expected).margin(1e-6));

    // extended to [0, 2] the ramp hits rho = 1 and the information integral
    // diverges: the profile is inadmissible
    CHECK_THROWS_AS(CorrelationProfile::grid({0.0, 2.0}, {0.0, 1.0}), InadmissibleProfile);
    CHECK_THROWS_AS(CorrelationProfile::constant(1.0 - 1e-7), InadmissibleProfile);
}

TEST_CASE("negative correlations are folded to |rho|") {
    CorrelationProfile p = CorrelationProfile::constant(-0.5);
    CHECK(p.rho(0.3) == 0.5);
    CorrelationProfile g = CorrelationProfile::grid({0.0, 1.0}, {-0.25, 0.25});
    CHECK(g.rho(0.0) == 0.25);
}

TEST_CASE("correlation_from_clock inverts the map") {
    InformativeClock four = InformativeClock::linear(4.0, 4.0);
    CHECK(correlation_from_clock(four).rho(0.7) ==
          Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    InformativeClock nat = InformativeClock::natural(4.0);
    CHECK(correlation_from_clock(nat).rho(0.7) == 0.0);
    InformativeClock two = InformativeClock::linear(4.0, 2.0);
    CHECK(correlation_from_clock(two).rho(0.0) ==
          Catch::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("profile -> clock -> profile round-trips on the grid") {
    std::vector<double> t, rho;
    for (int i = 0; i <= 64; ++i) {
        t.push_back(2.0 * i / 64);
        rho.push_back(0.8 * std::abs(std::sin(2.3 * t.back())));
    }
    CorrelationProfile p = CorrelationProfile::grid(t, rho);
    InformativeClock c = clock_from_correlation(p, 4.0, 2.0, 4096);
    CorrelationProfile back = correlation_from_clock(c);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back.rho(t[i]) == Catch::Approx(rho[i]).margin(1e-8));
    }
}

TEST_CASE("pointwise-larger correlation gives a pointwise-larger clock") {
    std::vector<double> t, lo, hi;
    for (int i = 0; i <= 32; ++i) {
        t.push_back(2.0 * i / 32);
        lo.push_back(0.3 * std::abs(std::sin(3.0 * t.back())));
        hi.push_back(lo.back() + 0.2);
    }
    InformativeClock c_lo = clock_from_correlation(CorrelationProfile::grid(t, lo), 4.0, 2.0);
    InformativeClock c_hi = clock_from_correlation(CorrelationProfile::grid(t, hi), 4.0, 2.0);
    for (double tv : {0.1, 0.5, 1.0, 1.5, 2.0}) {
        CHECK(c_hi.eval(tv) >= c_lo.eval(tv));
        CHECK(c_lo.eval(tv) - 4.0 >= tv - 1e-12); // tau - t0 >= t
    }
}

TEST_CASE("evaluation, derivative and inverse agree") {
    InformativeClock lin = InformativeClock::linear(4.0, 2.0);
    CHECK(lin.eval(1.0) == 6.0);
    CHECK(lin.eval_inverse(6.0) == 1.0);
    CHECK(lin.eval_derivative(0.5) == 2.0);

    CorrelationProfile ramp = CorrelationProfile::grid({0.0, 1.0}, {0.0, 0.5});
    InformativeClock c = clock_from_correlation(ramp, 4.0, 1.0, 4096);
    double t5 = c.eval_inverse(5.0);
    CHECK(c.eval(t5) == Catch::Approx(5.0).margin(1e-10));
    for (double u = 4.0; u <= c.eval(1.0); u += 0.07) {
        CHECK(c.eval(c.eval_inverse(u)) == Catch::Approx(u).margin(1e-10));
    }
    CHECK_THROWS_AS(c.eval_inverse(3.0), OutOfDomain);
    CHECK_THROWS_AS(c.eval(5.0), OutOfDomain);
}

TEST_CASE("admissibility reports") {
    AdmissibilityReport nat = check_admissible(InformativeClock::natural(4.0), 2.0);
    CHECK(nat.finite);
    CHECK(nat.tau_T == Catch::Approx(6.0));
    AdmissibilityReport big = check_admissible(InformativeClock::linear(4.0, 1e6), 2.0);
    CHECK(big.finite);
    AdmissibilityReport ins = check_admissible(InformativeClock::insider(4.0), 2.0);
    CHECK_FALSE(ins.finite);
    CHECK_THROWS_AS(InformativeClock::insider(4.0).eval(1.0), InadmissibleClock);
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(InformativeClock::linear(4.0, 0.5), InvalidParams);
    CHECK_THROWS_AS(InformativeClock::natural(0.0), InvalidParams);
    CHECK(InformativeClock::linear(4.0, 1.0).is_natural());
    CHECK_THROWS_AS(InformativeClock::from_grid(4.0, {0.0, 1.0}, {1.0, 0.5}), InvalidParams);
    CHECK_THROWS_AS(InformativeClock::from_grid(4.0, {0.5, 1.0}, {1.0, 1.0}), InvalidParams);
    CHECK_THROWS_AS(InformativeClock::from_grid(4.0, {0.0, 0.0}, {1.0, 1.0}), InvalidParams);
    // slight undershoot from a shooting solve is clamped to 1
    InformativeClock c = InformativeClock::from_grid(4.0, {0.0, 1.0}, {2.0, 1.0 - 1e-10});
    CHECK(c.eval_derivative(1.0) == 1.0);
}

TEST_CASE("induced profiles expose the clock correlation") {
    auto clock = std::make_shared<InformativeClock>(InformativeClock::linear(4.0, 4.0));
    CorrelationProfile p = CorrelationProfile::induced_by_clock(clock);
    CHECK(p.rho(0.25) == Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
}
