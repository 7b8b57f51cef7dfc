#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "infoclock/closed_form.hpp"
#include "infoclock/montecarlo.hpp"

using namespace infoclock;

namespace {

MarketParams figure_params() { return {0.02, 0.2, 0.08, 0.01, 2.0, 1000.0}; }

SimConfig small_sim(std::int64_t paths, int steps) {
    SimConfig sim;
    sim.n_paths = paths;
    sim.n_steps = steps;
    sim.master_seed = 42;
    return sim;
}

bool reports_equal(const SimReport& a, const SimReport& b) {
    return a.mean_utility == b.mean_utility && a.std_error == b.std_error &&
           a.mean_sq_drift_error == b.mean_sq_drift_error &&
           a.terminal_wealth.mean == b.terminal_wealth.mean &&
           a.terminal_wealth.variance == b.terminal_wealth.variance &&
           a.terminal_wealth.min == b.terminal_wealth.min &&
           a.floored_paths == b.floored_paths;
}

} // namespace

TEST_CASE("the zero strategy is deterministic") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(500, 16);
    sim.strategy = ZeroStrategy{};
    SimReport rep = simulate(p, Cara{0.001}, InformativeClock::natural(p.t0()), sim);
    double xT = p.x0 * std::exp(p.r * p.T);
    CHECK(rep.terminal_wealth.mean == xT);
    CHECK(rep.terminal_wealth.min == xT);
    CHECK(rep.mean_utility == Catch::Approx(utility_value(Cara{0.001}, xT)).epsilon(1e-14));
    CHECK(rep.std_error == 0.0);
    CHECK(rep.floored_paths == 0);
}

TEST_CASE("scaled factor 1 is bit-identical to the optimal strategy") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(2000, 50);
    sim.strategy = OptimalClosedForm{};
    InformativeClock clock = InformativeClock::linear(p.t0(), 2.0);
    SimReport direct = simulate(p, Cara{0.001}, clock, sim);
    StrategyComparison cmp = compare_strategies(p, Cara{0.001}, clock, {1.0}, sim);
    CHECK(reports_equal(direct, cmp.reports[0]));

    // factor 0 reproduces the zero strategy
    sim.strategy = ZeroStrategy{};
    SimReport zero = simulate(p, Cara{0.001}, clock, sim);
    StrategyComparison zcmp = compare_strategies(p, Cara{0.001}, clock, {0.0}, sim);
    CHECK(reports_equal(zero, zcmp.reports[0]));
}

TEST_CASE("results are identical for any worker count") {
    MarketParams p = figure_params();
    InformativeClock clock = InformativeClock::linear(p.t0(), 2.0);
    SimConfig sim = small_sim(4000, 40);
    sim.strategy = OptimalClosedForm{};
    sim.n_workers = 1;
    SimReport w1 = simulate(p, Crra{2.0}, clock, sim);
    sim.n_workers = 4;
    SimReport w4 = simulate(p, Crra{2.0}, clock, sim);
    sim.n_workers = 16;
    SimReport w16 = simulate(p, Crra{2.0}, clock, sim);
    CHECK(reports_equal(w1, w4));
    CHECK(reports_equal(w1, w16));
}

TEST_CASE("path records agree with the engine") {
    MarketParams p = figure_params();
    InformativeClock clock = InformativeClock::linear(p.t0(), 4.0);
    SimConfig sim = small_sim(1, 64);
    sim.strategy = ZeroStrategy{};
    SimReport rep = simulate(p, Cara{0.001}, clock, sim);
    PathRecord rec = simulate_path_record(p, clock, 64, 42, 0);
    double derr = (rec.mu - rec.Z.back()) * (rec.mu - rec.Z.back());
    CHECK(rep.mean_sq_drift_error == derr);
}

TEST_CASE("generated increments carry the requested correlation") {
    MarketParams p = figure_params();
    const double rho = 0.7;
    InformativeClock clock = InformativeClock::linear(p.t0(), 1.0 / (1.0 - rho * rho));
    const int n_paths = 20000;
    const int steps = 4;
    const double dt = p.T / steps;
    double sww = 0.0, smm = 0.0, swm = 0.0;
    for (int path = 0; path < n_paths; ++path) {
        PathRecord rec = simulate_path_record(p, clock, steps, 99, path);
        double dW = (rec.Y[1] - rec.Y[0] - (rec.mu - 0.02) * dt) / p.sigma;
        double dm = rec.m[1] - rec.m[0];
        sww += dW * dW;
        smm += dm * dm;
        swm += dW * dm;
    }
    double corr = swm / std::sqrt(sww * smm);
    CHECK(std::abs(corr - rho) <= 3.0 / std::sqrt(static_cast<double>(n_paths)));
}

TEST_CASE("the filter recomputed from whole-path sums matches the recursion") {
    MarketParams p = figure_params();
    const double rho = 0.6;
    InformativeClock clock = InformativeClock::linear(p.t0(), 1.0 / (1.0 - rho * rho));
    const int steps = 512;
    PathRecord rec = simulate_path_record(p, clock, steps, 4242, 3);
    const double dt = p.T / steps;
    const double q2 = 1.0 / (1.0 - rho * rho);
    double y0 = (p.mu0 - 0.5 * p.sigma * p.sigma) * p.t0();
    double num = y0, den = p.t0();
    for (int i = 0; i < steps; ++i) {
        double dY = rec.Y[i + 1] - rec.Y[i];
        double dm = rec.m[i + 1] - rec.m[i];
        num += q2 * (dY - p.sigma * rho * dm);
        den += q2 * dt;
    }
    double z_direct = 0.5 * p.sigma * p.sigma + num / den;
    CHECK(rec.Z.back() == Catch::Approx(z_direct).margin(1e-10));
}

TEST_CASE("ensemble drift error matches the conditional-variance law") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(20000, 64);
    sim.strategy = ZeroStrategy{};
    SimReport rep = simulate(p, Cara{0.001}, InformativeClock::natural(p.t0()), sim);
    double predicted = p.sigma * p.sigma / (p.t0() + p.T);
    CHECK(rep.mean_sq_drift_error == Catch::Approx(predicted).epsilon(0.05));
}

TEST_CASE("insanely leveraged CRRA paths hit the wealth floor and are counted") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(2000, 8);
    sim.strategy = ScaledOptimal{200.0};
    SimReport rep = simulate(p, Crra{2.0}, InformativeClock::natural(p.t0()), sim);
    CHECK(rep.floored_paths > 0);
    CHECK(rep.terminal_wealth.min >= sim.wealth_floor_rel * p.x0 * (1.0 - 1e-12));
}

TEST_CASE("budget and validation guards") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(2000000, 1000);
    CHECK_THROWS_AS(simulate(p, Cara{0.001}, InformativeClock::natural(p.t0()), sim),
                    InvalidParams);
    sim = small_sim(100, 50);
    CHECK_THROWS_AS(simulate(p, Cara{0.001}, InformativeClock::insider(p.t0()), sim),
                    InadmissibleClock);
    MarketParams small = p;
    small.sigma0_sq = 0.04;
    CHECK_THROWS_AS(simulate(small, Crra{0.2}, InformativeClock::natural(1.0), sim),
                    IllPosedProblem);
}

TEST_CASE("INFOCLOCK_SEED overrides the configured seed") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(50, 16);
    sim.strategy = ZeroStrategy{};
    setenv("INFOCLOCK_SEED", "777", 1);
    SimReport rep = simulate(p, Cara{0.001}, InformativeClock::natural(p.t0()), sim);
    CHECK(rep.seed == 777);
    setenv("INFOCLOCK_SEED", "not-a-number", 1);
    CHECK_THROWS_AS(simulate(p, Cara{0.001}, InformativeClock::natural(p.t0()), sim),
                    ConfigError);
    unsetenv("INFOCLOCK_SEED");
    SimReport plain = simulate(p, Cara{0.001}, InformativeClock::natural(p.t0()), sim);
    CHECK(plain.seed == 42);
}

TEST_CASE("monotone clocks order the MC means like the closed forms") {
    MarketParams p = figure_params();
    SimConfig sim = small_sim(20000, 200);
    MonotonicityReport rep =
        monotonicity_experiment(p, Cara{0.001}, InformativeClock::linear(p.t0(), 4.0),
                                InformativeClock::natural(p.t0()), sim);
    CHECK(rep.closed_form_1 > rep.closed_form_2);
    CHECK(rep.consistent);

    // equal clocks: equal closed forms, difference within noise
    MonotonicityReport same =
        monotonicity_experiment(p, Cara{0.001}, InformativeClock::linear(p.t0(), 2.0),
                                InformativeClock::linear(p.t0(), 2.0), sim);
    CHECK(same.closed_form_1 == same.closed_form_2);
    CHECK(same.mc_1.mean_utility == same.mc_2.mean_utility);
    CHECK(same.consistent);
}

// Weak-error trend: simulate the fine grid and a 4x coarser grid from the
// same Brownian increments (the coarse step consumes the sum of four fine
// increments), so the bias difference is measured with the path noise paired
// away. The fine estimate must not sit farther from the closed form.
TEST_CASE("a finer Euler grid does not increase the closed-form gap") {
    MarketParams p = figure_params();
    UtilitySpec u = Cara{0.001};
    InformativeClock clock = InformativeClock::natural(p.t0());
    ValueCoefficients coeffs = coefficients(p, u, clock);
    double v0 = value(coeffs, {0.0, p.x0, p.mu0});

    const int fine_steps = 1000;
    const int ratio = 4;
    const int coarse_steps = fine_steps / ratio;
    const std::int64_t n_paths = 200000;
    const double dt_f = p.T / fine_steps;
    const double dt_c = p.T / coarse_steps;
    const double half_var = 0.5 * p.sigma * p.sigma;
    const double sig2 = p.sigma * p.sigma;

    std::vector<double> u_fine(n_paths), u_coarse(n_paths), u_diff(n_paths);
    const double sigma0 = std::sqrt(p.sigma0_sq);
    const double beta = 0.001;
    for (std::int64_t path = 0; path < n_paths; ++path) {
        Xoshiro256pp rng(314159, static_cast<std::uint64_t>(path));
        double mu = p.mu0 + sigma0 * rng.normal();
        double zf = p.mu0, tf = p.t0();
        double zc = p.mu0, tc = p.t0();
        double xf = p.x0, xc = p.x0;
        double dw_acc = 0.0;
        for (int i = 0; i < fine_steps; ++i) {
            double t = i * dt_f;
            double dW = std::sqrt(dt_f) * rng.normal_pair().first;
            double dY = (mu - half_var) * dt_f + p.sigma * dW;
            double remf = p.T - t;
            double pif = std::exp(-p.r * remf) / beta * (tf / (tf + remf)) * (zf - p.r) / sig2;
            xf += (p.r * xf + pif * (mu - p.r)) * dt_f + pif * p.sigma * dW;
            double tf_new = tf + dt_f;
            zf = half_var + ((zf - half_var) * tf + dY) / tf_new;
            tf = tf_new;
            dw_acc += dW;
            if ((i + 1) % ratio == 0) {
                double tcs = (i + 1 - ratio) * dt_f;
                double remc = p.T - tcs;
                double dYc = (mu - half_var) * dt_c + p.sigma * dw_acc;
                double pic =
                    std::exp(-p.r * remc) / beta * (tc / (tc + remc)) * (zc - p.r) / sig2;
                xc += (p.r * xc + pic * (mu - p.r)) * dt_c + pic * p.sigma * dw_acc;
                double tc_new = tc + dt_c;
                zc = half_var + ((zc - half_var) * tc + dYc) / tc_new;
                tc = tc_new;
                dw_acc = 0.0;
            }
        }
        u_fine[path] = utility_value(u, xf);
        u_coarse[path] = utility_value(u, xc);
        u_diff[path] = u_fine[path] - u_coarse[path];
    }
    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / v.size();
    };
    double mf = mean_of(u_fine);
    double mc = mean_of(u_coarse);
    double md = mean_of(u_diff);
    double sd = 0.0;
    for (double x : u_diff) sd += (x - md) * (x - md);
    double se_diff = std::sqrt(sd / (n_paths - 1) / n_paths);
    double se_fine = 0.0;
    for (double x : u_fine) se_fine += (x - mf) * (x - mf);
    se_fine = std::sqrt(se_fine / (n_paths - 1) / n_paths);

    double gap_fine = std::abs(mf - v0);
    double gap_coarse = std::abs(mc - v0);
    INFO("gap fine " << gap_fine << " gap coarse " << gap_coarse << " paired se " << se_diff);
    CHECK(gap_fine <= gap_coarse + 3.0 * se_diff + 0.1 * se_fine);
}
