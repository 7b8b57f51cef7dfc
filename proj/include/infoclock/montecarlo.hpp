#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "infoclock/clock.hpp"
#include "infoclock/closed_form.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/filtering.hpp"
#include "infoclock/market.hpp"
#include "infoclock/rng.hpp"

// Stochastic verification engine. Per path: draw mu from the prior, generate
// correlated increments (dW, dm) with corr rho(t), advance the log price,
// run the conjugate filter, and apply a strategy. Paths are embarrassingly
// parallel with per-path RNG streams keyed by (master_seed, path_index), and
// all statistics are pairwise-summed over stored per-path values, so reports
// are bit-identical for any worker count.

namespace infoclock {

struct ZeroStrategy {};
struct OptimalClosedForm {};
struct ConstantFraction {
    double k = 0.0;
};
struct ScaledOptimal {
    double factor = 1.0;
};

using Strategy = std::variant<ZeroStrategy, OptimalClosedForm, ConstantFraction, ScaledOptimal>;

struct SimConfig {
    std::int64_t n_paths = 10000;
    int n_steps = 250;
    std::uint64_t master_seed = 42;
    Strategy strategy = OptimalClosedForm{};
    int n_workers = 0;                             // 0 = hardware concurrency
    std::int64_t increment_budget = 1'000'000'000; // cap on n_paths * n_steps
    double wealth_floor_rel = 1e-9;                // floor = rel * x0 (CRRA/log Euler paths)
};

struct WealthSummary {
    double mean = 0.0;
    double variance = 0.0;
    double min = 0.0;
};

struct SimReport {
    double mean_utility = 0.0;
    double std_error = 0.0;
    double mean_sq_drift_error = 0.0; // average (mu - Z_T)^2
    WealthSummary terminal_wealth;
    std::int64_t n_paths = 0;
    int n_steps = 0;
    std::uint64_t seed = 0;
    std::int64_t floored_paths = 0;
};

// INFOCLOCK_SEED overrides the configured master seed.
inline std::uint64_t effective_seed(const SimConfig& sim) {
    if (const char* env = std::getenv("INFOCLOCK_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw ConfigError("INFOCLOCK_SEED must be an unsigned integer");
        }
        return static_cast<std::uint64_t>(v);
    }
    return sim.master_seed;
}

namespace detail {

inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double variance = 0.0;
};

inline MeanSe mean_se(std::span<const double> v) {
    MeanSe out;
    const double n = static_cast<double>(v.size());
    out.mean = pairwise_sum(v) / n;
    if (v.size() > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double d = v[i] - out.mean;
            sq[i] = d * d;
        }
        out.variance = pairwise_sum(sq) / (n - 1.0);
        out.se = std::sqrt(out.variance / n);
    }
    return out;
}

// Normalized strategy: zero / constant fraction / amount with a scale factor.
struct EngineStrategy {
    enum class Kind { Zero, Fraction, Amount } kind = Kind::Amount;
    double param = 1.0; // fraction k or amount factor
};

inline EngineStrategy normalize(const Strategy& s) {
    if (std::holds_alternative<ZeroStrategy>(s)) return {EngineStrategy::Kind::Zero, 0.0};
    if (const ConstantFraction* f = std::get_if<ConstantFraction>(&s)) {
        return {EngineStrategy::Kind::Fraction, f->k};
    }
    if (const ScaledOptimal* f = std::get_if<ScaledOptimal>(&s)) {
        if (f->factor == 0.0) return {EngineStrategy::Kind::Zero, 0.0};
        return {EngineStrategy::Kind::Amount, f->factor};
    }
    return {EngineStrategy::Kind::Amount, 1.0};
}

struct EngineOutput {
    // [strategy][path]
    std::vector<std::vector<double>> utility;
    std::vector<std::vector<double>> x_terminal;
    std::vector<std::vector<std::uint8_t>> floored;
    std::vector<double> sq_drift_err; // [path], strategy-independent
};

inline double correlation_from_clock_at(const InformativeClock& clock, double t) {
    double q2 = clock.eval_derivative(t);
    return std::sqrt(std::max(0.0, 1.0 - 1.0 / q2));
}

// Deterministic per-step tables shared by all paths.
struct StepTables {
    std::vector<double> q2, sig_rho, rho_sqdt, qinv_sqdt, tau, coef;
    double dt = 0.0, sqdt = 0.0, half_var = 0.0;
};

inline StepTables make_tables(const MarketParams& params, const UtilitySpec& utility,
                              const InformativeClock& clock, int n_steps) {
    StepTables tb;
    const int n = n_steps;
    tb.dt = params.T / n;
    tb.sqdt = std::sqrt(tb.dt);
    tb.half_var = 0.5 * params.sigma * params.sigma;
    tb.q2.resize(n);
    tb.sig_rho.resize(n);
    tb.rho_sqdt.resize(n);
    tb.qinv_sqdt.resize(n);
    tb.tau.resize(n + 1);
    tb.coef.resize(n);
    tb.tau[0] = params.t0();
    for (int i = 0; i < n; ++i) {
        double t = i * tb.dt;
        double rho = correlation_from_clock_at(clock, t);
        tb.q2[i] = 1.0 / (1.0 - rho * rho);
        tb.sig_rho[i] = params.sigma * rho;
        tb.rho_sqdt[i] = rho * tb.sqdt;
        tb.qinv_sqdt[i] = std::sqrt(1.0 - rho * rho) * tb.sqdt;
        tb.tau[i + 1] = tb.tau[i] + tb.q2[i] * tb.dt;
        // strategy coefficient: optimal amount at unit wealth and unit excess
        tb.coef[i] = optimal_amount(params, utility, t, 1.0, params.r + 1.0, tb.tau[i]);
    }
    return tb;
}

inline EngineOutput run_engine(const MarketParams& params, const UtilitySpec& utility,
                               const InformativeClock& clock, const SimConfig& sim,
                               const std::vector<Strategy>& strategies) {
    validate(params, utility);
    require_well_posed(params, utility);
    if (!(sim.n_paths >= 1) || sim.n_steps < 2) {
        throw InvalidParams("simulate: need n_paths >= 1 and n_steps >= 2");
    }
    if (sim.n_paths * static_cast<std::int64_t>(sim.n_steps) > sim.increment_budget) {
        throw InvalidParams("simulate: n_paths * n_steps exceeds the increment budget");
    }
    AdmissibilityReport adm = check_admissible(clock, params.T);
    if (!adm.finite) throw InadmissibleClock("simulate: clock must be finite over [0, T]");

    const std::uint64_t seed = effective_seed(sim);
    const int n = sim.n_steps;
    const std::int64_t n_paths = sim.n_paths;
    const StepTables tb = make_tables(params, utility, clock, n);

    std::vector<EngineStrategy> strat(strategies.size());
    for (std::size_t j = 0; j < strategies.size(); ++j) strat[j] = normalize(strategies[j]);
    const std::size_t n_strat = strat.size();
    const bool positive_wealth = !is_cara(utility);
    const double floor_val = sim.wealth_floor_rel * params.x0;
    const bool cara_amount = is_cara(utility);

    EngineOutput out;
    out.utility.assign(n_strat, std::vector<double>(n_paths));
    out.x_terminal.assign(n_strat, std::vector<double>(n_paths));
    out.floored.assign(n_strat, std::vector<std::uint8_t>(n_paths, 0));
    out.sq_drift_err.resize(n_paths);

    const double sigma0 = std::sqrt(params.sigma0_sq);
    const double rf_growth = std::exp(params.r * params.T);

    auto run_range = [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> X(n_strat);
        std::vector<std::uint8_t> fl(n_strat);
        for (std::int64_t path = lo; path < hi; ++path) {
            Xoshiro256pp rng(seed, static_cast<std::uint64_t>(path));
            const double mu = params.mu0 + sigma0 * rng.normal();
            const double drift_dt = (mu - tb.half_var) * tb.dt;
            const double excess_mu = mu - params.r;
            double z = params.mu0;
            double w_sum = 0.0;
            for (std::size_t j = 0; j < n_strat; ++j) {
                X[j] = params.x0;
                fl[j] = 0;
            }
            for (int i = 0; i < n; ++i) {
                auto [xi, eta] = rng.normal_pair();
                const double dW = tb.sqdt * xi;
                const double dm = tb.rho_sqdt[i] * xi + tb.qinv_sqdt[i] * eta;
                const double dY = drift_dt + params.sigma * dW;
                const double excess_z = z - params.r;
                for (std::size_t j = 0; j < n_strat; ++j) {
                    if (strat[j].kind != EngineStrategy::Kind::Amount) continue;
                    double amount = strat[j].param * tb.coef[i] * excess_z;
                    if (!cara_amount) amount *= X[j];
                    X[j] += (params.r * X[j] + amount * excess_mu) * tb.dt +
                            amount * params.sigma * dW;
                    if (positive_wealth && !(X[j] > 0.0)) {
                        X[j] = floor_val;
                        fl[j] = 1;
                    }
                }
                w_sum += dW;
                // conjugate filter step, identical to filtering::update
                const double eff = dY - tb.sig_rho[i] * dm;
                z = tb.half_var +
                    ((z - tb.half_var) * tb.tau[i] + tb.q2[i] * eff) / tb.tau[i + 1];
            }
            const double derr = mu - z;
            out.sq_drift_err[path] = derr * derr;
            for (std::size_t j = 0; j < n_strat; ++j) {
                double xt = 0.0;
                switch (strat[j].kind) {
                    case EngineStrategy::Kind::Zero:
                        xt = params.x0 * rf_growth;
                        break;
                    case EngineStrategy::Kind::Fraction: {
                        double k = strat[j].param;
                        xt = params.x0 *
                             std::exp((params.r + k * excess_mu -
                                       0.5 * params.sigma * params.sigma * k * k) *
                                          params.T +
                                      params.sigma * k * w_sum);
                        break;
                    }
                    case EngineStrategy::Kind::Amount:
                        xt = X[j];
                        break;
                }
                out.x_terminal[j][path] = xt;
                out.floored[j][path] = fl[j];
                out.utility[j][path] = utility_value(utility, xt);
            }
        }
    };

    int workers = sim.n_workers > 0
                      ? sim.n_workers
                      : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<int>(std::min<std::int64_t>(workers, n_paths));
    if (workers <= 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            std::int64_t lo = n_paths * w / workers;
            std::int64_t hi = n_paths * (w + 1) / workers;
            pool.emplace_back(run_range, lo, hi);
        }
        for (std::thread& th : pool) th.join();
    }
    return out;
}

inline SimReport report_for(const EngineOutput& eo, std::size_t j, const SimConfig& sim,
                            std::uint64_t seed) {
    SimReport rep;
    MeanSe u = mean_se(eo.utility[j]);
    rep.mean_utility = u.mean;
    rep.std_error = u.se;
    rep.mean_sq_drift_error = mean_se(eo.sq_drift_err).mean;
    MeanSe w = mean_se(eo.x_terminal[j]);
    rep.terminal_wealth.mean = w.mean;
    rep.terminal_wealth.variance = w.variance;
    rep.terminal_wealth.min =
        *std::min_element(eo.x_terminal[j].begin(), eo.x_terminal[j].end());
    rep.n_paths = sim.n_paths;
    rep.n_steps = sim.n_steps;
    rep.seed = seed;
    std::int64_t fl = 0;
    for (std::uint8_t f : eo.floored[j]) fl += f;
    rep.floored_paths = fl;
    return rep;
}

} // namespace detail

inline SimReport simulate(const MarketParams& params, const UtilitySpec& utility,
                          const InformativeClock& clock, const SimConfig& sim) {
    detail::EngineOutput eo = detail::run_engine(params, utility, clock, sim, {sim.strategy});
    return detail::report_for(eo, 0, sim, effective_seed(sim));
}

struct StrategyComparison {
    std::vector<double> factors;
    std::vector<SimReport> reports;
    int base_index = -1;           // position of factor 1.0, when present
    std::vector<double> diff_mean; // mean(U_base - U_j) over paired paths
    std::vector<double> diff_se;   // standard error of that paired mean
};

// Scaled-optimal comparison under common random numbers: one engine pass with
// shared increments, so per-path differences against factor 1.0 isolate the
// scaling loss.
inline StrategyComparison compare_strategies(const MarketParams& params,
                                             const UtilitySpec& utility,
                                             const InformativeClock& clock,
                                             const std::vector<double>& factors,
                                             const SimConfig& sim) {
    if (factors.empty()) throw InvalidParams("compare_strategies: empty factor list");
    std::vector<Strategy> strategies;
    strategies.reserve(factors.size());
    for (double f : factors) strategies.push_back(ScaledOptimal{f});
    detail::EngineOutput eo = detail::run_engine(params, utility, clock, sim, strategies);

    StrategyComparison out;
    out.factors = factors;
    const std::uint64_t seed = effective_seed(sim);
    for (std::size_t j = 0; j < factors.size(); ++j) {
        out.reports.push_back(detail::report_for(eo, j, sim, seed));
        if (factors[j] == 1.0 && out.base_index < 0) out.base_index = static_cast<int>(j);
    }
    out.diff_mean.assign(factors.size(), 0.0);
    out.diff_se.assign(factors.size(), 0.0);
    if (out.base_index >= 0) {
        const std::vector<double>& base = eo.utility[out.base_index];
        std::vector<double> diff(base.size());
        for (std::size_t j = 0; j < factors.size(); ++j) {
            for (std::size_t p = 0; p < base.size(); ++p) {
                diff[p] = base[p] - eo.utility[j][p];
            }
            detail::MeanSe d = detail::mean_se(diff);
            out.diff_mean[j] = d.mean;
            out.diff_se[j] = d.se;
        }
    }
    return out;
}

struct MonotonicityReport {
    double closed_form_1 = 0.0;
    double closed_form_2 = 0.0;
    SimReport mc_1;
    SimReport mc_2;
    bool consistent = false; // MC ordering matches the closed-form one within 3 SE
};

// Pointwise-ordered clocks tau1 >= tau2: the closed-form values must order the
// same way, and the MC means under the respective optimal strategies must
// agree with that ordering within noise (common master seed).
inline MonotonicityReport monotonicity_experiment(const MarketParams& params,
                                                  const UtilitySpec& utility,
                                                  const InformativeClock& clock1,
                                                  const InformativeClock& clock2,
                                                  const SimConfig& sim) {
    MonotonicityReport rep;
    ValueCoefficients c1 = coefficients(params, utility, clock1);
    ValueCoefficients c2 = coefficients(params, utility, clock2);
    StrategyQuery q{0.0, params.x0, params.mu0};
    rep.closed_form_1 = value(c1, q);
    rep.closed_form_2 = value(c2, q);
    SimConfig s = sim;
    s.strategy = OptimalClosedForm{};
    rep.mc_1 = simulate(params, utility, clock1, s);
    rep.mc_2 = simulate(params, utility, clock2, s);
    double comb = 3.0 * std::sqrt(rep.mc_1.std_error * rep.mc_1.std_error +
                                  rep.mc_2.std_error * rep.mc_2.std_error);
    double cf_gap = rep.closed_form_1 - rep.closed_form_2;
    double mc_gap = rep.mc_1.mean_utility - rep.mc_2.mean_utility;
    rep.consistent = (cf_gap >= 0.0) ? (mc_gap >= -comb) : (mc_gap <= comb);
    return rep;
}

struct PathRecord {
    std::vector<double> t, Y, m, Z, tau;
    double mu = 0.0;
};

// One recorded path (same RNG protocol as the engine): used by the filter
// demo, correlation estimation and path-level tests.
inline PathRecord simulate_path_record(const MarketParams& params,
                                       const InformativeClock& clock, int n_steps,
                                       std::uint64_t master_seed,
                                       std::uint64_t path_index = 0) {
    params.validate();
    AdmissibilityReport adm = check_admissible(clock, params.T);
    if (!adm.finite) throw InadmissibleClock("path record: clock must be finite over [0, T]");
    const int n = n_steps;
    if (n < 2) throw InvalidParams("path record: need n_steps >= 2");
    const double dt = params.T / n;
    const double sqdt = std::sqrt(dt);

    PathRecord rec;
    rec.t.resize(n + 1);
    rec.Y.assign(n + 1, 0.0);
    rec.m.assign(n + 1, 0.0);
    rec.Z.resize(n + 1);
    rec.tau.resize(n + 1);

    Xoshiro256pp rng(master_seed, path_index);
    rec.mu = params.mu0 + std::sqrt(params.sigma0_sq) * rng.normal();
    PosteriorState state = init_posterior(params);
    rec.Z[0] = state.z;
    rec.tau[0] = state.tau;
    for (int i = 0; i < n; ++i) {
        double t = i * dt;
        rec.t[i] = t;
        double rho = detail::correlation_from_clock_at(clock, t);
        auto [xi, eta] = rng.normal_pair();
        double dW = sqdt * xi;
        double dm = rho * sqdt * xi + std::sqrt(1.0 - rho * rho) * sqdt * eta;
        double dY = (rec.mu - 0.5 * params.sigma * params.sigma) * dt + params.sigma * dW;
        rec.Y[i + 1] = rec.Y[i] + dY;
        rec.m[i + 1] = rec.m[i] + dm;
        state = update(state, {dY, dm, dt}, params, rho);
        rec.Z[i + 1] = state.z;
        rec.tau[i + 1] = state.tau;
    }
    rec.t[n] = params.T;
    return rec;
}

} // namespace infoclock
