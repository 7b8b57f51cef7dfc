#pragma once

#include <cmath>
#include <variant>

#include "infoclock/clock.hpp"
#include "infoclock/closed_form.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/market.hpp"
#include "infoclock/numerics.hpp"

// Certainty-equivalent valuation of extra information. Value(tau) is the
// endowment increment (CARA) or proportional increase (CRRA/log) that matches
// the utility attainable with the information; it depends only on risk
// aversion and the clock, never on r, mu0 or (for CARA) x0. The natural-case
// reference integrals are computed by the same quadrature as the
// tau-dependent ones, so Value(natural) cancels to exactly zero; closed forms
// serve as test oracles only.

namespace infoclock {

struct InfoValuation {
    double value = 0.0; // wealth units
    double cost = 0.0;  // wealth units
    double net = 0.0;   // value - cost
    double bound = 0.0; // insider-limit maximum value
    UtilitySpec utility;
};

namespace detail {

// Utility-specific value integral over [0, T]:
//   CARA (beta-free): I = int (T-t) tau' / (tau (tau + T - t)) dt
//   CRRA:   g = 1/(2 gamma) int (T-t) tau' / (tau (tau - A (T-t))) dt
//   log:    g = 1/2 int (T-t) tau' / tau^2 dt
// with A = (1-gamma)/gamma. Positive for every admissible clock.
inline double value_integral_raw(const MarketParams& params, const UtilitySpec& utility,
                                 const InformativeClock& clock, const QuadratureSpec& quad) {
    const double T = params.T;
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        const double A = crra_slope(u->gamma);
        const double g = u->gamma;
        return integrate(
                   [&](double t) {
                       double tau = clock.eval(t);
                       double rem = T - t;
                       return clock.eval_derivative(t) * rem /
                              (tau * (tau - A * rem)) / (2.0 * g);
                   },
                   0.0, T, quad)
            .value;
    }
    if (is_log(utility)) {
        return integrate(
                   [&](double t) {
                       double tau = clock.eval(t);
                       return 0.5 * clock.eval_derivative(t) * (T - t) / (tau * tau);
                   },
                   0.0, T, quad)
            .value;
    }
    return integrate(
               [&](double t) {
                   double tau = clock.eval(t);
                   double rem = T - t;
                   return clock.eval_derivative(t) * rem / (tau * (tau + rem));
               },
               0.0, T, quad)
        .value;
}

inline void require_admissible(const InformativeClock& clock, double T) {
    AdmissibilityReport rep = check_admissible(clock, T);
    if (!rep.finite) {
        throw InadmissibleClock("info_econ: clock with infinite tau(T); the insider "
                                "limit is available through insider_bound");
    }
}

} // namespace detail

// Exponent of the CRRA/log certainty-equivalence multiplier (the CARA integral
// is returned beta-free). Exposed for the acquisition dual.
inline double value_integral(const MarketParams& params, const UtilitySpec& utility,
                             const InformativeClock& clock, const QuadratureSpec& quad = {}) {
    validate(params, utility);
    require_well_posed(params, utility);
    detail::require_admissible(clock, params.T);
    return detail::value_integral_raw(params, utility, clock, quad);
}

inline double value_of_information(const MarketParams& params, const UtilitySpec& utility,
                                   const InformativeClock& clock,
                                   const QuadratureSpec& quad = {}) {
    validate(params, utility);
    require_well_posed(params, utility);
    detail::require_admissible(clock, params.T);
    const InformativeClock natural = InformativeClock::natural(params.t0());
    const double g = detail::value_integral_raw(params, utility, clock, quad);
    const double g_nat = detail::value_integral_raw(params, utility, natural, quad);
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        return (g - g_nat) / (2.0 * u->beta);
    }
    return params.x0 * std::expm1(g - g_nat);
}

// Maximum attainable value over all admissible clocks (tau = infinity).
inline double insider_bound(const MarketParams& params, const UtilitySpec& utility,
                            const QuadratureSpec& quad = {}) {
    validate(params, utility);
    require_well_posed(params, utility);
    const double t0 = params.t0();
    const double T = params.T;
    const InformativeClock natural = InformativeClock::natural(t0);
    const double g_nat = detail::value_integral_raw(params, utility, natural, quad);
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        return (std::log((t0 + T) / t0) - g_nat) / (2.0 * u->beta);
    }
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        double A = detail::crra_slope(u->gamma);
        double denom = t0 - A * T; // > 0 exactly when well-posed
        return params.x0 * std::expm1(std::log(t0 / denom) / (2.0 * (1.0 - u->gamma)) - g_nat);
    }
    return params.x0 * std::expm1(0.5 * T / t0 - g_nat);
}

// Cost(tau) = int cost(tau'(t)) dt over [0, T]. Grid clocks are integrated
// with Simpson aligned to their intervals (exact for the quadratic cost on a
// piecewise-linear tau').
inline double cost_of_information(const CostSpec& cost, const InformativeClock& clock,
                                  double T, const QuadratureSpec& quad = {}) {
    validate(cost);
    if (!(T > 0.0)) throw InvalidParams("cost_of_information: T must be > 0");
    detail::require_admissible(clock, T);
    if (clock.is_grid()) {
        const std::vector<double>& t = clock.grid_times();
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < t.size() && t[i] < T; ++i) {
            double lo = t[i];
            double hi = std::min(t[i + 1], T);
            double mid = 0.5 * (lo + hi);
            double f0 = cost_value(cost, clock.eval_derivative(lo));
            double f1 = cost_value(cost, clock.eval_derivative(mid));
            double f2 = cost_value(cost, clock.eval_derivative(hi));
            total += (hi - lo) / 6.0 * (f0 + 4.0 * f1 + f2);
        }
        return total;
    }
    return integrate([&](double t) { return cost_value(cost, clock.eval_derivative(t)); },
                     0.0, T, quad)
        .value;
}

inline InfoValuation net_value(const MarketParams& params, const UtilitySpec& utility,
                               const CostSpec& cost, const InformativeClock& clock,
                               const QuadratureSpec& quad = {}) {
    InfoValuation out;
    out.utility = utility;
    out.value = value_of_information(params, utility, clock, quad);
    out.cost = cost_of_information(cost, clock, params.T, quad);
    out.net = out.value - out.cost;
    out.bound = insider_bound(params, utility, quad);
    return out;
}

} // namespace infoclock
