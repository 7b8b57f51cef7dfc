#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "infoclock/clock.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/market.hpp"
#include "infoclock/numerics.hpp"

// Closed-form value functions V(t,x,z) and optimal strategies for CARA, CRRA
// and log utility. Everything reduces to psi(t,z) = a(t)(z-r)^2/2 + c(t) with
// a in closed form and c the integral of a clock-dependent kernel. c is
// computed by quadrature of that kernel; an independent Riccati residual test
// guards the transcription.

namespace infoclock {

namespace detail {

// (1-gamma)/gamma, the factor weighting remaining time against the clock.
inline double crra_slope(double gamma) { return (1.0 - gamma) / gamma; }

inline void require_finite_clock(const InformativeClock& clock) {
    if (clock.is_insider()) {
        throw InadmissibleClock("closed_form: tau(T) is infinite; use the insider-limit "
                                "analytics in info_econ");
    }
}

} // namespace detail

// a(t) per utility family.
inline double a_function(const MarketParams& params, const UtilitySpec& utility,
                         const InformativeClock& clock, double t) {
    detail::require_finite_clock(clock);
    const double sig2 = params.sigma * params.sigma;
    const double rem = params.T - t;
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        double tau = clock.eval(t);
        return tau * rem / ((tau + rem) * u->beta * sig2);
    }
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        double tau = clock.eval(t);
        double A = detail::crra_slope(u->gamma);
        return tau * A * rem / ((tau - A * rem) * u->gamma * sig2);
    }
    return rem / sig2;
}

// Integrand of c(t); positive for CARA/log, sign of (1-gamma) for CRRA.
inline double c_integrand(const MarketParams& params, const UtilitySpec& utility,
                          const InformativeClock& clock, double s) {
    const double rem = params.T - s;
    const double tau = clock.eval(s);
    const double dtau = clock.eval_derivative(s);
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        return dtau * rem / (tau * (tau + rem)) / (2.0 * u->beta);
    }
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        double A = detail::crra_slope(u->gamma);
        return dtau * A * rem / (tau * (tau - A * rem)) / (2.0 * u->gamma);
    }
    return 0.5 * dtau * rem / (tau * tau);
}

// c(t) by adaptive quadrature; smooth in t, used by residual tests and spot
// checks. coefficients() below builds the production grid.
inline double c_function(const MarketParams& params, const UtilitySpec& utility,
                         const InformativeClock& clock, double t,
                         const QuadratureSpec& quad = {}) {
    detail::require_finite_clock(clock);
    return integrate([&](double s) { return c_integrand(params, utility, clock, s); }, t,
                     params.T, quad)
        .value;
}

struct StrategyQuery {
    double t = 0.0; // in [0, T]
    double x = 0.0; // wealth; > 0 for CRRA/log
    double z = 0.0; // posterior mean
};

struct ValueCoefficients {
    UtilitySpec utility;
    MarketParams params;
    InformativeClock clock;
    std::vector<double> t; // uniform grid on [0, T]
    std::vector<double> a;
    std::vector<double> c;

    double a_at(double tq) const { return interp(a, tq); }
    double c_at(double tq) const { return interp(c, tq); }

    double psi(double tq, double z) const {
        double d = z - params.r;
        return 0.5 * a_at(tq) * d * d + c_at(tq);
    }

private:
    double interp(const std::vector<double>& v, double tq) const {
        if (tq < -1e-12 || tq > params.T * (1.0 + 1e-12)) {
            throw OutOfDomain("coefficients: query time outside [0, T]");
        }
        double h = t[1] - t[0];
        std::size_t i = std::min(static_cast<std::size_t>(std::max(tq, 0.0) / h),
                                 t.size() - 2);
        double w = (tq - t[i]) / h;
        w = std::min(std::max(w, 0.0), 1.0);
        return v[i] * (1.0 - w) + v[i + 1] * w;
    }
};

// Builds a(t) by direct formula and c(t) by cumulative per-interval Simpson
// from the terminal condition c(T) = 0. Throws IllPosedProblem for the
// unbounded CRRA regime and NearSingular when the CRRA (gamma < 1)
// denominator degenerates along the grid.
inline ValueCoefficients coefficients(const MarketParams& params, const UtilitySpec& utility,
                                      const InformativeClock& clock, int grid_points = 4097) {
    validate(params, utility);
    require_well_posed(params, utility);
    detail::require_finite_clock(clock);
    if (grid_points < 1024) {
        throw InvalidParams("coefficients: need at least 1024 grid points");
    }

    ValueCoefficients out{utility, params, clock, {}, {}, {}};
    const int n = grid_points - 1;
    out.t.resize(grid_points);
    out.a.resize(grid_points);
    out.c.resize(grid_points);
    for (int i = 0; i <= n; ++i) {
        out.t[i] = params.T * i / n;
    }

    if (const Crra* u = std::get_if<Crra>(&utility); u && u->gamma < 1.0) {
        double A = detail::crra_slope(u->gamma);
        double floor = 1e-9 * clock.eval(0.0);
        for (int i = 0; i <= n; ++i) {
            double d = clock.eval(out.t[i]) - A * (params.T - out.t[i]);
            if (d < floor) {
                throw NearSingular("coefficients: tau(s) - (1-gamma)/gamma (T-s) "
                                   "degenerates on the grid");
            }
        }
    }

    for (int i = 0; i <= n; ++i) {
        out.a[i] = a_function(params, utility, clock, out.t[i]);
    }
    out.c[n] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        double lo = out.t[i];
        double hi = out.t[i + 1];
        double mid = 0.5 * (lo + hi);
        double f0 = c_integrand(params, utility, clock, lo);
        double f1 = c_integrand(params, utility, clock, mid);
        double f2 = c_integrand(params, utility, clock, hi);
        out.c[i] = out.c[i + 1] + (hi - lo) / 6.0 * (f0 + 4.0 * f1 + f2);
    }
    return out;
}

// Optimal amount in the risky asset at (t, x, z) given the current clock
// value tau. CARA is independent of wealth; CRRA/log scale linearly in it.
inline double optimal_amount(const MarketParams& params, const UtilitySpec& utility,
                             double t, double x, double z, double tau) {
    const double sig2 = params.sigma * params.sigma;
    const double rem = params.T - t;
    const double excess = z - params.r;
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        return std::exp(-params.r * rem) / u->beta * (tau / (tau + rem)) * excess / sig2;
    }
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        return tau / (u->gamma * tau - (1.0 - u->gamma) * rem) * excess / sig2 * x;
    }
    return excess / sig2 * x;
}

inline double value(const ValueCoefficients& coeffs, const StrategyQuery& q) {
    const MarketParams& p = coeffs.params;
    const double grow = std::exp(p.r * (p.T - q.t));
    const double psi = coeffs.psi(q.t, q.z);
    if (const Cara* u = std::get_if<Cara>(&coeffs.utility)) {
        return -std::exp(-u->beta * (grow * q.x + psi)) / u->beta;
    }
    if (!(q.x > 0.0)) {
        throw DomainError("value: CRRA/log utility requires positive wealth");
    }
    if (const Crra* u = std::get_if<Crra>(&coeffs.utility)) {
        double g = u->gamma;
        return std::pow(grow * q.x, 1.0 - g) / (1.0 - g) * std::exp(g * psi);
    }
    return p.r * (p.T - q.t) + std::log(q.x) + psi;
}

inline double optimal_strategy(const ValueCoefficients& coeffs, const StrategyQuery& q) {
    if (!is_cara(coeffs.utility) && !(q.x > 0.0)) {
        throw DomainError("optimal_strategy: CRRA/log utility requires positive wealth");
    }
    return optimal_amount(coeffs.params, coeffs.utility, q.t, q.x, q.z,
                          coeffs.clock.eval(q.t));
}

struct ClassicalLimit {
    double value = 0.0;
    double strategy = 0.0;
};

// Known-drift limit tau = infinity: the CARA multiplier tends to 1, the CRRA
// one to 1/gamma, and c vanishes.
inline ClassicalLimit classical_limit(const MarketParams& params, const UtilitySpec& utility,
                                      double t, double x, double z) {
    validate(params, utility);
    require_well_posed(params, utility);
    const double sig2 = params.sigma * params.sigma;
    const double rem = params.T - t;
    const double excess = z - params.r;
    const double grow = std::exp(params.r * rem);
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        double a_inf = rem / (u->beta * sig2);
        double psi = 0.5 * a_inf * excess * excess;
        return {-std::exp(-u->beta * (grow * x + psi)) / u->beta,
                std::exp(-params.r * rem) * excess / (u->beta * sig2)};
    }
    if (!(x > 0.0)) throw DomainError("classical_limit: CRRA/log requires positive wealth");
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        double g = u->gamma;
        double a_inf = (1.0 - g) * rem / (g * g * sig2);
        double psi = 0.5 * a_inf * excess * excess;
        return {std::pow(grow * x, 1.0 - g) / (1.0 - g) * std::exp(g * psi),
                excess / (g * sig2) * x};
    }
    double a_inf = rem / sig2;
    double psi = 0.5 * a_inf * excess * excess;
    return {params.r * rem + std::log(x) + psi, excess / sig2 * x};
}

// Closed-form E[U(X_T^k)] / U(e^{rT} x0) for the constant-fraction strategy
// pi = k X in the unbounded CRRA regime; diverges as k grows, witnessing the
// ill-posedness.
inline std::vector<double> illposed_divergence_witness(const MarketParams& params,
                                                       double gamma,
                                                       const std::vector<double>& k_list) {
    UtilitySpec u = Crra{gamma};
    validate(params, u);
    if (classify(params, u).well_posed) {
        throw InvalidParams("illposed_divergence_witness: configuration is well-posed");
    }
    const double sig2 = params.sigma * params.sigma;
    const double T = params.T;
    const double one_mg = 1.0 - gamma;
    const double coeff = 0.5 * one_mg * one_mg * sig2 * T *
                         (T / params.t0() - gamma / one_mg);
    std::vector<double> out;
    out.reserve(k_list.size());
    for (double k : k_list) {
        out.push_back(std::exp(one_mg * k * (params.mu0 - params.r) * T + coeff * k * k));
    }
    return out;
}

} // namespace infoclock
