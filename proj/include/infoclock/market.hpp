#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "infoclock/errors.hpp"

// Domain types shared by every other module: market constants, utility
// families with their well-posedness classification, and acquisition-cost
// specifications.

namespace infoclock {

struct MarketParams {
    double r = 0.0;         // risk-free rate, per unit time
    double sigma = 0.0;     // volatility, per sqrt(time), > 0
    double mu0 = 0.0;       // prior drift mean
    double sigma0_sq = 0.0; // prior drift variance, > 0
    double T = 0.0;         // horizon, > 0
    double x0 = 0.0;        // initial wealth (> 0 required for CRRA/log)

    // Information volume of the prior, measured in time units.
    double t0() const { return sigma * sigma / sigma0_sq; }

    void validate() const {
        if (!(sigma > 0.0)) throw InvalidParams("market: sigma must be > 0");
        if (!(sigma0_sq > 0.0)) throw InvalidParams("market: sigma0_sq must be > 0");
        if (!(T > 0.0)) throw InvalidParams("market: T must be > 0");
        double t0v = t0();
        if (!std::isfinite(t0v) || !(t0v > 0.0)) {
            throw InvalidParams("market: t0 = sigma^2/sigma0_sq must be finite and > 0");
        }
        if (!std::isfinite(r) || !std::isfinite(mu0) || !std::isfinite(x0)) {
            throw InvalidParams("market: parameters must be finite");
        }
    }
};

inline double derive_t0(const MarketParams& params) {
    params.validate();
    return params.t0();
}

struct Cara {
    double beta = 0.0; // absolute risk aversion, > 0
};

struct Crra {
    double gamma = 0.0; // relative risk aversion, > 0 and != 1
};

struct LogUtility {};

using UtilitySpec = std::variant<Cara, Crra, LogUtility>;

inline bool is_cara(const UtilitySpec& u) { return std::holds_alternative<Cara>(u); }
inline bool is_crra(const UtilitySpec& u) { return std::holds_alternative<Crra>(u); }
inline bool is_log(const UtilitySpec& u) { return std::holds_alternative<LogUtility>(u); }

inline void validate(const UtilitySpec& u) {
    if (const Cara* c = std::get_if<Cara>(&u)) {
        if (!(c->beta > 0.0)) throw InvalidParams("utility: CARA beta must be > 0");
    } else if (const Crra* c = std::get_if<Crra>(&u)) {
        if (!(c->gamma > 0.0)) throw InvalidParams("utility: CRRA gamma must be > 0");
        if (c->gamma == 1.0) throw InvalidParams("utility: CRRA gamma must differ from 1 (use log)");
    }
}

// Joint validation: CRRA and log utilities are undefined for nonpositive wealth.
inline void validate(const MarketParams& params, const UtilitySpec& utility) {
    params.validate();
    validate(utility);
    if (!is_cara(utility) && !(params.x0 > 0.0)) {
        throw InvalidParams("market: x0 must be > 0 for CRRA/log utility");
    }
}

// U(x) for a terminal wealth x.
inline double utility_value(const UtilitySpec& u, double x) {
    if (const Cara* c = std::get_if<Cara>(&u)) {
        return -std::exp(-c->beta * x) / c->beta;
    }
    if (const Crra* c = std::get_if<Crra>(&u)) {
        if (!(x > 0.0)) throw DomainError("CRRA utility requires positive wealth");
        return std::pow(x, 1.0 - c->gamma) / (1.0 - c->gamma);
    }
    if (!(x > 0.0)) throw DomainError("log utility requires positive wealth");
    return std::log(x);
}

struct WellPosedness {
    bool well_posed = true;
    std::string reason;
};

// CRRA with 0 < gamma < 1 is well-posed iff t0/T > (1-gamma)/gamma; the
// boundary case counts as ill-posed. CARA, log and CRRA gamma > 1 are always
// well-posed.
inline WellPosedness classify(const MarketParams& params, const UtilitySpec& utility) {
    params.validate();
    validate(utility);
    if (const Crra* c = std::get_if<Crra>(&utility)) {
        if (c->gamma < 1.0) {
            double lhs = params.t0() / params.T;
            double rhs = (1.0 - c->gamma) / c->gamma;
            if (lhs <= rhs) {
                return {false,
                        "CRRA value function is infinite: t0/T = " + std::to_string(lhs) +
                            " <= (1-gamma)/gamma = " + std::to_string(rhs)};
            }
        }
    }
    return {true, ""};
}

inline void require_well_posed(const MarketParams& params, const UtilitySpec& utility) {
    WellPosedness w = classify(params, utility);
    if (!w.well_posed) throw IllPosedProblem(w.reason);
}

// Quadratic acquisition cost lambda*(x-1)^2, the built-in template.
struct QuadraticCost {
    double lambda = 1.0; // relative ability of acquiring information, > 0
};

// Tabulated increasing convex cost on [1, inf) with cost(1) = 0, linearly
// interpolated and linearly extrapolated beyond the last node.
struct TabulatedCost {
    std::vector<double> x; // nodes, strictly increasing, x.front() == 1
    std::vector<double> c; // values, c.front() == 0
};

using CostSpec = std::variant<QuadraticCost, TabulatedCost>;

inline void validate(const CostSpec& spec) {
    if (const QuadraticCost* q = std::get_if<QuadraticCost>(&spec)) {
        if (!(q->lambda > 0.0)) throw InvalidParams("cost: lambda must be > 0");
        return;
    }
    const TabulatedCost& t = std::get<TabulatedCost>(spec);
    if (t.x.size() < 2 || t.x.size() != t.c.size()) {
        throw InvalidParams("cost: tabulated spec needs matching x/c arrays of size >= 2");
    }
    if (t.x.front() != 1.0 || t.c.front() != 0.0) {
        throw InvalidParams("cost: tabulated spec must start at (1, 0)");
    }
    double prev_slope = 0.0;
    for (std::size_t i = 1; i < t.x.size(); ++i) {
        double dx = t.x[i] - t.x[i - 1];
        if (!(dx > 0.0)) throw InvalidParams("cost: tabulated nodes must be strictly increasing");
        double slope = (t.c[i] - t.c[i - 1]) / dx;
        if (slope < 0.0) throw InvalidParams("cost: tabulated values must be nondecreasing");
        if (slope + 1e-12 < prev_slope) {
            throw InvalidParams("cost: tabulated values must be convex");
        }
        prev_slope = slope;
    }
}

// cost(x) for a clock derivative x >= 1.
inline double cost_value(const CostSpec& spec, double x) {
    if (const QuadraticCost* q = std::get_if<QuadraticCost>(&spec)) {
        return q->lambda * (x - 1.0) * (x - 1.0);
    }
    const TabulatedCost& t = std::get<TabulatedCost>(spec);
    if (x <= t.x.front()) return t.c.front();
    std::size_t i = 1;
    while (i + 1 < t.x.size() && t.x[i] < x) ++i;
    double slope = (t.c[i] - t.c[i - 1]) / (t.x[i] - t.x[i - 1]);
    return t.c[i - 1] + slope * (x - t.x[i - 1]);
}

} // namespace infoclock
