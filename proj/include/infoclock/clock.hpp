#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "infoclock/errors.hpp"
#include "infoclock/numerics.hpp"

// The informative clock tau(t) = t0 + integral of q(s)^2 ds with
// q(s) = 1/sqrt(1 - rho(s)^2), and its bidirectional relationship with the
// correlation profile rho. tau measures cumulative information about the
// drift like an effective sample size; the natural clock tau = t0 + t is what
// price observation alone achieves.

namespace infoclock {

inline constexpr double kRhoCap = 1e-6; // profiles must keep rho <= 1 - kRhoCap

class InformativeClock;

// Deterministic correlation profile rho: [0,T] -> [0,1). Negative inputs are
// mapped to |rho| (sign carries no information). Stored as a constant, a
// linearly interpolated sample grid, or a view induced by a clock.
class CorrelationProfile {
public:
    static CorrelationProfile constant(double rho) {
        rho = std::abs(rho);
        check_sample(rho);
        CorrelationProfile p;
        p.repr_ = Constant{rho};
        return p;
    }

    static CorrelationProfile grid(std::vector<double> t, std::vector<double> rho) {
        if (t.size() < 2 || t.size() != rho.size()) {
            throw InvalidParams("correlation profile: need matching t/rho grids of size >= 2");
        }
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (!(t[i] > t[i - 1])) {
                throw InvalidParams("correlation profile: t grid must be strictly increasing");
            }
        }
        for (double& v : rho) {
            v = std::abs(v);
            check_sample(v);
        }
        CorrelationProfile p;
        p.repr_ = Grid{std::move(t), std::move(rho)};
        return p;
    }

    static CorrelationProfile induced_by_clock(std::shared_ptr<const InformativeClock> clock);

    double rho(double t) const;

    double max_rho() const {
        if (const Constant* c = std::get_if<Constant>(&repr_)) return c->value;
        if (const Grid* g = std::get_if<Grid>(&repr_)) {
            return *std::max_element(g->rho.begin(), g->rho.end());
        }
        return 1.0 - kRhoCap; // induced profiles are admissible by construction
    }

private:
    struct Constant {
        double value;
    };
    struct Grid {
        std::vector<double> t;
        std::vector<double> rho;
    };
    struct Induced {
        std::shared_ptr<const InformativeClock> clock;
    };

    static void check_sample(double rho) {
        if (!std::isfinite(rho) || rho > 1.0 - kRhoCap) {
            throw InadmissibleProfile("correlation profile: rho samples must stay within 1 - " +
                                      std::to_string(kRhoCap));
        }
    }

    std::variant<Constant, Grid, Induced> repr_;
};

struct AdmissibilityReport {
    bool finite = true;
    double tau_T = 0.0; // meaningful only when finite
};

// tau(t) with derivative, inverse and admissibility checks. Grid clocks store
// derivative samples with linear interpolation; the cumulative integral of
// that interpolant is exact (trapezoid), so tau' >= 1 is preserved by
// representation. The insider marker stands for tau = +infinity and is only
// usable through the limit analytics.
class InformativeClock {
public:
    static InformativeClock natural(double t0) {
        InformativeClock c(t0);
        c.form_ = Natural{};
        return c;
    }

    static InformativeClock linear(double t0, double k) {
        if (!(k >= 1.0)) throw InvalidParams("clock: linear slope k must be >= 1");
        InformativeClock c(t0);
        if (k == 1.0) {
            c.form_ = Natural{};
        } else {
            c.form_ = Linear{k};
        }
        return c;
    }

    // Derivative samples on a strictly increasing grid starting at 0. Samples
    // within 1e-9 below 1 are clamped to 1 (shooting solvers land there);
    // anything lower is rejected.
    static InformativeClock from_grid(double t0, std::vector<double> t,
                                      std::vector<double> tau_prime) {
        if (t.size() < 2 || t.size() != tau_prime.size()) {
            throw InvalidParams("clock: need matching t/tau_prime grids of size >= 2");
        }
        if (t.front() != 0.0) {
            throw InvalidParams("clock: derivative grid must start at t = 0");
        }
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (!(t[i] > t[i - 1])) {
                throw InvalidParams("clock: derivative grid must be strictly increasing");
            }
        }
        for (double& v : tau_prime) {
            if (!(v >= 1.0 - 1e-9) || !std::isfinite(v)) {
                throw InvalidParams("clock: tau_prime samples must be >= 1");
            }
            v = std::max(v, 1.0);
        }
        InformativeClock c(t0);
        GridForm g;
        g.t = std::move(t);
        g.dtau = std::move(tau_prime);
        g.tau.resize(g.t.size());
        g.tau[0] = t0;
        for (std::size_t i = 1; i < g.t.size(); ++i) {
            g.tau[i] = g.tau[i - 1] +
                       0.5 * (g.dtau[i - 1] + g.dtau[i]) * (g.t[i] - g.t[i - 1]);
        }
        double h0 = g.t[1] - g.t[0];
        g.uniform = true;
        for (std::size_t i = 1; i + 1 < g.t.size(); ++i) {
            if (std::abs((g.t[i + 1] - g.t[i]) - h0) > 1e-12 * std::max(1.0, h0)) {
                g.uniform = false;
                break;
            }
        }
        g.h = h0;
        c.form_ = std::move(g);
        return c;
    }

    static InformativeClock insider(double t0) {
        InformativeClock c(t0);
        c.form_ = Insider{};
        return c;
    }

    double t0() const { return t0_; }
    bool is_insider() const { return std::holds_alternative<Insider>(form_); }
    bool is_natural() const { return std::holds_alternative<Natural>(form_); }
    bool is_grid() const { return std::holds_alternative<GridForm>(form_); }

    // Grid clocks are only defined up to their last node; unbounded otherwise.
    double domain_end() const {
        if (const GridForm* g = std::get_if<GridForm>(&form_)) return g->t.back();
        return std::numeric_limits<double>::infinity();
    }

    double eval(double t) const {
        check_time(t);
        if (std::holds_alternative<Natural>(form_)) return t0_ + t;
        if (const Linear* l = std::get_if<Linear>(&form_)) return t0_ + l->k * t;
        if (is_insider()) {
            throw InadmissibleClock("clock: insider marker has no finite tau; "
                                    "use the insider-limit analytics");
        }
        const GridForm& g = std::get<GridForm>(form_);
        std::size_t i = g.locate(t);
        double s = t - g.t[i];
        double slope = (g.dtau[i + 1] - g.dtau[i]) / (g.t[i + 1] - g.t[i]);
        return g.tau[i] + g.dtau[i] * s + 0.5 * slope * s * s;
    }

    double eval_derivative(double t) const {
        check_time(t);
        if (std::holds_alternative<Natural>(form_)) return 1.0;
        if (const Linear* l = std::get_if<Linear>(&form_)) return l->k;
        if (is_insider()) {
            throw InadmissibleClock("clock: insider marker has no finite tau'");
        }
        const GridForm& g = std::get<GridForm>(form_);
        std::size_t i = g.locate(t);
        double s = t - g.t[i];
        double slope = (g.dtau[i + 1] - g.dtau[i]) / (g.t[i + 1] - g.t[i]);
        return g.dtau[i] + slope * s;
    }

    // Inverse map on [t0, tau(domain_end)]. Exact per-interval quadratic solve
    // for grid clocks; round-trips with eval to floating-point resolution.
    double eval_inverse(double u) const {
        if (!std::isfinite(u)) throw OutOfDomain("clock: inverse query must be finite");
        if (u < t0_ - 1e-9 * std::max(1.0, t0_)) {
            throw OutOfDomain("clock: inverse query below tau(0) = t0");
        }
        u = std::max(u, t0_);
        if (std::holds_alternative<Natural>(form_)) return u - t0_;
        if (const Linear* l = std::get_if<Linear>(&form_)) return (u - t0_) / l->k;
        if (is_insider()) {
            throw InadmissibleClock("clock: insider marker is not invertible");
        }
        const GridForm& g = std::get<GridForm>(form_);
        if (u > g.tau.back() + 1e-9 * std::max(1.0, g.tau.back())) {
            throw OutOfDomain("clock: inverse query above tau(T)");
        }
        u = std::min(u, g.tau.back());
        std::size_t i =
            std::upper_bound(g.tau.begin(), g.tau.end(), u) - g.tau.begin();
        i = (i == 0) ? 0 : std::min(i - 1, g.tau.size() - 2);
        double c = u - g.tau[i];
        double b = g.dtau[i];
        double slope = (g.dtau[i + 1] - g.dtau[i]) / (g.t[i + 1] - g.t[i]);
        // smaller root of slope/2 s^2 + b s - c = 0 in a cancellation-safe form
        double disc = b * b + 2.0 * slope * c;
        double s = 2.0 * c / (b + std::sqrt(std::max(disc, 0.0)));
        return g.t[i] + s;
    }

    const std::vector<double>& grid_times() const { return grid().t; }
    const std::vector<double>& grid_tau() const { return grid().tau; }
    const std::vector<double>& grid_tau_prime() const { return grid().dtau; }

private:
    struct Natural {};
    struct Linear {
        double k;
    };
    struct GridForm {
        std::vector<double> t;
        std::vector<double> dtau;
        std::vector<double> tau;
        bool uniform = false;
        double h = 0.0;

        std::size_t locate(double x) const {
            if (x >= t.back()) return t.size() - 2;
            if (x <= t.front()) return 0;
            if (uniform) {
                std::size_t i = static_cast<std::size_t>((x - t.front()) / h);
                i = std::min(i, t.size() - 2);
                // guard against rounding at interval edges
                if (x < t[i]) --i;
                else if (x >= t[i + 1]) ++i;
                return i;
            }
            std::size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin();
            return std::min(i - 1, t.size() - 2);
        }
    };
    struct Insider {};

    explicit InformativeClock(double t0) : t0_(t0) {
        if (!(t0 > 0.0) || !std::isfinite(t0)) {
            throw InvalidParams("clock: t0 must be finite and > 0");
        }
    }

    void check_time(double t) const {
        if (!std::isfinite(t) || t < -1e-12) {
            throw OutOfDomain("clock: time query must be finite and >= 0");
        }
        if (const GridForm* g = std::get_if<GridForm>(&form_)) {
            if (t > g->t.back() + 1e-9 * std::max(1.0, g->t.back())) {
                throw OutOfDomain("clock: time query beyond the grid end");
            }
        }
    }

    const GridForm& grid() const {
        const GridForm* g = std::get_if<GridForm>(&form_);
        if (!g) throw InvalidParams("clock: grid accessor on a non-grid clock");
        return *g;
    }

    double t0_ = 0.0;
    std::variant<Natural, Linear, GridForm, Insider> form_;
};

inline CorrelationProfile CorrelationProfile::induced_by_clock(
    std::shared_ptr<const InformativeClock> clock) {
    if (!clock) throw InvalidParams("correlation profile: null clock");
    if (clock->is_insider()) {
        throw InadmissibleProfile("correlation profile: insider clock has rho = 1");
    }
    CorrelationProfile p;
    p.repr_ = Induced{std::move(clock)};
    return p;
}

inline double CorrelationProfile::rho(double t) const {
    if (const Constant* c = std::get_if<Constant>(&repr_)) return c->value;
    if (const Grid* g = std::get_if<Grid>(&repr_)) {
        if (t <= g->t.front()) return g->rho.front();
        if (t >= g->t.back()) return g->rho.back();
        std::size_t i = std::upper_bound(g->t.begin(), g->t.end(), t) - g->t.begin() - 1;
        i = std::min(i, g->t.size() - 2);
        double w = (t - g->t[i]) / (g->t[i + 1] - g->t[i]);
        return g->rho[i] * (1.0 - w) + g->rho[i + 1] * w;
    }
    const Induced& ind = std::get<Induced>(repr_);
    double q2 = ind.clock->eval_derivative(t);
    return std::sqrt(std::max(0.0, 1.0 - 1.0 / q2));
}

// tau(t) = t0 + integral of 1/(1 - rho(s)^2) ds, realized as a grid clock with
// derivative samples q^2 on a uniform grid (n_intervals + 1 nodes over [0,T]).
inline InformativeClock clock_from_correlation(const CorrelationProfile& profile,
                                               double t0, double T,
                                               int n_intervals = 4096) {
    if (!(T > 0.0)) throw InvalidParams("clock_from_correlation: T must be > 0");
    if (n_intervals < 2) throw InvalidParams("clock_from_correlation: need >= 2 intervals");
    std::vector<double> t(n_intervals + 1), q2(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) {
        t[i] = T * i / n_intervals;
        double rho = profile.rho(t[i]);
        if (!(rho < 1.0 - kRhoCap)) {
            throw InadmissibleProfile("clock_from_correlation: rho(t) reaches the cap at t=" +
                                      std::to_string(t[i]));
        }
        q2[i] = 1.0 / (1.0 - rho * rho);
    }
    return InformativeClock::from_grid(t0, std::move(t), std::move(q2));
}

// rho(t) = sqrt(1 - 1/tau'(t)).
inline CorrelationProfile correlation_from_clock(const InformativeClock& clock) {
    if (clock.is_insider()) {
        throw InadmissibleClock("correlation_from_clock: insider clock has rho = 1");
    }
    if (clock.is_grid()) {
        const std::vector<double>& t = clock.grid_times();
        std::vector<double> rho(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            rho[i] = std::sqrt(std::max(0.0, 1.0 - 1.0 / clock.grid_tau_prime()[i]));
        }
        return CorrelationProfile::grid(t, std::move(rho));
    }
    double q2 = clock.eval_derivative(0.0);
    return CorrelationProfile::constant(std::sqrt(std::max(0.0, 1.0 - 1.0 / q2)));
}

// Assumption "finite information over [0,T]", rendered as tau(T) < infinity.
inline AdmissibilityReport check_admissible(const InformativeClock& clock, double T) {
    if (clock.is_insider()) return {false, 0.0};
    return {true, clock.eval(T)};
}

} // namespace infoclock
