#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "infoclock/clock.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/market.hpp"

// Conditional-Gaussian filter for the unknown drift. The posterior given
// prices and extra information is N(z, sigma^2/tau); the update below is the
// exact conjugate step for the discretized observation model, with the
// observation dY - sigma*rho*dm carrying drift information at rate q^2 dt,
// q^2 = 1/(1 - rho^2).

namespace infoclock {

struct PosteriorState {
    double t = 0.0;   // time
    double z = 0.0;   // conditional mean E[mu | observations]
    double tau = 0.0; // informative clock value; conditional variance = sigma^2/tau
};

struct ObservationIncrement {
    double dY = 0.0; // log-price increment over [t, t+dt]
    double dm = 0.0; // extra-information increment
    double dt = 0.0; // > 0
};

// Start from the prior: z = mu0, tau = t0, so the variance is sigma0^2.
inline PosteriorState init_posterior(const MarketParams& params) {
    params.validate();
    return {0.0, params.mu0, params.t0()};
}

namespace detail {
inline void check_obs(const PosteriorState& state, const ObservationIncrement& obs,
                      double rho_t) {
    if (!std::isfinite(state.z) || !std::isfinite(state.tau)) {
        throw NonFinite("filter: non-finite posterior state");
    }
    if (!std::isfinite(obs.dY) || !std::isfinite(obs.dm)) {
        throw NonFinite("filter: non-finite observation increment");
    }
    if (!(obs.dt > 0.0)) throw InvalidParams("filter: dt must be > 0");
    if (!(rho_t >= 0.0 && rho_t < 1.0)) {
        throw InvalidParams("filter: rho must lie in [0, 1)");
    }
}
} // namespace detail

// One conjugate-Gaussian step. rho_t is the correlation sampled at the left
// endpoint of the step.
inline PosteriorState update(const PosteriorState& state, const ObservationIncrement& obs,
                             const MarketParams& params, double rho_t) {
    detail::check_obs(state, obs, rho_t);
    const double q2 = 1.0 / (1.0 - rho_t * rho_t);
    const double half_var = 0.5 * params.sigma * params.sigma;
    const double tau_new = state.tau + q2 * obs.dt;
    const double effective = obs.dY - params.sigma * rho_t * obs.dm;
    const double z_new =
        half_var + ((state.z - half_var) * state.tau + q2 * effective) / tau_new;
    if (!std::isfinite(z_new)) throw NonFinite("filter: update produced non-finite mean");
    return {state.t + obs.dt, z_new, tau_new};
}

// Innovation increment dW_bar = (q/sigma) (dY - sigma rho dm - (z - sigma^2/2) dt);
// N(0, dt) under the model.
inline double innovation(const PosteriorState& state, const ObservationIncrement& obs,
                         const MarketParams& params, double rho_t) {
    detail::check_obs(state, obs, rho_t);
    const double q = 1.0 / std::sqrt(1.0 - rho_t * rho_t);
    const double half_var = 0.5 * params.sigma * params.sigma;
    return (q / params.sigma) *
           (obs.dY - params.sigma * rho_t * obs.dm - (state.z - half_var) * obs.dt);
}

// Rolling realized correlation |rho_hat| of the increments of Y and m over a
// trailing window, clamped to [0, 1 - kRhoCap]. Paths must sit on a common
// uniform grid. The estimate at t[j] uses increments j-window .. j-1; before
// the first full window the profile extends its first value.
inline CorrelationProfile estimate_correlation(std::span<const double> t,
                                               std::span<const double> Y,
                                               std::span<const double> m,
                                               int window) {
    if (window < 8) throw InvalidParams("estimate_correlation: window must be >= 8");
    const std::size_t n = t.size();
    if (n != Y.size() || n != m.size() || n < static_cast<std::size_t>(window) + 1) {
        throw InvalidParams("estimate_correlation: need aligned paths longer than the window");
    }
    const std::size_t n_inc = n - 1;
    std::vector<double> dY(n_inc), dm(n_inc);
    for (std::size_t i = 0; i < n_inc; ++i) {
        dY[i] = Y[i + 1] - Y[i];
        dm[i] = m[i + 1] - m[i];
    }
    std::vector<double> tt, rho;
    tt.reserve(n_inc - window + 1);
    rho.reserve(n_inc - window + 1);
    double syy = 0.0, smm = 0.0, sym = 0.0;
    for (std::size_t i = 0; i < n_inc; ++i) {
        syy += dY[i] * dY[i];
        smm += dm[i] * dm[i];
        sym += dY[i] * dm[i];
        if (i + 1 >= static_cast<std::size_t>(window)) {
            if (i + 1 > static_cast<std::size_t>(window)) {
                std::size_t j = i - window;
                syy -= dY[j] * dY[j];
                smm -= dm[j] * dm[j];
                sym -= dY[j] * dm[j];
            }
            if (!(syy > 0.0) || !(smm > 0.0)) {
                throw DegenerateWindow("estimate_correlation: zero realized variance in window");
            }
            double r = std::abs(sym / std::sqrt(syy * smm));
            tt.push_back(t[i + 1]);
            rho.push_back(std::min(r, 1.0 - kRhoCap));
        }
    }
    return CorrelationProfile::grid(std::move(tt), std::move(rho));
}

} // namespace infoclock
