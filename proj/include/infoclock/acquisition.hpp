#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "infoclock/clock.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/info_econ.hpp"
#include "infoclock/market.hpp"
#include "infoclock/numerics.hpp"

// Optimal information acquisition under the quadratic cost lambda (tau'-1)^2.
// The stationarity condition is tau'' + forcing(t, tau) = 0 with
//   CARA: forcing = 1/(4 beta lambda) / (tau + T - t)^2
//   CRRA: forcing = y/(4 gamma lambda) / (tau - (1-gamma)/gamma (T-t))^2
//   log:  forcing = y/(4 lambda tau^2)          (the gamma -> 1 limit)
// closed as a BVP by tau(0) = t0 and the free-endpoint transversality
// condition cost'(tau'(T)) = 0, i.e. tau'(T) = 1. The slope tau'(0) is found
// by bisection; for CRRA/log the dual weight y is maximized in an outer
// log-spaced golden-section search and polished on its first-order condition.
// Only stationarity is certified: the paper-level result is a necessary
// condition, so solutions are reported with a local (Gateaux) check rather
// than a global-optimality claim.

namespace infoclock {

struct AcquisitionDiagnostics {
    double ode_residual_max = 0.0;    // max |tau''_fd + forcing| over interior nodes
    double ode_residual_scaled = 0.0; // same, scaled by 1/(1 + |forcing|)
    double transversality_gap = 0.0;  // |tau'(T) - 1| of the raw shooting solution
    double el_gateaux_check = 0.0;    // most positive Net(perturbed) - Net(tau*)
};

struct AcquisitionSolution {
    InformativeClock clock; // grid form on the ODE grid
    double shoot_param = 0.0;
    std::optional<double> y_star;
    double value = 0.0;
    double cost = 0.0;
    double net = 0.0;
    AcquisitionDiagnostics diagnostics;
};

struct ElReport {
    double max_residual = 0.0;
    double max_scaled_residual = 0.0;
    bool pass = false;
};

namespace detail {

using Forcing = std::function<double(double t, double tau)>;

inline Forcing make_forcing(const MarketParams& params, const UtilitySpec& utility,
                            double lambda, std::optional<double> y) {
    const double T = params.T;
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        double scale = 1.0 / (4.0 * u->beta * lambda);
        return [scale, T](double t, double tau) {
            double d = tau + T - t;
            return scale / (d * d);
        };
    }
    if (!y.has_value()) {
        throw InvalidParams("acquisition: CRRA/log forcing needs the dual weight y");
    }
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        double A = crra_slope(u->gamma);
        double scale = *y / (4.0 * u->gamma * lambda);
        return [scale, A, T](double t, double tau) {
            double d = tau - A * (T - t);
            return scale / (d * d);
        };
    }
    double scale = *y / (4.0 * lambda);
    return [scale](double, double tau) { return scale / (tau * tau); };
}

struct ShotResult {
    OdeTrajectory traj;
    bool singular = false; // trajectory hit the guarded denominator
};

// Integrate tau'' = -forcing with tau(0) = t0, tau'(0) = slope. A guard keeps
// the CRRA (gamma < 1) denominator and tau itself away from zero during the
// bracketing phase; such shots are reported singular and treated as
// undershoots by the caller.
inline ShotResult shoot(const MarketParams& params, const UtilitySpec& utility,
                        const Forcing& forcing, double slope, const OdeSpec& ode) {
    const double t0 = params.t0();
    const double T = params.T;
    double guard = 1e-9 * t0;
    double A = 0.0;
    if (const Crra* u = std::get_if<Crra>(&utility)) A = crra_slope(u->gamma);
    ShotResult out;
    try {
        double y0[2] = {t0, slope};
        out.traj = solve_ivp(
            [&](double t, std::span<const double> y, std::span<double> dy) {
                double denom = is_cara(utility) ? y[0] + T - t : y[0] - A * (T - t);
                if (!(denom > guard) || !(y[0] > guard)) {
                    throw NearSingular("acquisition: trajectory reached the singular region");
                }
                dy[0] = y[1];
                dy[1] = -forcing(t, y[0]);
            },
            std::span<const double>(y0, 2), 0.0, T, ode);
    } catch (const NearSingular&) {
        out.singular = true;
    } catch (const NonFinite&) {
        out.singular = true;
    }
    return out;
}

// tau'(T) as a function of the initial slope; singular shots count as large
// undershoots so bisection pushes the slope upward.
inline double terminal_slope(const MarketParams& params, const UtilitySpec& utility,
                             const Forcing& forcing, double slope, const OdeSpec& ode) {
    ShotResult shot = shoot(params, utility, forcing, slope, ode);
    if (shot.singular) return -1e300;
    return shot.traj.back()[1];
}

// Bisection on tau'(0) >= 1 for tau'(T) = 1. The forcing is strictly positive
// so tau' decreases along every shot and the terminal slope grows with the
// initial one; the upper end is doubled until it overshoots.
inline double solve_shoot_param(const MarketParams& params, const UtilitySpec& utility,
                                const Forcing& forcing, const OdeSpec& ode) {
    double lo = 1.0;
    double g_lo = terminal_slope(params, utility, forcing, lo, ode) - 1.0;
    if (g_lo >= 0.0) return lo; // forcing numerically zero
    double hi = 2.0;
    double g_hi = terminal_slope(params, utility, forcing, hi, ode) - 1.0;
    int doubling = 0;
    while (g_hi < 0.0) {
        if (++doubling > 60) {
            throw NoBracket("acquisition: could not bracket the shooting slope");
        }
        hi *= 2.0;
        g_hi = terminal_slope(params, utility, forcing, hi, ode) - 1.0;
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double g_mid = terminal_slope(params, utility, forcing, mid, ode) - 1.0;
        if (g_mid == 0.0) return mid;
        if (g_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline InformativeClock clock_of_trajectory(const OdeTrajectory& traj) {
    std::vector<double> t = traj.t;
    std::vector<double> dtau(traj.y.size());
    for (std::size_t i = 0; i < traj.y.size(); ++i) dtau[i] = traj.y[i][1];
    double t0 = traj.y.front()[0];
    return InformativeClock::from_grid(t0, std::move(t), std::move(dtau));
}

// Trapezoid value/cost proxies on the raw ODE grid; used only to rank dual
// candidates inside the outer search. g_nat enters through ln(C2) = g_nat.
inline double search_objective(const MarketParams& params, const UtilitySpec& utility,
                               double lambda, double y, double g_nat,
                               const OdeTrajectory& traj) {
    const double T = params.T;
    const std::size_t n = traj.t.size();
    double g = 0.0;
    double cost = 0.0;
    double prev_g = 0.0, prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = traj.t[i];
        double tau = traj.y[i][0];
        double v = traj.y[i][1];
        double rem = T - t;
        double fg = 0.0;
        if (const Crra* u = std::get_if<Crra>(&utility)) {
            double A = crra_slope(u->gamma);
            fg = v * rem / (tau * (tau - A * rem)) / (2.0 * u->gamma);
        } else {
            fg = 0.5 * v * rem / (tau * tau);
        }
        double fc = lambda * (v - 1.0) * (v - 1.0);
        if (i > 0) {
            double h = traj.t[i] - traj.t[i - 1];
            g += 0.5 * h * (prev_g + fg);
            cost += 0.5 * h * (prev_c + fc);
        }
        prev_g = fg;
        prev_c = fc;
    }
    const double x0 = params.x0;
    return y - y * (std::log(y / x0) + g_nat) + y * g - cost; // the -x0 constant is dropped
}

// Gateaux spot check: smooth bumps vanishing at t = 0 with zero terminal
// derivative, scaled by +-eps. Returns the most positive Net difference.
inline double gateaux_check(const MarketParams& params, const UtilitySpec& utility,
                            const CostSpec& cost, const InformativeClock& clock,
                            double net_base) {
    const double T = params.T;
    const std::vector<double>& t = clock.grid_times();
    const std::vector<double>& dtau = clock.grid_tau_prime();
    const double pi = 3.14159265358979323846;
    double worst = -1e300;
    for (int j = 1; j <= 3; ++j) {
        for (double eps : {1e-3, -1e-3}) {
            std::vector<double> pert(dtau);
            bool admissible = true;
            for (std::size_t i = 0; i < t.size(); ++i) {
                double bp = (j * pi / (2.0 * T)) * std::sin(j * pi * t[i] / T);
                pert[i] += eps * bp;
                if (pert[i] < 1.0 - 1e-9) admissible = false;
            }
            if (!admissible) continue;
            InformativeClock c = InformativeClock::from_grid(clock.t0(), t, std::move(pert));
            double net = net_value(params, utility, cost, c).net;
            worst = std::max(worst, net - net_base);
        }
    }
    return worst;
}

inline AcquisitionDiagnostics diagnostics_for(const MarketParams& params,
                                              const UtilitySpec& utility, double lambda,
                                              std::optional<double> y,
                                              const InformativeClock& clock,
                                              double raw_terminal_slope);

} // namespace detail

// Residuals of the stationarity ODE on a grid clock, with second differences
// for tau''. PASS iff the (1 + |forcing|)-scaled residual stays within 1e-6.
inline ElReport verify_necessary_condition(const InformativeClock& clock,
                                           const MarketParams& params,
                                           const UtilitySpec& utility, double lambda,
                                           std::optional<double> y = {}) {
    if (!clock.is_grid() || clock.grid_times().size() < 256) {
        throw InvalidParams("verify_necessary_condition: need a grid clock with >= 256 points");
    }
    detail::Forcing forcing = detail::make_forcing(params, utility, lambda, y);
    const std::vector<double>& t = clock.grid_times();
    const std::vector<double>& tau = clock.grid_tau();
    ElReport rep;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        double h0 = t[i] - t[i - 1];
        double h1 = t[i + 1] - t[i];
        double second =
            2.0 * ((tau[i + 1] - tau[i]) / h1 - (tau[i] - tau[i - 1]) / h0) / (h0 + h1);
        double f = forcing(t[i], tau[i]);
        double res = std::abs(second + f);
        rep.max_residual = std::max(rep.max_residual, res);
        rep.max_scaled_residual = std::max(rep.max_scaled_residual, res / (1.0 + std::abs(f)));
    }
    rep.pass = rep.max_scaled_residual <= 1e-6;
    return rep;
}

inline AcquisitionSolution solve_cara(const MarketParams& params, double beta, double lambda,
                                      const OdeSpec& ode = {}) {
    if (!(beta > 0.0) || !(lambda > 0.0)) {
        throw InvalidParams("solve_cara: beta and lambda must be > 0");
    }
    params.validate();
    UtilitySpec utility = Cara{beta};
    detail::Forcing forcing = detail::make_forcing(params, utility, lambda, {});
    double s = detail::solve_shoot_param(params, utility, forcing, ode);
    detail::ShotResult shot = detail::shoot(params, utility, forcing, s, ode);
    if (shot.singular) throw SolverFailure("solve_cara: final trajectory is singular");

    AcquisitionSolution out{detail::clock_of_trajectory(shot.traj), s, {}, 0, 0, 0, {}};
    InfoValuation val = net_value(params, utility, QuadraticCost{lambda}, out.clock);
    out.value = val.value;
    out.cost = val.cost;
    out.net = val.net;
    out.diagnostics = detail::diagnostics_for(params, utility, lambda, {}, out.clock,
                                              shot.traj.back()[1]);
    return out;
}

namespace detail {

struct DualSolve {
    double y = 0.0;
    OdeTrajectory traj;
    double shoot_param = 0.0;
};

inline DualSolve inner_solve(const MarketParams& params, const UtilitySpec& utility,
                             double lambda, double y, const OdeSpec& ode) {
    Forcing forcing = make_forcing(params, utility, lambda, y);
    DualSolve out;
    out.y = y;
    out.shoot_param = solve_shoot_param(params, utility, forcing, ode);
    ShotResult shot = shoot(params, utility, forcing, out.shoot_param, ode);
    if (shot.singular) throw SolverFailure("acquisition: dual trajectory is singular");
    out.traj = std::move(shot.traj);
    return out;
}

inline AcquisitionSolution solve_dual(const MarketParams& params, const UtilitySpec& utility,
                                      double lambda, const OdeSpec& ode) {
    validate(params, utility);
    require_well_posed(params, utility);
    if (!(lambda > 0.0)) throw InvalidParams("acquisition: lambda must be > 0");

    const double x0 = params.x0;
    const InformativeClock natural = InformativeClock::natural(params.t0());
    const double g_nat = value_integral(params, utility, natural);
    const double c2 = std::exp(g_nat);

    // coarse grid for the outer search, full resolution for the polish
    OdeSpec search_ode;
    search_ode.steps = std::max(256, ode.steps / 4);
    const double lny_lo = std::log(1e-6 * x0 / c2);
    const double lny_hi = std::log(1e6 * x0 / c2);
    MaximizeResult outer = maximize_1d(
        [&](double lny) {
            DualSolve inner = inner_solve(params, utility, lambda, std::exp(lny), search_ode);
            return search_objective(params, utility, lambda, inner.y, g_nat, inner.traj);
        },
        lny_lo, lny_hi, 1e-6, 17);

    // first-order condition g(tau*_y) = ln(C2 y / x0), polished at full
    // resolution with the production quadrature
    auto foc = [&](double lny) {
        DualSolve inner = inner_solve(params, utility, lambda, std::exp(lny), ode);
        InformativeClock c = clock_of_trajectory(inner.traj);
        return value_integral(params, utility, c) - (g_nat + lny - std::log(x0));
    };
    double step = 1e-3;
    double lo = outer.arg - step;
    double hi = outer.arg + step;
    double f_lo = foc(lo);
    double f_hi = foc(hi);
    int widen = 0;
    while (f_lo * f_hi > 0.0) {
        if (++widen > 30) {
            throw SolverFailure("acquisition: dual first-order condition has no bracket");
        }
        step *= 4.0;
        lo = std::max(outer.arg - step, lny_lo);
        hi = std::min(outer.arg + step, lny_hi);
        f_lo = foc(lo);
        f_hi = foc(hi);
    }
    double lny_star = find_root(foc, {lo, hi}, 1e-12);

    DualSolve final = inner_solve(params, utility, lambda, std::exp(lny_star), ode);
    AcquisitionSolution out{clock_of_trajectory(final.traj), final.shoot_param,
                            std::exp(lny_star), 0, 0, 0, {}};
    InfoValuation val = net_value(params, utility, QuadraticCost{lambda}, out.clock);
    out.value = val.value;
    out.cost = val.cost;
    out.net = val.net;
    out.diagnostics = diagnostics_for(params, utility, lambda, out.y_star, out.clock,
                                      final.traj.back()[1]);
    return out;
}

inline AcquisitionDiagnostics diagnostics_for(const MarketParams& params,
                                              const UtilitySpec& utility, double lambda,
                                              std::optional<double> y,
                                              const InformativeClock& clock,
                                              double raw_terminal_slope) {
    AcquisitionDiagnostics d;
    ElReport rep = verify_necessary_condition(clock, params, utility, lambda, y);
    d.ode_residual_max = rep.max_residual;
    d.ode_residual_scaled = rep.max_scaled_residual;
    d.transversality_gap = std::abs(raw_terminal_slope - 1.0);
    double net_base = net_value(params, utility, QuadraticCost{lambda}, clock).net;
    d.el_gateaux_check = gateaux_check(params, utility, QuadraticCost{lambda}, clock, net_base);
    return d;
}

} // namespace detail

inline AcquisitionSolution solve_crra(const MarketParams& params, double gamma, double x0,
                                      double lambda, const OdeSpec& ode = {}) {
    MarketParams p = params;
    p.x0 = x0;
    return detail::solve_dual(p, Crra{gamma}, lambda, ode);
}

inline AcquisitionSolution solve_log(const MarketParams& params, double x0, double lambda,
                                     const OdeSpec& ode = {}) {
    MarketParams p = params;
    p.x0 = x0;
    return detail::solve_dual(p, LogUtility{}, lambda, ode);
}

// Dispatcher used by the CLI.
inline AcquisitionSolution solve(const MarketParams& params, const UtilitySpec& utility,
                                 double lambda, const OdeSpec& ode = {}) {
    if (const Cara* u = std::get_if<Cara>(&utility)) {
        return solve_cara(params, u->beta, lambda, ode);
    }
    if (const Crra* u = std::get_if<Crra>(&utility)) {
        return solve_crra(params, u->gamma, params.x0, lambda, ode);
    }
    return solve_log(params, params.x0, lambda, ode);
}

// Dual objective y - y ln(C2 y / x0) - x0 + y g(tau) - Cost(tau); at the
// fixed point it equals Net(tau*) exactly.
inline double dual_objective(const MarketParams& params, const UtilitySpec& utility,
                             double lambda, double y, const InformativeClock& clock) {
    if (is_cara(utility)) {
        throw InvalidParams("dual_objective: the CARA problem has no dual weight");
    }
    const double g_nat =
        value_integral(params, utility, InformativeClock::natural(params.t0()));
    const double c2 = std::exp(g_nat);
    const double g = value_integral(params, utility, clock);
    const double cost = cost_of_information(QuadraticCost{lambda}, clock, params.T);
    return y - y * std::log(c2 * y / params.x0) - params.x0 + y * g - cost;
}

} // namespace infoclock
