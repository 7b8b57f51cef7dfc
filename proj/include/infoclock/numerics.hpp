#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "infoclock/errors.hpp"

// Deterministic numerical kernels shared by every module: composite-Simpson
// quadrature, fixed-step RK4, bisection root finding and golden-section
// maximization. All default tolerances live here so tests can reference one
// place.

namespace infoclock {

struct QuadratureSpec {
    int panels = 32;               // initial panel count, even, >= 2
    double rel_tol = 1e-10;        // successive-refinement relative change
    int max_panels = 1 << 20;      // doubling cap
};

struct QuadratureResult {
    double value = 0.0;
    bool converged = false;
    int panels = 0;
};

namespace detail {

inline double simpson_pass(const std::function<double(double)>& f, double a,
                           double b, int panels) {
    const double h = (b - a) / panels;
    double end_sum = 0.0;
    double mid_sum = 0.0;
    auto eval = [&](double x) {
        double v = f(x);
        if (!std::isfinite(v)) {
            throw NonFinite("integrand returned a non-finite value at x=" +
                            std::to_string(x));
        }
        return v;
    };
    end_sum += eval(a) + eval(b);
    for (int i = 1; i < panels; ++i) {
        end_sum += 2.0 * eval(a + i * h);
    }
    for (int i = 0; i < panels; ++i) {
        mid_sum += 4.0 * eval(a + (i + 0.5) * h);
    }
    return (end_sum + mid_sum) * h / 6.0;
}

} // namespace detail

// Composite Simpson with panel doubling until two successive refinements both
// change by no more than spec.rel_tol (relative), or the panel cap is reached
// (converged=false in that case).
inline QuadratureResult integrate(const std::function<double(double)>& f,
                                  double a, double b,
                                  const QuadratureSpec& spec = {}) {
    if (!(a <= b)) {
        throw InvalidParams("integrate: requires a <= b");
    }
    if (spec.panels < 2 || spec.panels % 2 != 0) {
        throw InvalidParams("integrate: panels must be even and >= 2");
    }
    if (a == b) {
        return {0.0, true, spec.panels};
    }
    int panels = spec.panels;
    double prev = detail::simpson_pass(f, a, b, panels);
    int agreements = 0;
    while (panels < spec.max_panels) {
        panels *= 2;
        double cur = detail::simpson_pass(f, a, b, panels);
        double scale = std::max(std::abs(cur), std::abs(prev));
        double change = std::abs(cur - prev);
        prev = cur;
        if (change <= spec.rel_tol * scale || scale == 0.0) {
            if (++agreements >= 2) {
                return {cur, true, panels};
            }
        } else {
            agreements = 0;
        }
    }
    return {prev, false, panels};
}

struct OdeSpec {
    int steps = 4096; // fixed-step RK4 step count, >= 16
};

using OdeRhs = std::function<void(double t, std::span<const double> y,
                                  std::span<double> dydt)>;

struct OdeTrajectory {
    std::vector<double> t;               // uniform grid, steps+1 nodes
    std::vector<std::vector<double>> y;  // state per node

    const std::vector<double>& back() const { return y.back(); }
};

// Classical fourth-order Runge-Kutta on a uniform grid. Deterministic for
// fixed inputs; throws NonFinite on blow-up.
inline OdeTrajectory solve_ivp(const OdeRhs& rhs, std::span<const double> y0,
                               double t_begin, double t_end,
                               const OdeSpec& spec = {}) {
    if (spec.steps < 16) {
        throw InvalidParams("solve_ivp: step count must be >= 16");
    }
    if (!(t_end >= t_begin)) {
        throw InvalidParams("solve_ivp: requires t_end >= t_begin");
    }
    const std::size_t dim = y0.size();
    const int n = spec.steps;
    const double h = (t_end - t_begin) / n;

    OdeTrajectory out;
    out.t.resize(n + 1);
    out.y.assign(n + 1, std::vector<double>(dim));
    std::copy(y0.begin(), y0.end(), out.y[0].begin());
    out.t[0] = t_begin;

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (int i = 0; i < n; ++i) {
        const double t = t_begin + i * h;
        const std::vector<double>& y = out.y[i];
        rhs(t, y, k1);
        for (std::size_t j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t j = 0; j < dim; ++j) tmp[j] = y[j] + h * k3[j];
        rhs(t + h, tmp, k4);
        std::vector<double>& next = out.y[i + 1];
        for (std::size_t j = 0; j < dim; ++j) {
            next[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
            if (!std::isfinite(next[j])) {
                throw NonFinite("solve_ivp: state blew up at t=" +
                                std::to_string(t + h));
            }
        }
        out.t[i + 1] = t_begin + (i + 1) * h;
    }
    return out;
}

struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
};

// Bisection. Requires f(lo)*f(hi) <= 0; stops when the bracket width is at
// most tol (absolute) and returns the midpoint. The result stays inside the
// initial bracket.
inline double find_root(const std::function<double(double)>& f,
                        RootBracket bracket, double tol) {
    double lo = bracket.lo;
    double hi = bracket.hi;
    if (!(lo <= hi)) {
        throw InvalidParams("find_root: requires lo <= hi");
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) {
        throw NonFinite("find_root: non-finite value at a bracket endpoint");
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        throw NoSignChange("find_root: no sign change over [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket at floating-point resolution
        double fm = f(mid);
        if (!std::isfinite(fm)) {
            throw NonFinite("find_root: non-finite value at x=" + std::to_string(mid));
        }
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

struct MaximizeResult {
    double arg = 0.0;
    double value = 0.0;
    bool unimodal = true; // false when a scanned sample beat the golden-section result
};

// Golden-section search on [lo, hi]; the caller asserts unimodality. A coarse
// pre-scan seeds the bracket and doubles as a non-unimodality detector: when
// the best scanned sample beats the converged interval, that sample is
// returned and the result is flagged.
inline MaximizeResult maximize_1d(const std::function<double(double)>& f,
                                  double lo, double hi, double tol,
                                  int scan_points = 33) {
    if (!(lo <= hi)) {
        throw InvalidParams("maximize_1d: requires lo <= hi");
    }
    if (lo == hi) {
        return {lo, f(lo), true};
    }
    double best_x = lo;
    double best_f = -std::numeric_limits<double>::infinity();
    auto eval = [&](double x) {
        double v = f(x);
        if (!std::isfinite(v)) {
            throw NonFinite("maximize_1d: non-finite value at x=" + std::to_string(x));
        }
        if (v > best_f) {
            best_f = v;
            best_x = x;
        }
        return v;
    };

    int best_idx = 0;
    double scan_best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan_points; ++i) {
        double x = lo + (hi - lo) * i / (scan_points - 1);
        double v = eval(x);
        if (v > scan_best) {
            scan_best = v;
            best_idx = i;
        }
    }
    double a = lo + (hi - lo) * std::max(0, best_idx - 1) / (scan_points - 1);
    double b = lo + (hi - lo) * std::min(scan_points - 1, best_idx + 1) / (scan_points - 1);

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        }
        if (x1 >= x2) break; // interval exhausted at floating-point resolution
    }
    double xm = 0.5 * (a + b);
    double fm = eval(xm);
    if (best_f > fm && best_x < a - tol) {
        // a sample outside the converged bracket was better: not unimodal
        return {best_x, best_f, false};
    }
    if (best_f > fm && best_x > b + tol) {
        return {best_x, best_f, false};
    }
    return {best_f > fm ? best_x : xm, std::max(best_f, fm), true};
}

} // namespace infoclock
