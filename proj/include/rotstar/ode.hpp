#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output and a single
// terminal event, built on Boost.Odeint.  Events are located on the dense
// interpolant first and then polished with exact single steps taken from the
// last accepted state, so the reported crossing is as accurate as a regular
// step rather than the (order 4) interpolant.

#include "rotstar/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

namespace rotstar::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
    /// Steps shorter than this fraction of |r| count as step-size underflow.
    double min_step_fraction = 1e-15;
    std::size_t max_steps = 2'000'000;
};

template <std::size_t N>
struct Sample {
    double r;
    State<N> y;
};

template <std::size_t N>
struct Result {
    bool event_found = false;
    double r_end = 0.0;      ///< event location, or the integration limit
    State<N> y_end{};        ///< state at r_end
    std::size_t steps = 0;
};

namespace detail {

template <std::size_t N, class Rhs>
State<N> exact_step(Rhs& rhs, double r0, const State<N>& y0, double r1) {
    using stepper_t = boost::numeric::odeint::runge_kutta_dopri5<State<N>>;
    stepper_t stepper;
    State<N> out{};
    auto sys = [&rhs](const State<N>& y, State<N>& dy, double r) { rhs(r, y, dy); };
    stepper.do_step(sys, y0, r0, out, r1 - r0);
    return out;
}

} // namespace detail

/// Integrates y' = rhs(r, y) from r0 towards r_limit.  Stops at the first
/// r where event(r, y) drops from positive to <= 0 (when `event` is given),
/// polishing the root until |event| <= event_tol.  Every accepted step is
/// appended to `trail` when it is non-null; with an event the last entry is
/// the event point itself.
template <std::size_t N, class Rhs, class Event>
Result<N> integrate_until(Rhs rhs, double r0, const State<N>& y0, double r_limit, Event event,
                          double event_tol, const Tolerances& tol, double first_step,
                          std::vector<Sample<N>>* trail) {
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State<N>>());
    auto sys = [&rhs](const State<N>& y, State<N>& dy, double r) { rhs(r, y, dy); };

    stepper.initialize(y0, r0, first_step);
    if (trail)
        trail->push_back({r0, y0});

    Result<N> result;
    double e_prev = event(r0, y0);
    State<N> y_prev = y0;

    while (result.steps < tol.max_steps) {
        auto [t0, t1] = stepper.do_step(sys);
        ++result.steps;
        const State<N>& y1 = stepper.current_state();
        if (t1 - t0 < tol.min_step_fraction * std::max(std::abs(t1), 1e-300)) {
            std::ostringstream msg;
            msg << "step-size underflow at r=" << t1 << " (dr=" << (t1 - t0) << ")";
            throw StiffnessFailure(msg.str());
        }
        const double e1 = event(t1, y1);
        if (e_prev > 0.0 && e1 <= 0.0) {
            // Bracket on the interpolant, then polish with exact steps.
            double lo = t0, hi = t1;
            State<N> tmp{};
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, tmp);
                (event(mid, tmp) > 0.0 ? lo : hi) = mid;
            }
            double a = t0, fa = e_prev;
            double b = t1, fb = e1;
            double guess = 0.5 * (lo + hi);
            State<N> yg = detail::exact_step<N>(rhs, t0, y_prev, guess);
            double fg = event(guess, yg);
            int side = 0;
            for (int it = 0; it < 100 && std::abs(fg) > event_tol; ++it) {
                if (fg > 0.0) {
                    a = guess;
                    fa = fg;
                    if (side == 1)
                        fb *= 0.5;
                    side = 1;
                } else {
                    b = guess;
                    fb = fg;
                    if (side == -1)
                        fa *= 0.5;
                    side = -1;
                }
                if (b - a <= 1e-16 * std::abs(b))
                    break;
                guess = (a * fb - b * fa) / (fb - fa);
                yg = detail::exact_step<N>(rhs, t0, y_prev, guess);
                fg = event(guess, yg);
            }
            result.event_found = true;
            result.r_end = guess;
            result.y_end = yg;
            if (trail)
                trail->push_back({guess, yg});
            return result;
        }
        if (t1 >= r_limit) {
            const State<N> y_lim = detail::exact_step<N>(rhs, t0, y_prev, r_limit);
            result.r_end = r_limit;
            result.y_end = y_lim;
            if (trail)
                trail->push_back({r_limit, y_lim});
            return result;
        }
        if (trail)
            trail->push_back({t1, y1});
        e_prev = e1;
        y_prev = y1;
    }
    throw StiffnessFailure("maximum number of integration steps exceeded");
}

/// Integration without an event up to exactly r_end.
template <std::size_t N, class Rhs>
Result<N> integrate_to(Rhs rhs, double r0, const State<N>& y0, double r_end, const Tolerances& tol,
                       double first_step, std::vector<Sample<N>>* trail) {
    auto never = [](double, const State<N>&) { return 1.0; };
    return integrate_until<N>(std::move(rhs), r0, y0, r_end, never, 0.0, tol, first_step, trail);
}

} // namespace rotstar::ode
