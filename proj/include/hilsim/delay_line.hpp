#pragma once

/**
 * @file delay_line.hpp
 * @brief State history on a uniform grid with interpolated delayed lookup,
 *        and a fixed-step RK4 stepper for delay differential equations.
 *
 * Samples live at integer step indices n (time n*dt). A delay of h seconds
 * is carried as the real number of steps h/dt, so a delayed argument at
 * stage time (n + c) dt is the history at fractional index n + c - h/dt.
 * That index is split once into an integer part and a fraction, which keeps
 * runs bit-for-bit reproducible for a given (dt, h). Non-integer delays are
 * resolved by linear interpolation between the bracketing samples, never by
 * rounding.
 */

#include "hilsim/core.hpp"

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

namespace hilsim {

template <class S>
concept IntegrableState = std::copyable<S> && requires(const S a, const S b, double s) {
    { a + b } -> std::convertible_to<S>;
    { a - b } -> std::convertible_to<S>;
    { a * s } -> std::convertible_to<S>;
};

/// Ring buffer of the most recent states. Indices below zero return the
/// initial state (constant pre-history).
template <IntegrableState State>
class DelayLine {
public:
    DelayLine(double delay, double dt, const State& initial)
        : delay_{delay}, dt_{dt}, steps_{delay / dt}, initial_{initial} {
        if (!(dt > 0.0)) throw InputError("dt must be positive");
        if (!(delay >= 0.0)) throw InputError("delay must be non-negative");
        capacity_ = static_cast<std::size_t>(std::ceil(steps_)) + 2;
        ring_.assign(capacity_, initial);
        ring_[0] = initial;
        latest_ = 0;
    }

    double delay() const { return delay_; }
    double dt() const { return dt_; }
    /// Delay expressed in steps, h/dt.
    double delay_steps() const { return steps_; }
    std::size_t capacity() const { return capacity_; }
    std::int64_t latest_index() const { return latest_; }
    const State& initial() const { return initial_; }

    /// Appends the state for index latest_index() + 1.
    void push(const State& s) {
        ++latest_;
        ring_[slot(latest_)] = s;
    }

    const State& at(std::int64_t i) const {
        if (i < 0) return initial_;
        if (i > latest_ || latest_ - i >= static_cast<std::int64_t>(capacity_))
            throw std::out_of_range("delay line index " + std::to_string(i) + " not retained");
        return ring_[slot(i)];
    }

    /// History at fractional index i + frac, 0 <= frac < 1.
    State interpolate(std::int64_t i, double frac) const {
        if (frac == 0.0) return at(i);
        const State& lo = at(i);
        const State& hi = at(i + 1);
        return lo + (hi - lo) * frac;
    }

    /// History at an arbitrary time t (seconds); t <= 0 gives the initial state.
    State lookup(double t) const {
        if (t <= 0.0) return initial_;
        const double q = t / dt_;
        const auto i = static_cast<std::int64_t>(std::floor(q));
        return interpolate(i, q - static_cast<double>(i));
    }

private:
    std::size_t slot(std::int64_t i) const { return static_cast<std::size_t>(i) % capacity_; }

    double delay_;
    double dt_;
    double steps_;
    State initial_;
    std::size_t capacity_{0};
    std::vector<State> ring_;
    std::int64_t latest_{0};
};

namespace detail {

/// Delayed argument for a stage at index n + c (c in [0, 1]). When the delay
/// is shorter than the stage offset the target lies inside the current step;
/// it is then interpolated between x_n and the stage estimate itself, which
/// for h == 0 returns the stage state exactly.
template <IntegrableState State>
State delayed_argument(const DelayLine<State>& line, std::int64_t n, double c,
                       const State& x_n, const State& stage) {
    const double H = line.delay_steps();
    const double back = H - c;  // steps behind n
    if (back >= 0.0) {
        const double whole = std::ceil(back);
        const auto i = n - static_cast<std::int64_t>(whole);
        const double frac = whole - back;
        return line.interpolate(i, frac);
    }
    // 0 <= H < c: target index n + (c - H) lies in (n, n + c].
    const double w = (c - H) / c;
    return x_n + (stage - x_n) * w;
}

template <class State>
void post_step(State&) {}

inline void post_step(ChaserState3D& s) { s.d_c3.normalize(); }

template <class State>
bool finite(const State& s) {
    if constexpr (requires { s.all_finite(); })
        return s.all_finite();
    else
        return s.allFinite();
}

}  // namespace detail

/// One classical RK4 step of x' = rhs(x(t), x(t - h)) from index n to n + 1.
/// `line` must hold the history through index n. Unit attitude columns are
/// renormalized after the step. Throws NumericalError on non-finite output.
template <IntegrableState State, class Rhs>
State rk4_delay_step(const State& x_n, std::int64_t n, const DelayLine<State>& line, double dt,
                     Rhs&& rhs) {
    using detail::delayed_argument;
    const State k1 = rhs(x_n, delayed_argument(line, n, 0.0, x_n, x_n));
    const State s2 = x_n + k1 * (0.5 * dt);
    const State k2 = rhs(s2, delayed_argument(line, n, 0.5, x_n, s2));
    const State s3 = x_n + k2 * (0.5 * dt);
    const State k3 = rhs(s3, delayed_argument(line, n, 0.5, x_n, s3));
    const State s4 = x_n + k3 * dt;
    const State k4 = rhs(s4, delayed_argument(line, n, 1.0, x_n, s4));
    State next = x_n + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    detail::post_step(next);
    if (!detail::finite(next))
        throw NumericalError("non-finite state after step " + std::to_string(n));
    return next;
}

/// Integrates a delayed system over `steps` steps from x0 with constant
/// pre-history, returning every state (steps + 1 entries).
template <IntegrableState State, class Rhs>
std::vector<State> integrate_delayed(const State& x0, double delay, double dt, std::int64_t steps,
                                     Rhs&& rhs) {
    DelayLine<State> line(delay, dt, x0);
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    out.push_back(x0);
    State x = x0;
    for (std::int64_t n = 0; n < steps; ++n) {
        x = rk4_delay_step(x, n, line, dt, rhs);
        line.push(x);
        out.push_back(x);
    }
    return out;
}

}  // namespace hilsim
