#pragma once

/**
 * @file dynamics.hpp
 * @brief Delayed nonlinear contact dynamics of the chaser against the
 *        inertially fixed nozzle, in the 12-state and planar forms.
 *
 * The contact force at time t is computed from the state at t - h (the
 * robot tracking delay) and applied to the current state. simulate() runs a
 * fixed-step RK4 integration with a delay line, records a decimated
 * trajectory and segments contact events on the undelayed penetration.
 */

#include "hilsim/contact.hpp"
#include "hilsim/core.hpp"
#include "hilsim/delay_line.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace hilsim {

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

/// Force and torque at time t from the delayed sample. Springs are projected
/// on the delayed attitude column, i.e. n_hat seen from the body.
inline Wrench3D contact_wrench_from_delayed(const ChaserState3D& delayed, const BodyParams& body,
                                            const ContactParams& contact) {
    const Penetration p = penetration_3d(delayed, body.a_B, contact.n_hat);
    const double k_phi = effective_stiffness(contact.springs, delayed.d_c3);
    const double f = hybrid_force(p, k_phi, contact);
    return contact_wrench_3d(f, body.a_B, delayed.d_c3, contact.n_hat);
}

inline Wrench2D contact_wrench_from_delayed(const ChaserState2D& delayed, const BodyParams& body,
                                            const ContactParams& contact) {
    const Penetration p = penetration_2d(delayed, body.a());
    // Planar embedding: n_hat seen from B is (0, sin theta, cos theta).
    const Vec3 n_body{0.0, std::sin(delayed.theta), std::cos(delayed.theta)};
    const double k_phi = effective_stiffness(contact.springs, n_body);
    const double f = hybrid_force(p, k_phi, contact);
    return contact_wrench_2d(f, body.a(), delayed.theta);
}

/// r' = v, v' = (f/m) n, d_c3' = -omega x d_c3, omega' = J^-1(-omega x J omega + tau_B).
inline ChaserState3D rhs_3d(const ChaserState3D& x, const ChaserState3D& delayed,
                            const BodyParams& body, const ContactParams& contact) {
    const Wrench3D w = contact_wrench_from_delayed(delayed, body, contact);
    ChaserState3D dx;
    dx.r = x.v;
    dx.v = (w.f / body.m) * contact.n_hat;
    dx.d_c3 = -x.omega.cross(x.d_c3);
    dx.omega = body.J.ldlt().solve(-x.omega.cross(body.J * x.omega) + w.tau_B);
    return dx;
}

/// Planar equations; (y, v_y) drift freely.
inline ChaserState2D rhs_2d(const ChaserState2D& x, const ChaserState2D& delayed,
                            const BodyParams& body, const ContactParams& contact) {
    const Wrench2D w = contact_wrench_from_delayed(delayed, body, contact);
    ChaserState2D dx;
    dx.y = x.v_y;
    dx.v_y = 0.0;
    dx.z = x.v_z;
    dx.v_z = w.f / body.m;
    dx.theta = x.omega;
    dx.omega = w.tau / body.J_x();
    return dx;
}

// ---------------------------------------------------------------------------
// Mechanical energy (kinetic + contact spring potential)
// ---------------------------------------------------------------------------

inline double mechanical_energy(const ChaserState2D& x, const BodyParams& body,
                                const ContactParams& contact) {
    const Penetration p = penetration_2d(x, body.a());
    const Vec3 n_body{0.0, std::sin(x.theta), std::cos(x.theta)};
    const double k = effective_stiffness(contact.springs, n_body) + contact.k_v;
    const bool loaded = contact.activation == Activation::bilateral || p.d < 0.0;
    return 0.5 * body.m * (x.v_y * x.v_y + x.v_z * x.v_z) + 0.5 * body.J_x() * x.omega * x.omega +
           (loaded ? 0.5 * k * p.d * p.d : 0.0);
}

inline double mechanical_energy(const ChaserState3D& x, const BodyParams& body,
                                const ContactParams& contact) {
    const Penetration p = penetration_3d(x, body.a_B, contact.n_hat);
    const double k = effective_stiffness(contact.springs, x.d_c3) + contact.k_v;
    const bool loaded = contact.activation == Activation::bilateral || p.d < 0.0;
    return 0.5 * body.m * x.v.squaredNorm() + 0.5 * x.omega.dot(body.J * x.omega) +
           (loaded ? 0.5 * k * p.d * p.d : 0.0);
}

inline Penetration current_penetration(const ChaserState2D& x, const BodyParams& body,
                                       const ContactParams&) {
    return penetration_2d(x, body.a());
}

inline Penetration current_penetration(const ChaserState3D& x, const BodyParams& body,
                                       const ContactParams& contact) {
    return penetration_3d(x, body.a_B, contact.n_hat);
}

// ---------------------------------------------------------------------------
// Contact events
// ---------------------------------------------------------------------------

struct ContactEvent {
    double t_in{0.0};       ///< interpolated entry time [s]
    double t_out{0.0};      ///< interpolated exit time [s]
    double v_minus{0.0};    ///< mean penetration rate before entry [m/s]
    double v_plus{0.0};     ///< mean penetration rate after exit [m/s]
    double max_abs_d{0.0};  ///< deepest penetration [m]
};

/// Streaming segmentation of contact on the sign of the undelayed depth.
/// Rates are averaged over `window_samples` integration samples with d >= 0
/// immediately before entry and immediately after exit.
class ContactEventDetector {
public:
    explicit ContactEventDetector(std::size_t window_samples)
        : window_{std::max<std::size_t>(window_samples, 1)} {}

    void feed(double t, const Penetration& p) {
        const bool inside = p.d < 0.0;
        if (!started_) {
            started_ = true;
        } else if (inside && !prev_inside_) {
            open_entry(t, p);
        } else if (!inside && prev_inside_ && open_) {
            close_contact(t, p);
        }

        if (inside) {
            if (open_) open_->max_abs_d = std::max(open_->max_abs_d, std::abs(p.d));
        } else {
            if (collecting_) {
                post_sum_ += p.d_dot;
                if (++post_count_ >= window_) finish_post();
            }
            pre_.push_back(p.d_dot);
            if (pre_.size() > window_) pre_.pop_front();
        }
        prev_t_ = t;
        prev_ = p;
        prev_inside_ = inside;
    }

    /// Closes a partially filled post-exit window; contacts still open at
    /// the end of the run are dropped.
    std::vector<ContactEvent> finish() {
        if (collecting_ && post_count_ > 0) finish_post();
        return events_;
    }

    const std::vector<ContactEvent>& events() const { return events_; }

private:
    static double crossing_time(double t0, double d0, double t1, double d1) {
        if (d0 == d1) return t1;
        return t0 + (t1 - t0) * (d0 / (d0 - d1));
    }

    void open_entry(double t, const Penetration& p) {
        if (collecting_) finish_post();
        ContactEvent e;
        e.t_in = crossing_time(prev_t_, prev_.d, t, p.d);
        double sum = 0.0;
        for (double v : pre_) sum += v;
        e.v_minus = pre_.empty() ? prev_.d_dot : sum / static_cast<double>(pre_.size());
        e.max_abs_d = std::abs(p.d);
        open_ = e;
        pre_.clear();
    }

    void close_contact(double t, const Penetration& p) {
        open_->t_out = crossing_time(prev_t_, prev_.d, t, p.d);
        collecting_ = true;
        post_sum_ = 0.0;
        post_count_ = 0;
    }

    void finish_post() {
        open_->v_plus = post_sum_ / static_cast<double>(post_count_);
        events_.push_back(*open_);
        open_.reset();
        collecting_ = false;
    }

    std::size_t window_;
    bool started_{false};
    bool prev_inside_{false};
    double prev_t_{0.0};
    Penetration prev_{};
    std::deque<double> pre_;
    std::optional<ContactEvent> open_;
    bool collecting_{false};
    double post_sum_{0.0};
    std::size_t post_count_{0};
    std::vector<ContactEvent> events_;
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// Recorded signals. d and d_dot are the undelayed penetration of the
/// recorded state; f and the torque are the contact load acting at that time
/// (computed from the delayed sample).
template <class State>
struct Trajectory {
    std::vector<double> t;
    std::vector<State> x;
    std::vector<Penetration> penetration;
    std::vector<Wrench3D> wrench;         ///< planar runs store tau in tau_B.x()
    std::vector<bool> in_contact;
    std::vector<double> energy;
};

enum class SimStatus { completed, diverged };

template <class State>
struct SimulationResult {
    Trajectory<State> trajectory;
    std::vector<ContactEvent> events;
    SimStatus status{SimStatus::completed};
    std::string diagnostic;
    std::int64_t steps{0};
};

namespace detail {

inline Wrench3D as_wrench3d(const Wrench3D& w) { return w; }
inline Wrench3D as_wrench3d(const Wrench2D& w) {
    return {w.f, Vec3{0.0, 0.0, w.f}, Vec3{w.tau, 0.0, 0.0}};
}

inline ChaserState2D rhs(const ChaserState2D& x, const ChaserState2D& xd, const BodyParams& b,
                         const ContactParams& c) {
    return rhs_2d(x, xd, b, c);
}
inline ChaserState3D rhs(const ChaserState3D& x, const ChaserState3D& xd, const BodyParams& b,
                         const ContactParams& c) {
    return rhs_3d(x, xd, b, c);
}

}  // namespace detail

/// Integrates from `initial` with constant pre-history. Stops early with
/// SimStatus::diverged if any |state component| exceeds
/// divergence_factor * max(|initial|_inf, 1) or a step turns non-finite.
template <class State>
SimulationResult<State> simulate(const State& initial, const SimConfig& cfg, const BodyParams& body,
                                 const ContactParams& contact) {
    if (!(cfg.dt > 0.0) || !(cfg.h >= 0.0) || !(cfg.t_end > cfg.dt) || cfg.record_every < 1)
        throw InputError("invalid simulation configuration");

    SimulationResult<State> res;
    auto& tr = res.trajectory;
    DelayLine<State> line(cfg.h, cfg.dt, initial);
    const auto steps = static_cast<std::int64_t>(std::floor(cfg.t_end / cfg.dt + 1e-9));
    const double bound = cfg.divergence_factor * std::max(initial.max_abs(), 1.0);
    const auto window = static_cast<std::size_t>(std::lround(cfg.averaging_window / cfg.dt));
    ContactEventDetector detector(window);

    auto rhs = [&](const State& x, const State& xd) { return detail::rhs(x, xd, body, contact); };

    auto record = [&](std::int64_t n, const State& x) {
        const double t = static_cast<double>(n) * cfg.dt;
        const Penetration p = current_penetration(x, body, contact);
        const State xd = detail::delayed_argument(line, n, 0.0, x, x);
        tr.t.push_back(t);
        tr.x.push_back(x);
        tr.penetration.push_back(p);
        tr.wrench.push_back(detail::as_wrench3d(contact_wrench_from_delayed(xd, body, contact)));
        tr.in_contact.push_back(p.d < 0.0);
        tr.energy.push_back(mechanical_energy(x, body, contact));
    };

    State x = initial;
    detector.feed(0.0, current_penetration(x, body, contact));
    record(0, x);
    for (std::int64_t n = 0; n < steps; ++n) {
        try {
            x = rk4_delay_step(x, n, line, cfg.dt, rhs);
        } catch (const NumericalError& e) {
            res.status = SimStatus::diverged;
            res.diagnostic = e.what();
            break;
        }
        line.push(x);
        res.steps = n + 1;
        const double t = static_cast<double>(n + 1) * cfg.dt;
        detector.feed(t, current_penetration(x, body, contact));
        if ((n + 1) % cfg.record_every == 0) record(n + 1, x);
        if (x.max_abs() > bound) {
            res.status = SimStatus::diverged;
            res.diagnostic = "state magnitude exceeded divergence bound at t = " + std::to_string(t);
            break;
        }
    }
    res.events = detector.finish();
    return res;
}

inline SimulationResult<ChaserState2D> simulate_2d(const ValidatedBundle& b) {
    return simulate(b.sim.initial_2d, b.sim, b.body, b.contact);
}

inline SimulationResult<ChaserState3D> simulate_3d(const ValidatedBundle& b) {
    return simulate(b.sim.initial_3d, b.sim, b.body, b.contact);
}

}  // namespace hilsim
