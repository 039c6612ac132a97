#pragma once

// Shared operating points for the test programs.

#include "hilsim/hilsim.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace fixtures {

inline constexpr double kMass = 60.0;
inline constexpr double kProbe = 0.3;
inline constexpr double kReducedMass = 15.6;
inline constexpr double kStiffness = 3000.0;
inline constexpr double kDelay = 0.016;
inline const double kAlpha = hilsim::deg_to_rad(30.0);

/// Roll inertia reproducing m_a = 15.6 kg for m = 60 kg, a = 0.3 m, alpha = 30 deg.
/// Independent value: J_x = m (a cos alpha)^2 / (m / m_a - 1) = 1.42297297297...
inline constexpr double kRollInertia = 1.4229729729729730;

inline hilsim::BodyParams planar_body(double J_x = kRollInertia) {
    hilsim::BodyParams b;
    b.m = kMass;
    b.J = hilsim::Mat3::Identity() * J_x;
    b.a_B = {0.0, 0.0, kProbe};
    return b;
}

inline hilsim::ContactParams planar_contact(double b_v, double k_v = kStiffness) {
    hilsim::ContactParams c;
    c.k_v = k_v;
    c.b_v = b_v;
    c.alpha = kAlpha;
    return c;
}

/// 5 mm above the wall at the nominal attitude, approaching at 20 mm/s.
inline hilsim::ChaserState2D approach_state(double speed = 0.02, double gap = 0.005) {
    hilsim::ChaserState2D x = hilsim::nominal_state_2d(kProbe, kAlpha);
    x.z += gap;
    x.v_z = -speed;
    return x;
}

inline hilsim::SimConfig table1_config(double h = kDelay, double t_end = 1.0) {
    hilsim::SimConfig cfg;
    cfg.h = h;
    cfg.dt = 1e-4;
    cfg.t_end = t_end;
    cfg.initial_2d = approach_state();
    cfg.averaging_window = 0.02;
    return cfg;
}

/// Restitution of the first completed contact, or NaN.
template <class State>
double first_restitution(const hilsim::SimulationResult<State>& r) {
    if (r.events.empty()) return std::numeric_limits<double>::quiet_NaN();
    return hilsim::restitution(r.events.front());
}

inline double table1_restitution(double beta, double h = kDelay) {
    const auto cfg = table1_config(h);
    const auto r = hilsim::simulate(cfg.initial_2d, cfg, planar_body(), planar_contact(beta));
    return first_restitution(r);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Random planar linearization inputs in a physically sensible range.
inline hilsim::PlanarLinearization random_planar(std::mt19937_64& rng) {
    hilsim::PlanarLinearization p;
    p.m = log_uniform(rng, 5.0, 500.0);
    p.J_x = log_uniform(rng, 0.1, 100.0);
    p.a = uniform(rng, 0.05, 1.0);
    p.alpha = uniform(rng, 0.05, 1.45);
    p.k = log_uniform(rng, 100.0, 10000.0);
    p.b = uniform(rng, 0.0, 200.0);
    return p;
}

}  // namespace fixtures
