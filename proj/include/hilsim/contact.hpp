#pragma once

// Penetration kinematics and the spring-dashpot contact law.
//
// Sign convention: d < 0 means the probe tip is past the wall, so the
// restoring force f = -k d is positive (outward along n_hat).

#include "hilsim/core.hpp"

#include <span>

namespace hilsim {

struct Penetration {
    double d{0.0};        ///< depth [m], negative in contact
    double d_dot{0.0};    ///< depth rate [m/s]
};

/// Contact force magnitude along n_hat and the torque it produces about B.
struct Wrench3D {
    double f{0.0};
    Vec3 force_N{Vec3::Zero()};   ///< f n_hat, nozzle frame
    Vec3 tau_B{Vec3::Zero()};     ///< body frame
};

struct Wrench2D {
    double f{0.0};
    double tau{0.0};      ///< about the body x-axis
};

/// d = r.n + a_B.d_c3, d_dot = v.n + a_B.(-omega x d_c3), all from one delayed sample.
inline Penetration penetration_3d(const ChaserState3D& delayed, const Vec3& a_B, const Vec3& n_hat) {
    return {delayed.r.dot(n_hat) + a_B.dot(delayed.d_c3),
            delayed.v.dot(n_hat) + a_B.dot(-delayed.omega.cross(delayed.d_c3))};
}

inline Penetration penetration_2d(const ChaserState2D& delayed, double a) {
    return {delayed.z + a * std::cos(delayed.theta),
            delayed.v_z - a * delayed.omega * std::sin(delayed.theta)};
}

/// f = -k d - b d_dot; unilateral contact carries no force once d >= 0.
inline double spring_dashpot_force(const Penetration& p, double k, double b, Activation mode) {
    if (mode == Activation::unilateral && !(p.d < 0.0)) return 0.0;
    return -k * p.d - b * p.d_dot;
}

/// Effective stiffness of the compliance device along n_hat:
/// k_phi = sum k_i (l_i . n)^2. Both l_i and n_hat must be expressed in the
/// same frame.
inline double effective_stiffness(std::span<const Spring> springs, const Vec3& n_hat) {
    double k = 0.0;
    for (const auto& sp : springs) {
        const double c = sp.l_hat.dot(n_hat);
        k += sp.k * c * c;
    }
    return k;
}

/// Generalized stiffness tensor K = sum k_i l_i l_i^T; n^T K n == effective_stiffness.
inline Mat3 stiffness_tensor(std::span<const Spring> springs) {
    Mat3 K = Mat3::Zero();
    for (const auto& sp : springs) K += sp.k * sp.l_hat * sp.l_hat.transpose();
    return K;
}

/// Largest k_phi over a set of candidate normal directions (body frame).
/// Gives a time-invariant bound for the linear analysis when the attitude
/// envelope is known.
inline double max_effective_stiffness(std::span<const Spring> springs,
                                      std::span<const Vec3> normals_in_body) {
    double k = 0.0;
    for (const auto& n : normals_in_body) k = std::max(k, effective_stiffness(springs, n));
    return k;
}

/// Physical compliance force plus the operator-tunable virtual spring/damper:
/// f = -(k_phi + k_v) d - b_v d_dot.
inline double hybrid_force(const Penetration& p, double k_phi, const ContactParams& contact) {
    return spring_dashpot_force(p, k_phi + contact.k_v, contact.b_v, contact.activation);
}

/// Force f n_hat applied at the probe tip; tau_B = f a_B x d_c3 (delayed attitude).
inline Wrench3D contact_wrench_3d(double f, const Vec3& a_B, const Vec3& delayed_d_c3,
                                  const Vec3& n_hat) {
    return {f, f * n_hat, f * a_B.cross(delayed_d_c3)};
}

/// Planar torque: a positive outward force yields a negative torque while
/// sin(theta) > 0.
inline Wrench2D contact_wrench_2d(double f, double a, double delayed_theta) {
    return {f, -a * f * std::sin(delayed_theta)};
}

}  // namespace hilsim
