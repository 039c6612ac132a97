#pragma once

/**
 * @file core.hpp
 * @brief Domain types, unit conventions and parameter validation.
 *
 * Everything is SI internally: metres, seconds, kilograms, radians.
 * Degrees only appear at the scenario-file boundary (see scenario.hpp).
 *
 * Frames:
 *   N  nozzle frame, inertial, z-axis along the outward wall normal at the
 *      contact point.
 *   B  chaser body frame, centred at the chaser centre of mass.
 */

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Thrown when an operation receives arguments violating its preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when integration produces non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Skew-symmetric cross-product matrix, [u x] v == u.cross(v).
inline Mat3 skew(const Vec3& u) {
    Mat3 s;
    s << 0.0, -u.z(), u.y(),
         u.z(), 0.0, -u.x(),
        -u.y(), u.x(), 0.0;
    return s;
}

enum class Activation { unilateral, bilateral };

/// Rigid-body properties of the chaser.
struct BodyParams {
    double m{1.0};                        ///< mass [kg]
    Mat3 J{Mat3::Identity()};             ///< inertia about the CoM, body frame [kg m^2]
    Vec3 a_B{0.0, 0.0, 1.0};              ///< probe vector BP in body frame [m]

    /// Principal inertia about the body x-axis, used by the planar model.
    double J_x() const { return J(0, 0); }
    /// Probe length.
    double a() const { return a_B.norm(); }
};

/// One spring of the compliance device: stiffness and attach direction.
struct Spring {
    double k{0.0};                        ///< [N/m]
    Vec3 l_hat{0.0, 0.0, 1.0};            ///< unit direction, body frame
};

/// Contact law and nozzle geometry.
struct ContactParams {
    double k_v{0.0};                      ///< virtual stiffness [N/m]
    double b_v{0.0};                      ///< virtual damping [N s/m]
    std::vector<Spring> springs;          ///< physical compliance device
    Vec3 n_hat{0.0, 0.0, 1.0};            ///< outward wall normal, nozzle frame
    double alpha{std::numbers::pi / 6.0}; ///< nozzle cone half-angle [rad]
    Activation activation{Activation::unilateral};
    /// Time-invariant upper bound on k_phi + k_v used by the linear analysis.
    /// Negative means "not given": k_v + sum(k_i) is used instead.
    double k_bound{-1.0};

    double spring_stiffness_sum() const {
        double s = 0.0;
        for (const auto& sp : springs) s += sp.k;
        return s;
    }

    /// Stiffness used by linearization and stability analysis.
    double analysis_stiffness() const {
        return k_bound >= 0.0 ? k_bound : k_v + spring_stiffness_sum();
    }
};

/// 12-state chaser state in frames N (translation) and B (rotation).
struct ChaserState3D {
    Vec3 r{Vec3::Zero()};                 ///< position of B in N [m]
    Vec3 v{Vec3::Zero()};                 ///< velocity of B in N [m/s]
    Vec3 d_c3{0.0, 0.0, 1.0};             ///< third column of D^N_B (n_hat seen from B)
    Vec3 omega{Vec3::Zero()};             ///< angular velocity of B wrt N, body frame [rad/s]

    ChaserState3D operator+(const ChaserState3D& o) const {
        return {r + o.r, v + o.v, d_c3 + o.d_c3, omega + o.omega};
    }
    ChaserState3D operator-(const ChaserState3D& o) const {
        return {r - o.r, v - o.v, d_c3 - o.d_c3, omega - o.omega};
    }
    ChaserState3D operator*(double s) const { return {r * s, v * s, d_c3 * s, omega * s}; }

    double max_abs() const {
        return std::max({r.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff(),
                         d_c3.cwiseAbs().maxCoeff(), omega.cwiseAbs().maxCoeff()});
    }
    bool all_finite() const {
        return r.allFinite() && v.allFinite() && d_c3.allFinite() && omega.allFinite();
    }
};

/// Planar chaser state. The stability-relevant block is (z, v_z, theta, omega);
/// (y, v_y) is the decoupled drift parallel to the wall.
struct ChaserState2D {
    double y{0.0};
    double z{0.0};
    double v_y{0.0};
    double v_z{0.0};
    double theta{0.0};                    ///< rotation about x bringing N onto B [rad]
    double omega{0.0};                    ///< [rad/s]

    ChaserState2D operator+(const ChaserState2D& o) const {
        return {y + o.y, z + o.z, v_y + o.v_y, v_z + o.v_z, theta + o.theta, omega + o.omega};
    }
    ChaserState2D operator-(const ChaserState2D& o) const {
        return {y - o.y, z - o.z, v_y - o.v_y, v_z - o.v_z, theta - o.theta, omega - o.omega};
    }
    ChaserState2D operator*(double s) const {
        return {y * s, z * s, v_y * s, v_z * s, theta * s, omega * s};
    }

    double max_abs() const {
        return std::max({std::abs(y), std::abs(z), std::abs(v_y), std::abs(v_z),
                         std::abs(theta), std::abs(omega)});
    }
    bool all_finite() const {
        return std::isfinite(y) && std::isfinite(z) && std::isfinite(v_y) &&
               std::isfinite(v_z) && std::isfinite(theta) && std::isfinite(omega);
    }

    /// Embeds the planar state into the 12-state representation
    /// (motion in the yz-plane, rotation about x).
    ChaserState3D to_3d() const {
        ChaserState3D s;
        s.r = {0.0, y, z};
        s.v = {0.0, v_y, v_z};
        s.d_c3 = {0.0, std::sin(theta), std::cos(theta)};
        s.omega = {omega, 0.0, 0.0};
        return s;
    }
};

inline ChaserState2D from_planar_3d(const ChaserState3D& s) {
    return {s.r.y(), s.r.z(), s.v.y(), s.v.z(), std::atan2(s.d_c3.y(), s.d_c3.z()), s.omega.x()};
}

enum class SimMode { planar, spatial };

struct SimConfig {
    double h{0.0};                        ///< tracking delay [s]
    double dt{1e-4};                      ///< integration step [s]
    double t_end{1.0};                    ///< duration [s]
    SimMode mode{SimMode::planar};
    ChaserState2D initial_2d{};
    ChaserState3D initial_3d{};
    int record_every{1};                  ///< output decimation
    double divergence_factor{1e3};        ///< abort when |x| exceeds factor * max(|x0|, 1)
    double averaging_window{0.02};        ///< restitution velocity window [s]
};

/// Nominal contact state about which the planar model is linearized:
/// probe parallel to the nozzle axis with the tip resting on the wall.
inline ChaserState2D nominal_state_2d(double a, double alpha) {
    if (!(alpha > 0.0 && alpha < std::numbers::pi / 2.0))
        throw InputError("alpha must lie in (0, pi/2)");
    if (!(a > 0.0)) throw InputError("probe length must be positive");
    ChaserState2D s;
    s.z = -a * std::sin(alpha);
    s.v_z = 0.0;
    s.theta = std::numbers::pi / 2.0 - alpha;
    s.omega = 0.0;
    return s;
}

inline ChaserState2D nominal_state_2d(const BodyParams& body, const ContactParams& contact) {
    return nominal_state_2d(body.a(), contact.alpha);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Diagnostic {
    std::string field;
    std::string message;
};

/// Parameters that passed validate(); unit vectors renormalized.
struct ValidatedBundle {
    BodyParams body;
    ContactParams contact;
    SimConfig sim;
};

struct ValidationResult {
    ValidatedBundle bundle;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return diagnostics.empty(); }
};

namespace detail {

inline constexpr double kUnitTolerance = 1e-6;

inline bool check_unit(Vec3& u, const std::string& field, const std::string& label,
                       std::vector<Diagnostic>& out) {
    const double n = u.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
        out.push_back({field, label + " not unit"});
        return false;
    }
    u /= n;
    return true;
}

inline void check_positive(double x, const std::string& field, std::vector<Diagnostic>& out) {
    if (!(std::isfinite(x) && x > 0.0)) out.push_back({field, field + " must be positive"});
}

inline void check_nonneg(double x, const std::string& field, std::vector<Diagnostic>& out) {
    if (!(std::isfinite(x) && x >= 0.0)) out.push_back({field, field + " must be non-negative"});
}

}  // namespace detail

/// Checks every type invariant and reports one diagnostic per violation.
/// Near-unit vectors (within 1e-6) are renormalized; nothing is clamped.
inline ValidationResult validate(const BodyParams& body, const ContactParams& contact,
                                 const SimConfig& sim) {
    ValidationResult res{{body, contact, sim}, {}};
    auto& d = res.diagnostics;
    auto& b = res.bundle;

    detail::check_positive(b.body.m, "m", d);
    if (!b.body.J.allFinite() || (b.body.J - b.body.J.transpose()).cwiseAbs().maxCoeff() >
                                     1e-12 * std::max(1.0, b.body.J.cwiseAbs().maxCoeff())) {
        d.push_back({"J", "J must be symmetric"});
    } else if (Eigen::LLT<Mat3>(b.body.J).info() != Eigen::Success) {
        d.push_back({"J", "J must be positive definite"});
    }
    if (!(b.body.a_B.allFinite() && b.body.a_B.norm() > 0.0))
        d.push_back({"a_B", "a_B must be non-zero"});

    detail::check_nonneg(b.contact.k_v, "k_v", d);
    detail::check_nonneg(b.contact.b_v, "b_v", d);
    for (std::size_t i = 0; i < b.contact.springs.size(); ++i) {
        auto& sp = b.contact.springs[i];
        const std::string f = "springs[" + std::to_string(i) + "]";
        detail::check_nonneg(sp.k, f + ".k", d);
        detail::check_unit(sp.l_hat, f + ".l_hat", f + ".l_hat", d);
    }
    detail::check_unit(b.contact.n_hat, "n_hat", "n_hat", d);
    if (!(b.contact.alpha > 0.0 && b.contact.alpha < std::numbers::pi / 2.0))
        d.push_back({"alpha", "alpha must lie in (0, pi/2)"});
    if (b.contact.k_bound >= 0.0 && !std::isfinite(b.contact.k_bound))
        d.push_back({"k_bound", "k_bound must be finite"});

    detail::check_nonneg(b.sim.h, "h", d);
    detail::check_positive(b.sim.dt, "dt", d);
    if (!(std::isfinite(b.sim.t_end) && b.sim.t_end > b.sim.dt))
        d.push_back({"t_end", "t_end must exceed dt"});
    if (b.sim.record_every < 1) d.push_back({"record_every", "record_every must be >= 1"});
    detail::check_positive(b.sim.divergence_factor, "divergence_factor", d);
    detail::check_nonneg(b.sim.averaging_window, "averaging_window", d);
    if (b.sim.mode == SimMode::planar) {
        if (!b.sim.initial_2d.all_finite()) d.push_back({"initial", "initial state not finite"});
    } else {
        if (!b.sim.initial_3d.all_finite())
            d.push_back({"initial", "initial state not finite"});
        else
            detail::check_unit(b.sim.initial_3d.d_c3, "initial.d_c3", "initial.d_c3", d);
    }
    return res;
}

inline ValidationResult validate(const ValidatedBundle& b) {
    return validate(b.body, b.contact, b.sim);
}

}  // namespace hilsim
