#pragma once

/**
 * @file linear.hpp
 * @brief Linearization of the planar contact model about the nominal
 *        contact state, the depth/rate state transformation and the
 *        characteristic quasi-polynomial of the penetration mode.
 *
 * State ordering is x = (z, v_z, theta, omega). The transformed state
 * y = T x = (z, v_z, d, d_dot) separates the penetration mode, whose
 * dynamics m_a d'' + b d'(t-h) + k d(t-h) = 0 no longer depend on the
 * centre-of-mass drift.
 */

#include "hilsim/core.hpp"
#include "hilsim/delay_line.hpp"

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <vector>

namespace hilsim {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
using Vec2 = Eigen::Vector2d;

/// Effective inertia of the penetration mode, m / (1 + m (a cos alpha)^2 / J_x).
inline double reduced_mass(double m, double J_x, double a, double alpha) {
    if (!(m > 0.0 && J_x > 0.0 && a > 0.0)) throw InputError("m, J_x and a must be positive");
    const double arm = a * std::cos(alpha);
    return m / (1.0 + m * arm * arm / J_x);
}

/// Inverse of reduced_mass for J_x: the roll inertia giving a prescribed m_a.
inline double inertia_for_reduced_mass(double m, double a, double alpha, double m_a) {
    if (!(m > 0.0 && a > 0.0 && m_a > 0.0 && m_a < m))
        throw InputError("need 0 < m_a < m and a > 0");
    const double arm = a * std::cos(alpha);
    if (!(arm > 0.0)) throw InputError("frontal contact: m_a == m for every J_x");
    return m * arm * arm / (m / m_a - 1.0);
}

/// Inputs of the planar linearization. k is the time-invariant analysis
/// stiffness (an upper bound of k_phi + k_v), b the damping.
struct PlanarLinearization {
    double m{1.0};
    double J_x{1.0};
    double a{1.0};
    double alpha{0.0};  ///< [0, pi/2)
    double k{0.0};
    double b{0.0};

    static PlanarLinearization from(const BodyParams& body, const ContactParams& contact) {
        return {body.m, body.J_x(), body.a(), contact.alpha, contact.analysis_stiffness(),
                contact.b_v};
    }
};

struct LinearModel2D {
    Mat4 F_x;            ///< gradient of the planar RHS at the nominal state
    Mat4 T;              ///< x -> (z, v_z, d, d_dot)
    Mat4 F_y;            ///< T F_x T^-1
    double m_a{0.0};
    double c_alpha{0.0};
    ChaserState2D nominal;
};

/// Closed-form transformed dynamics matrix: block upper-triangular with the
/// penetration mode [[0, 1], [-k/m_a, -b/m_a]] in the lower-right block.
inline Mat4 transformed_dynamics(double m, double m_a, double k, double b) {
    Mat4 F = Mat4::Zero();
    F(0, 1) = 1.0;
    F(1, 2) = -k / m;
    F(1, 3) = -b / m;
    F(2, 3) = 1.0;
    F(3, 2) = -k / m_a;
    F(3, 3) = -b / m_a;
    return F;
}

inline Mat4 depth_transform(double a, double c_alpha) {
    Mat4 T = Mat4::Zero();
    T(0, 0) = 1.0;
    T(1, 1) = 1.0;
    T(2, 0) = 1.0;
    T(2, 2) = -a * c_alpha;
    T(3, 1) = 1.0;
    T(3, 3) = -a * c_alpha;
    return T;
}

/// Jacobian of the planar RHS (z, v_z, theta, omega) with respect to the
/// delayed state, at an arbitrary point and with permanently active contact.
inline Mat4 planar_jacobian(const ChaserState2D& x, double m, double J_x, double a, double k,
                            double b) {
    const double s = std::sin(x.theta);
    const double c = std::cos(x.theta);
    const double d = x.z + a * c;
    const double d_dot = x.v_z - a * x.omega * s;
    const double f = -k * d - b * d_dot;
    // df/dx
    const double f1 = -k;
    const double f2 = -b;
    const double f3 = k * a * s + b * a * x.omega * c;
    const double f4 = b * a * s;
    Mat4 F = Mat4::Zero();
    F(0, 1) = 1.0;
    F(1, 0) = f1 / m;
    F(1, 1) = f2 / m;
    F(1, 2) = f3 / m;
    F(1, 3) = f4 / m;
    F(2, 3) = 1.0;
    // tau = -a f sin(theta)
    F(3, 0) = -a * s * f1 / J_x;
    F(3, 1) = -a * s * f2 / J_x;
    F(3, 2) = -a * (c * f + s * f3) / J_x;
    F(3, 3) = -a * s * f4 / J_x;
    return F;
}

/// Gradient matrix at the nominal state, transformation and transformed
/// dynamics. Throws for alpha outside [0, pi/2).
inline LinearModel2D linearize_2d(const PlanarLinearization& p) {
    if (!(p.alpha >= 0.0 && p.alpha < std::numbers::pi / 2.0))
        throw InputError("alpha must lie in [0, pi/2): the depth transformation degenerates");
    if (!(p.m > 0.0 && p.J_x > 0.0 && p.a > 0.0)) throw InputError("m, J_x and a must be positive");
    LinearModel2D lm;
    const double c = std::cos(p.alpha);
    lm.c_alpha = c;
    lm.m_a = reduced_mass(p.m, p.J_x, p.a, p.alpha);
    lm.nominal.z = -p.a * std::sin(p.alpha);
    lm.nominal.theta = std::numbers::pi / 2.0 - p.alpha;

    const double kac = p.k * p.a * c;
    const double bac = p.b * p.a * c;
    lm.F_x << 0.0, 1.0, 0.0, 0.0,
              -p.k / p.m, -p.b / p.m, kac / p.m, bac / p.m,
              0.0, 0.0, 0.0, 1.0,
              kac / p.J_x, bac / p.J_x, -kac * p.a * c / p.J_x, -bac * p.a * c / p.J_x;
    lm.T = depth_transform(p.a, c);
    lm.F_y = transformed_dynamics(p.m, lm.m_a, p.k, p.b);
    return lm;
}

inline LinearModel2D linearize_2d(const BodyParams& body, const ContactParams& contact) {
    return linearize_2d(PlanarLinearization::from(body, contact));
}

/// Similarity route T F_x T^-1, for cross-checking the closed form.
inline Mat4 similarity_dynamics(const LinearModel2D& lm) { return lm.T * lm.F_x * lm.T.inverse(); }

/// Coefficients (mu, beta, kappa) of mu d'' + beta d'(t-h) + kappa d(t-h) = 0.
struct DdeCoefficients {
    double mu{0.0};
    double beta{0.0};
    double kappa{0.0};
};

inline DdeCoefficients penetration_dde_coeffs(const PlanarLinearization& p) {
    return {reduced_mass(p.m, p.J_x, p.a, p.alpha), p.b, p.k};
}

inline DdeCoefficients penetration_dde_coeffs(const BodyParams& body, const ContactParams& contact) {
    return penetration_dde_coeffs(PlanarLinearization::from(body, contact));
}

/// Contact-mode factor of the characteristic quasi-polynomial,
/// mu s^2 + exp(-s h)(beta s + kappa).
inline std::complex<double> characteristic_value(double mu, double beta, double kappa, double h,
                                                 std::complex<double> s) {
    return mu * s * s + std::exp(-s * h) * (beta * s + kappa);
}

/// Full fourth-order characteristic function [m s^2][m_a s^2 + exp(-s h)(b s + k)].
inline std::complex<double> characteristic_value_4th(double m, const DdeCoefficients& c, double h,
                                                     std::complex<double> s) {
    return m * s * s * characteristic_value(c.mu, c.beta, c.kappa, h, s);
}

// ---------------------------------------------------------------------------
// Linear delayed simulations
// ---------------------------------------------------------------------------

/// Perturbation dynamics about the nominal state: kinematic rows use the
/// current state, force and torque rows use the state at t - h.
inline std::vector<Vec4> simulate_linear_perturbation(const LinearModel2D& lm, const Vec4& dx0,
                                                      double h, double dt, std::int64_t steps) {
    const Mat4& F = lm.F_x;
    auto rhs = [&F](const Vec4& x, const Vec4& xd) {
        Vec4 dx;
        dx(0) = x(1);
        dx(1) = F.row(1).dot(xd);
        dx(2) = x(3);
        dx(3) = F.row(3).dot(xd);
        return dx;
    };
    return integrate_delayed<Vec4>(dx0, h, dt, steps, rhs);
}

/// Penetration depth alone: mu d'' = -beta d'(t-h) - kappa d(t-h).
inline std::vector<Vec2> simulate_penetration_dde(const DdeCoefficients& c, const Vec2& d0,
                                                  double h, double dt, std::int64_t steps) {
    auto rhs = [&c](const Vec2& x, const Vec2& xd) {
        return Vec2{x(1), -(c.kappa * xd(0) + c.beta * xd(1)) / c.mu};
    };
    return integrate_delayed<Vec2>(d0, h, dt, steps, rhs);
}

}  // namespace hilsim
