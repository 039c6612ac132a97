#pragma once

/**
 * @file stability.hpp
 * @brief Pole-location analysis of mu s^2 + exp(-s h)(beta s + kappa).
 *
 * Roots reach the imaginary axis at the crossing frequency omega_c, which
 * does not depend on h, whenever h hits one of the critical delays
 *   h_n = (atan(omega_c beta / kappa) + 2 pi n) / omega_c,  n = 0, 1, ...
 * Every crossing is a switch (roots leave the open left half-plane), so the
 * loop is stable exactly for h < h_c = h_0.
 */

#include "hilsim/core.hpp"
#include "hilsim/linear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace hilsim {

enum class Verdict { stable, neutral, unstable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::neutral: return "neutral";
        case Verdict::unstable: return "unstable";
    }
    return "unknown";
}

namespace detail {
inline void check_coefficients(double mu, double beta, double kappa) {
    if (!(mu > 0.0 && kappa > 0.0 && beta >= 0.0 && std::isfinite(mu) && std::isfinite(beta) &&
          std::isfinite(kappa)))
        throw InputError("need mu > 0, kappa > 0, beta >= 0");
}

/// sqrt(beta^4 / (4 mu^4) + kappa^2 / mu^2), evaluated without overflow.
inline double crossing_radius(double mu, double beta, double kappa) {
    const double q = beta * beta / (2.0 * mu * mu);
    return std::hypot(q, kappa / mu);
}
}  // namespace detail

/// Positive root of mu^2 w^4 - beta^2 w^2 - kappa^2 = 0.
inline double crossing_frequency(double mu, double beta, double kappa) {
    detail::check_coefficients(mu, beta, kappa);
    const double q = beta * beta / (2.0 * mu * mu);
    return std::sqrt(q + detail::crossing_radius(mu, beta, kappa));
}

/// Crossing-direction indicator. Equals d/dw(|D|^2 - |N|^2) at omega_c
/// divided by the positive factor 4 mu^2 omega_c, so its sign decides
/// switch (> 0) versus reversal (< 0).
inline double crossing_direction(double mu, double beta, double kappa) {
    detail::check_coefficients(mu, beta, kappa);
    return detail::crossing_radius(mu, beta, kappa);
}

struct CriticalDelays {
    double omega_c{0.0};
    double h_c{0.0};
    std::vector<double> h_n;  ///< n = 0 .. N-1, h_n[0] == h_c
};

inline CriticalDelays critical_delays(double mu, double beta, double kappa, int count = 1) {
    if (count < 1) throw InputError("need at least one critical delay");
    CriticalDelays out;
    out.omega_c = crossing_frequency(mu, beta, kappa);
    const double phase = std::atan(out.omega_c * beta / kappa);  // principal branch, [0, pi/2)
    out.h_n.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n)
        out.h_n.push_back((phase + 2.0 * std::numbers::pi * n) / out.omega_c);
    out.h_c = out.h_n.front();
    return out;
}

inline double critical_delay(double mu, double beta, double kappa) {
    return critical_delays(mu, beta, kappa, 1).h_c;
}

/// beta / kappa; accurate while omega_c beta << kappa.
inline double approx_critical_delay(double beta, double kappa) {
    if (!(kappa > 0.0)) throw InputError("kappa must be positive");
    return beta / kappa;
}

struct StabilityResult {
    double mu{0.0};
    double beta{0.0};
    double kappa{0.0};
    double omega_c{0.0};
    double h_c{0.0};
    std::vector<double> h_n;
    double sigma{0.0};
    std::optional<double> h;        ///< queried delay
    std::optional<Verdict> verdict;
};

/// Verdict from comparing h with h_c; |h - h_c| <= band * h_c is neutral.
inline Verdict classify_delay(double h, double h_c, double band) {
    if (h < h_c * (1.0 - band)) return Verdict::stable;
    if (h > h_c * (1.0 + band)) return Verdict::unstable;
    return Verdict::neutral;
}

inline StabilityResult analyze(double mu, double beta, double kappa, int count = 3,
                               std::optional<double> h = std::nullopt, double band = 0.01) {
    const CriticalDelays cd = critical_delays(mu, beta, kappa, count);
    StabilityResult r;
    r.mu = mu;
    r.beta = beta;
    r.kappa = kappa;
    r.omega_c = cd.omega_c;
    r.h_c = cd.h_c;
    r.h_n = cd.h_n;
    r.sigma = crossing_direction(mu, beta, kappa);
    if (h) {
        r.h = *h;
        r.verdict = classify_delay(*h, r.h_c, band);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Critical damping
// ---------------------------------------------------------------------------

struct CriticalDamping {
    double beta_c{0.0};
    double h_residual{0.0};  ///< h_c(beta_c) - h
};

/// Damping at which the first critical delay equals h, on the rising branch
/// of h_c(beta). h_c(beta) peaks at a finite damping, so delays above that
/// peak cannot be stabilized by damping alone.
inline CriticalDamping critical_damping(double mu, double kappa, double h,
                                        double beta_bound = 1e6) {
    if (!(h > 0.0)) throw InputError("h must be positive");
    detail::check_coefficients(mu, 0.0, kappa);
    auto hc = [&](double beta) { return critical_delay(mu, beta, kappa); };

    double lo = 0.0;
    double hi = std::max(1.0, kappa * h);
    while (hc(hi) <= h) {
        const double next = 2.0 * hi;
        // Past the peak h_c falls again; stop doubling once it turns.
        if (next > beta_bound || hc(next) < hc(hi)) {
            // Locate the peak between lo and next by golden-section search.
            double a = lo, b = std::min(next, beta_bound);
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = b - g * (b - a), d = a + g * (b - a);
            for (int i = 0; i < 200 && (b - a) > 1e-12 * std::max(1.0, b); ++i) {
                if (hc(c) > hc(d)) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - g * (b - a);
                d = a + g * (b - a);
            }
            const double peak = 0.5 * (a + b);
            if (hc(peak) <= h) throw InputError("no critical damping below bound");
            hi = peak;
            break;
        }
        lo = hi;
        hi = next;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (hc(mid) < h ? lo : hi) = mid;
    }
    const double beta_c = 0.5 * (lo + hi);
    return {beta_c, hc(beta_c) - h};
}

// ---------------------------------------------------------------------------
// Stability boundary sweeps
// ---------------------------------------------------------------------------

enum class BoundaryAxis { beta_vs_h, kappa_vs_h, mu_vs_h };

struct BoundaryPoint {
    double x{0.0};
    double h_critical{0.0};
    double omega_c{0.0};
    double sigma{0.0};
    std::string error;  ///< non-empty if this point failed

    bool ok() const { return error.empty(); }
};

/// Worker count for sweeps: HILSIM_THREADS if set, else hardware concurrency.
inline unsigned sweep_threads() {
    if (const char* env = std::getenv("HILSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Neutral-stability locus: for each grid value of the swept coefficient
/// (the other two held at `fixed`), the first critical delay. Points are
/// returned in grid order; failures are recorded per point.
inline std::vector<BoundaryPoint> stability_boundary(BoundaryAxis axis, const DdeCoefficients& fixed,
                                                     const std::vector<double>& grid,
                                                     unsigned threads = 0) {
    std::vector<BoundaryPoint> out(grid.size());
    auto solve = [&](std::size_t i) {
        DdeCoefficients c = fixed;
        const double x = grid[i];
        switch (axis) {
            case BoundaryAxis::beta_vs_h: c.beta = x; break;
            case BoundaryAxis::kappa_vs_h: c.kappa = x; break;
            case BoundaryAxis::mu_vs_h: c.mu = x; break;
        }
        BoundaryPoint p;
        p.x = x;
        try {
            const CriticalDelays cd = critical_delays(c.mu, c.beta, c.kappa, 1);
            p.h_critical = cd.h_c;
            p.omega_c = cd.omega_c;
            p.sigma = crossing_direction(c.mu, c.beta, c.kappa);
        } catch (const std::exception& e) {
            p.error = e.what();
        }
        out[i] = p;
    };

    if (threads == 0) threads = sweep_threads();
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) solve(i);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < grid.size(); i += threads) solve(i);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

// ---------------------------------------------------------------------------
// Fourth-order planar system
// ---------------------------------------------------------------------------

struct FourthOrderVerdict {
    double h_c_penetration{0.0};   ///< mu = m_a, beta = b, kappa = k
    double h_c_translation{0.0};   ///< mu = m, beta = 2b, kappa = 2k
    double h_c{0.0};               ///< smaller of the two
    Verdict verdict{Verdict::stable};
};

/// Critical delay of the linearized planar system: the smaller of the
/// penetration-mode value and the centre-of-mass subsystem value.
inline FourthOrderVerdict verdict_4th_order(const PlanarLinearization& p, double h,
                                            double band = 0.01) {
    if (!(h >= 0.0)) throw InputError("h must be non-negative");
    const DdeCoefficients pen = penetration_dde_coeffs(p);
    FourthOrderVerdict v;
    v.h_c_penetration = critical_delay(pen.mu, pen.beta, pen.kappa);
    v.h_c_translation = critical_delay(p.m, 2.0 * p.b, 2.0 * p.k);
    v.h_c = std::min(v.h_c_penetration, v.h_c_translation);
    v.verdict = classify_delay(h, v.h_c, band);
    return v;
}

inline FourthOrderVerdict verdict_4th_order(const BodyParams& body, const ContactParams& contact,
                                            double h, double band = 0.01) {
    return verdict_4th_order(PlanarLinearization::from(body, contact), h, band);
}

}  // namespace hilsim
