#pragma once

// Coefficient of restitution and the observed-energy passivity monitor.

#include "hilsim/core.hpp"
#include "hilsim/dynamics.hpp"
#include "hilsim/stability.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace hilsim {

// ---------------------------------------------------------------------------
// Restitution
// ---------------------------------------------------------------------------

struct Restitution {
    double epsilon{0.0};
    Verdict verdict{Verdict::stable};
};

/// |v_plus| / |v_minus|.
inline double restitution(double v_minus, double v_plus) {
    if (v_minus == 0.0 || !std::isfinite(v_minus)) throw InputError("no impact velocity");
    return std::abs(v_plus) / std::abs(v_minus);
}

inline double restitution(const ContactEvent& e) { return restitution(e.v_minus, e.v_plus); }

/// eps < 1 - band stable, eps > 1 + band unstable, otherwise neutral.
inline Verdict classify_restitution(double epsilon, double band = 0.01) {
    if (epsilon < 1.0 - band) return Verdict::stable;
    if (epsilon > 1.0 + band) return Verdict::unstable;
    return Verdict::neutral;
}

inline Restitution evaluate_restitution(const ContactEvent& e, double band = 0.01) {
    const double eps = restitution(e);
    return {eps, classify_restitution(eps, band)};
}

// ---------------------------------------------------------------------------
// Observed energy
// ---------------------------------------------------------------------------

/// One sample of a 6-axis power port: force/torque and the matching
/// translational/angular velocity.
struct PortSample {
    Vec3 force{Vec3::Zero()};
    Vec3 torque{Vec3::Zero()};
    Vec3 velocity{Vec3::Zero()};
    Vec3 angular_velocity{Vec3::Zero()};
};

enum class EnergyClass { passive, lossless, active };

inline const char* to_string(EnergyClass c) {
    switch (c) {
        case EnergyClass::passive: return "passive";
        case EnergyClass::lossless: return "lossless";
        case EnergyClass::active: return "active";
    }
    return "unknown";
}

struct EnergyRecord {
    double t{0.0};
    std::array<double, 6> channels{};  ///< x, y, z, rx, ry, rz [J]
    double total{0.0};                 ///< sum of channels [J]
    EnergyClass cls{EnergyClass::lossless};
};

inline EnergyClass classify_energy(double total, double tolerance) {
    if (std::abs(total) < tolerance) return EnergyClass::lossless;
    return total < 0.0 ? EnergyClass::passive : EnergyClass::active;
}

/// Streaming accumulator of dE = dt * sum(measured power - input power),
/// per axis.
class ObservedEnergy {
public:
    explicit ObservedEnergy(double dt = 0.004, double tolerance = 1e-6)
        : dt_{dt}, tol_{tolerance} {
        if (!(dt > 0.0)) throw InputError("dt must be positive");
        if (!(tolerance >= 0.0)) throw InputError("tolerance must be non-negative");
    }

    EnergyRecord add(const PortSample& measured, const PortSample& input) {
        for (int a = 0; a < 3; ++a) {
            sum_[a] += dt_ * (measured.force[a] * measured.velocity[a] -
                              input.force[a] * input.velocity[a]);
            sum_[3 + a] += dt_ * (measured.torque[a] * measured.angular_velocity[a] -
                                  input.torque[a] * input.angular_velocity[a]);
        }
        ++count_;
        return snapshot();
    }

    EnergyRecord snapshot() const {
        EnergyRecord r;
        r.t = static_cast<double>(count_) * dt_;
        r.channels = sum_;
        r.total = 0.0;
        for (double c : sum_) r.total += c;
        r.cls = classify_energy(r.total, tol_);
        return r;
    }

    std::size_t count() const { return count_; }
    double dt() const { return dt_; }

private:
    double dt_;
    double tol_;
    std::array<double, 6> sum_{};
    std::size_t count_{0};
};

/// Cumulative observed energy over two equally long streams. Record i covers
/// samples 0..i and carries t = (i + 1) dt.
inline std::vector<EnergyRecord> observed_energy(const std::vector<PortSample>& measured,
                                                 const std::vector<PortSample>& input,
                                                 double dt = 0.004, double tolerance = 1e-6) {
    if (measured.size() != input.size())
        throw InputError("channel length mismatch: " + std::to_string(measured.size()) + " vs " +
                         std::to_string(input.size()));
    ObservedEnergy acc(dt, tolerance);
    std::vector<EnergyRecord> out;
    out.reserve(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) out.push_back(acc.add(measured[i], input[i]));
    return out;
}

/// Linear interpolation of a sampled port stream onto t0, t0 + dt, ...
/// up to the last sample time. `t` must be strictly increasing.
inline std::vector<PortSample> resample(const std::vector<double>& t,
                                        const std::vector<PortSample>& s, double dt) {
    if (t.size() != s.size()) throw InputError("time and sample counts differ");
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    std::vector<PortSample> out;
    if (t.empty()) return out;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw InputError("time column must be strictly increasing");
    const double t0 = t.front();
    const auto n = static_cast<std::size_t>(std::floor((t.back() - t0) / dt + 1e-9)) + 1;
    out.reserve(n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double tk = t0 + static_cast<double>(k) * dt;
        while (j + 1 < t.size() && t[j + 1] <= tk) ++j;
        if (j + 1 >= t.size() || tk <= t[j]) {
            out.push_back(s[j]);
            continue;
        }
        const double w = (tk - t[j]) / (t[j + 1] - t[j]);
        const PortSample& a = s[j];
        const PortSample& b = s[j + 1];
        out.push_back({a.force + (b.force - a.force) * w, a.torque + (b.torque - a.torque) * w,
                       a.velocity + (b.velocity - a.velocity) * w,
                       a.angular_velocity + (b.angular_velocity - a.angular_velocity) * w});
    }
    return out;
}

/// Port stream of a recorded trajectory: the recorded contact load against
/// the chaser translational and body angular velocity.
inline PortSample port_sample(const ChaserState3D& x, const Wrench3D& w) {
    return {w.force_N, w.tau_B, x.v, x.omega};
}

inline PortSample port_sample(const ChaserState2D& x, const Wrench3D& w) {
    return port_sample(x.to_3d(), w);
}

template <class State>
std::vector<PortSample> port_stream(const Trajectory<State>& tr) {
    std::vector<PortSample> out;
    out.reserve(tr.x.size());
    for (std::size_t i = 0; i < tr.x.size(); ++i) out.push_back(port_sample(tr.x[i], tr.wrench[i]));
    return out;
}

/// Port stream with the load re-evaluated on each recorded state under a
/// different contact law, e.g. the elastic part only. Assumes h = 0.
template <class State>
std::vector<PortSample> port_stream(const Trajectory<State>& tr, const BodyParams& body,
                                    const ContactParams& contact) {
    std::vector<PortSample> out;
    out.reserve(tr.x.size());
    for (const auto& x : tr.x)
        out.push_back(port_sample(x, detail::as_wrench3d(contact_wrench_from_delayed(x, body, contact))));
    return out;
}

}  // namespace hilsim
