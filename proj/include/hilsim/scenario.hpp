#pragma once

/**
 * @file scenario.hpp
 * @brief JSON scenario files.
 *
 * Layout (SI units; angles in radians unless the key ends in `_deg`):
 *
 *   body:     m [kg]; one of J [3x3 kg m^2], J_x [kg m^2] or m_a [kg]
 *             (m_a recovers J_x from the reduced-mass relation); one of
 *             a [m] (probe along body z) or a_B [m, 3-vector]
 *   contact:  k_v [N/m], b_v [N s/m], springs [{k [N/m], l_hat}],
 *             alpha | alpha_deg, n_hat, activation ("unilateral"|"bilateral"),
 *             k_bound [N/m]
 *   sim:      h [s], dt [s], t_end [s], mode ("2d"|"3d"), initial,
 *             record_every, divergence_factor
 *             initial (2d): y, z [m], v_y, v_z [m/s], theta | theta_deg, omega [rad/s]
 *             initial (3d): r [m], v [m/s], d_c3, omega [rad/s]
 *   analysis: neutral_band, energy_tolerance [J], averaging_window [s]
 *
 * Unknown keys are rejected.
 */

#include "hilsim/core.hpp"
#include "hilsim/linear.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace hilsim {

struct AnalysisSettings {
    double neutral_band{0.01};
    double energy_tolerance{1e-6};
    double averaging_window{0.02};  ///< [s]
};

struct Scenario {
    BodyParams body;
    ContactParams contact;
    SimConfig sim;
    AnalysisSettings analysis;

    ValidatedBundle bundle() const { return {body, contact, sim}; }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InputError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) throw InputError(where + ": unknown key '" + it.key() + "'");
}

inline double number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw InputError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const std::string& key, const std::string& where,
                        double fallback) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

inline Vec3 vec3(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3) throw InputError(where + "." + key + ": expected 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw InputError(where + "." + key + ": expected 3 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

inline Mat3 mat3(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3) throw InputError(where + "." + key + ": expected 3x3 array");
    Mat3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_array() || v[i].size() != 3)
            throw InputError(where + "." + key + ": expected 3x3 array");
        for (int j = 0; j < 3; ++j) {
            if (!v[i][j].is_number()) throw InputError(where + "." + key + ": expected numbers");
            out(i, j) = v[i][j].get<double>();
        }
    }
    return out;
}

/// Reads `key` or `key_deg`; both present is an error.
inline std::optional<double> angle(const json& obj, const std::string& key,
                                   const std::string& where) {
    const bool rad = obj.contains(key);
    const bool deg = obj.contains(key + "_deg");
    if (rad && deg) throw InputError(where + ": give either " + key + " or " + key + "_deg");
    if (rad) return number(obj, key, where);
    if (deg) return deg_to_rad(number(obj, key + "_deg", where));
    return std::nullopt;
}

inline int exactly_one(const json& obj, std::initializer_list<const char*> keys) {
    int n = 0;
    for (const char* k : keys) n += obj.contains(k) ? 1 : 0;
    return n;
}

}  // namespace detail

/// Parses a scenario document. Structural problems (unknown keys, wrong
/// types, missing sections) throw InputError; value ranges are left to
/// validate().
inline Scenario parse_scenario(const nlohmann::json& doc) {
    using detail::angle;
    using detail::number;
    using detail::number_or;
    detail::reject_unknown(doc, "scenario", {"body", "contact", "sim", "analysis", "name", "description"});
    for (const char* s : {"body", "contact", "sim"})
        if (!doc.contains(s)) throw InputError(std::string("scenario: missing section '") + s + "'");

    Scenario sc;

    // contact first: alpha is needed to recover J_x from m_a
    const auto& c = doc.at("contact");
    detail::reject_unknown(c, "contact", {"k_v", "b_v", "springs", "alpha", "alpha_deg", "n_hat",
                                          "activation", "k_bound"});
    sc.contact.k_v = number_or(c, "k_v", "contact", 0.0);
    sc.contact.b_v = number_or(c, "b_v", "contact", 0.0);
    if (auto a = angle(c, "alpha", "contact")) sc.contact.alpha = *a;
    if (c.contains("n_hat")) sc.contact.n_hat = detail::vec3(c, "n_hat", "contact");
    if (c.contains("k_bound")) sc.contact.k_bound = number(c, "k_bound", "contact");
    if (c.contains("activation")) {
        const auto& act = c.at("activation");
        if (act == "unilateral")
            sc.contact.activation = Activation::unilateral;
        else if (act == "bilateral")
            sc.contact.activation = Activation::bilateral;
        else
            throw InputError("contact.activation: expected \"unilateral\" or \"bilateral\"");
    }
    if (c.contains("springs")) {
        const auto& arr = c.at("springs");
        if (!arr.is_array()) throw InputError("contact.springs: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string w = "contact.springs[" + std::to_string(i) + "]";
            detail::reject_unknown(arr[i], w, {"k", "l_hat"});
            sc.contact.springs.push_back({number(arr[i], "k", w), detail::vec3(arr[i], "l_hat", w)});
        }
    }

    const auto& b = doc.at("body");
    detail::reject_unknown(b, "body", {"m", "J", "J_x", "m_a", "a", "a_B"});
    if (!b.contains("m")) throw InputError("body: missing 'm'");
    sc.body.m = number(b, "m", "body");
    if (detail::exactly_one(b, {"a", "a_B"}) != 1) throw InputError("body: give exactly one of a, a_B");
    sc.body.a_B = b.contains("a") ? Vec3{0.0, 0.0, number(b, "a", "body")} : detail::vec3(b, "a_B", "body");
    if (detail::exactly_one(b, {"J", "J_x", "m_a"}) != 1)
        throw InputError("body: give exactly one of J, J_x, m_a");
    if (b.contains("J")) {
        sc.body.J = detail::mat3(b, "J", "body");
    } else {
        const double J_x = b.contains("J_x")
                               ? number(b, "J_x", "body")
                               : inertia_for_reduced_mass(sc.body.m, sc.body.a(), sc.contact.alpha,
                                                          number(b, "m_a", "body"));
        sc.body.J = Mat3::Identity() * J_x;
    }

    const auto& s = doc.at("sim");
    detail::reject_unknown(s, "sim", {"h", "dt", "t_end", "mode", "initial", "record_every",
                                      "divergence_factor"});
    sc.sim.h = number_or(s, "h", "sim", 0.0);
    sc.sim.dt = number_or(s, "dt", "sim", 1e-4);
    sc.sim.t_end = number_or(s, "t_end", "sim", 1.0);
    sc.sim.divergence_factor = number_or(s, "divergence_factor", "sim", 1e3);
    if (s.contains("record_every")) {
        if (!s.at("record_every").is_number_integer())
            throw InputError("sim.record_every: expected an integer");
        sc.sim.record_every = s.at("record_every").get<int>();
    }
    if (s.contains("mode")) {
        const auto& m = s.at("mode");
        if (m == "2d")
            sc.sim.mode = SimMode::planar;
        else if (m == "3d")
            sc.sim.mode = SimMode::spatial;
        else
            throw InputError("sim.mode: expected \"2d\" or \"3d\"");
    }
    if (s.contains("initial")) {
        const auto& i = s.at("initial");
        if (!i.is_object()) throw InputError("sim.initial: expected an object");
        const bool planar_keys = i.contains("z") || i.contains("theta") || i.contains("theta_deg") ||
                                 i.contains("y") || i.contains("v_z") || i.contains("v_y");
        if (planar_keys) {
            detail::reject_unknown(i, "sim.initial",
                                   {"y", "z", "v_y", "v_z", "theta", "theta_deg", "omega"});
            auto& x = sc.sim.initial_2d;
            x.y = number_or(i, "y", "sim.initial", 0.0);
            x.z = number_or(i, "z", "sim.initial", 0.0);
            x.v_y = number_or(i, "v_y", "sim.initial", 0.0);
            x.v_z = number_or(i, "v_z", "sim.initial", 0.0);
            x.theta = angle(i, "theta", "sim.initial").value_or(0.0);
            x.omega = number_or(i, "omega", "sim.initial", 0.0);
            sc.sim.initial_3d = x.to_3d();
        } else {
            detail::reject_unknown(i, "sim.initial", {"r", "v", "d_c3", "omega"});
            auto& x = sc.sim.initial_3d;
            if (i.contains("r")) x.r = detail::vec3(i, "r", "sim.initial");
            if (i.contains("v")) x.v = detail::vec3(i, "v", "sim.initial");
            if (i.contains("d_c3")) x.d_c3 = detail::vec3(i, "d_c3", "sim.initial");
            if (i.contains("omega")) {
                if (!i.at("omega").is_array())
                    throw InputError("sim.initial.omega: expected 3 numbers for a 3d state");
                x.omega = detail::vec3(i, "omega", "sim.initial");
            }
            sc.sim.initial_2d = from_planar_3d(x);
        }
    }

    if (doc.contains("analysis")) {
        const auto& a = doc.at("analysis");
        detail::reject_unknown(a, "analysis", {"neutral_band", "energy_tolerance", "averaging_window"});
        sc.analysis.neutral_band = number_or(a, "neutral_band", "analysis", 0.01);
        sc.analysis.energy_tolerance = number_or(a, "energy_tolerance", "analysis", 1e-6);
        sc.analysis.averaging_window = number_or(a, "averaging_window", "analysis", 0.02);
    }
    sc.sim.averaging_window = sc.analysis.averaging_window;
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("scenario '" + path + "': " + e.what());
    }
    try {
        return parse_scenario(doc);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("scenario '" + path + "': " + e.what());
    }
}

}  // namespace hilsim
