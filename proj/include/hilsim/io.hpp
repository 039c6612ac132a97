#pragma once

// Deterministic CSV/JSON emission. Every number goes through %.9g so
// repeated runs produce byte-identical files.

#include "hilsim/analysis.hpp"
#include "hilsim/dynamics.hpp"
#include "hilsim/stability.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hilsim {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

namespace detail {
inline void row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << fmt(v);
        first = false;
    }
}
}  // namespace detail

inline constexpr const char* kTrajectoryHeader2D = "t,z,v_z,theta,omega,d,d_dot,f,tau";
inline constexpr const char* kTrajectoryHeader3D =
    "t,r_x,r_y,r_z,v_x,v_y,v_z,dc3_x,dc3_y,dc3_z,omega_x,omega_y,omega_z,d,d_dot,f,f_x,f_y,f_z,"
    "tau_x,tau_y,tau_z";

inline void write_trajectory_csv(std::ostream& os, const Trajectory<ChaserState2D>& tr) {
    os << kTrajectoryHeader2D << '\n';
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const auto& x = tr.x[i];
        const auto& p = tr.penetration[i];
        const auto& w = tr.wrench[i];
        detail::row(os, {tr.t[i], x.z, x.v_z, x.theta, x.omega, p.d, p.d_dot, w.f, w.tau_B.x()});
        os << '\n';
    }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory<ChaserState3D>& tr) {
    os << kTrajectoryHeader3D << '\n';
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const auto& x = tr.x[i];
        const auto& p = tr.penetration[i];
        const auto& w = tr.wrench[i];
        detail::row(os, {tr.t[i], x.r.x(), x.r.y(), x.r.z(), x.v.x(), x.v.y(), x.v.z(), x.d_c3.x(),
                         x.d_c3.y(), x.d_c3.z(), x.omega.x(), x.omega.y(), x.omega.z(), p.d, p.d_dot,
                         w.f, w.force_N.x(), w.force_N.y(), w.force_N.z(), w.tau_B.x(), w.tau_B.y(),
                         w.tau_B.z()});
        os << '\n';
    }
}

inline void write_curve_csv(std::ostream& os, const std::vector<BoundaryPoint>& pts) {
    os << "x_value,h_critical,omega_c,sigma\n";
    for (const auto& p : pts) {
        if (p.ok()) {
            detail::row(os, {p.x, p.h_critical, p.omega_c, p.sigma});
        } else {
            os << fmt(p.x) << ",nan,nan,nan";
        }
        os << '\n';
    }
}

inline void write_energy_csv(std::ostream& os, const std::vector<EnergyRecord>& recs) {
    os << "t,dE_x,dE_y,dE_z,dE_rx,dE_ry,dE_rz,dE_total,class\n";
    for (const auto& r : recs) {
        const auto& c = r.channels;
        detail::row(os, {r.t, c[0], c[1], c[2], c[3], c[4], c[5], r.total});
        os << ',' << to_string(r.cls) << '\n';
    }
}

/// JSON numbers are routed through the same %.9g formatting.
inline nlohmann::json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return nlohmann::json::parse(fmt(x));
}

inline nlohmann::json events_json(const std::vector<ContactEvent>& events, double band) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : events) {
        nlohmann::json j;
        j["t_in"] = num(e.t_in);
        j["t_out"] = num(e.t_out);
        j["v_minus"] = num(e.v_minus);
        j["v_plus"] = num(e.v_plus);
        j["max_penetration"] = num(e.max_abs_d);
        if (e.v_minus != 0.0) {
            const Restitution r = evaluate_restitution(e, band);
            j["epsilon"] = num(r.epsilon);
            j["verdict"] = to_string(r.verdict);
        } else {
            j["epsilon"] = nullptr;
            j["verdict"] = nullptr;
        }
        arr.push_back(j);
    }
    return {{"events", arr}};
}

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(num(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

inline nlohmann::json stability_json(const StabilityResult& r) {
    nlohmann::json j;
    j["mu"] = num(r.mu);
    j["beta"] = num(r.beta);
    j["kappa"] = num(r.kappa);
    j["omega_c"] = num(r.omega_c);
    j["h_c"] = num(r.h_c);
    nlohmann::json hn = nlohmann::json::array();
    for (double h : r.h_n) hn.push_back(num(h));
    j["h_n"] = hn;
    j["sigma"] = num(r.sigma);
    if (r.h) j["h"] = num(*r.h);
    if (r.verdict) j["verdict"] = to_string(*r.verdict);
    return j;
}

// ---------------------------------------------------------------------------
// Reading port streams back from CSV
// ---------------------------------------------------------------------------

struct PortTable {
    std::vector<double> t;
    std::vector<PortSample> samples;
};

/// Reads a trajectory CSV (2D or 3D layout) or a plain port CSV with
/// columns among t, f_x.., tau_x.., v_x.., omega_x... Missing channels are zero.
inline PortTable read_port_csv(std::istream& in, const std::string& name = "input") {
    std::string line;
    if (!std::getline(in, line)) throw InputError(name + ": empty file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::map<std::string, int> idx;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) idx[cols[static_cast<std::size_t>(i)]] = i;
    if (!idx.count("t")) throw InputError(name + ": missing 't' column");
    const bool planar = idx.count("tau") && !idx.count("tau_x");

    // (sample field, axis) <- column name
    struct Map {
        int field;
        int axis;
        std::string col;
    };
    std::vector<Map> maps;
    auto add = [&](int field, int axis, const std::string& col) {
        if (idx.count(col)) maps.push_back({field, axis, col});
    };
    if (planar) {
        add(0, 2, "f");
        add(1, 0, "tau");
        add(2, 2, "v_z");
        add(3, 0, "omega");
    } else {
        const char* ax[3] = {"x", "y", "z"};
        for (int a = 0; a < 3; ++a) {
            add(0, a, std::string("f_") + ax[a]);
            add(1, a, std::string("tau_") + ax[a]);
            add(2, a, std::string("v_") + ax[a]);
            add(3, a, std::string("omega_") + ax[a]);
        }
    }

    PortTable out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(c, &used));
            } catch (const std::exception&) {
                vals.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        if (vals.size() != cols.size())
            throw InputError(name + ": line " + std::to_string(lineno) + " has " +
                             std::to_string(vals.size()) + " fields, expected " +
                             std::to_string(cols.size()));
        out.t.push_back(vals[static_cast<std::size_t>(idx["t"])]);
        PortSample s;
        for (const auto& m : maps) {
            const double v = vals[static_cast<std::size_t>(idx[m.col])];
            switch (m.field) {
                case 0: s.force[m.axis] = v; break;
                case 1: s.torque[m.axis] = v; break;
                case 2: s.velocity[m.axis] = v; break;
                default: s.angular_velocity[m.axis] = v; break;
            }
        }
        out.samples.push_back(s);
    }
    return out;
}

inline PortTable read_port_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_port_csv(in, path);
}

}  // namespace hilsim
