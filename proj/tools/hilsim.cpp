// hilsim: command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 numerical divergence.

#include "hilsim/hilsim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using hilsim::InputError;
using nlohmann::json;

constexpr int kExitInput = 1;
constexpr int kExitDiverged = 2;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        write_file(path, content);
}

/// Runs validate() and prints one line per diagnostic. Returns the
/// renormalized bundle or throws.
hilsim::ValidatedBundle checked_bundle(const hilsim::Scenario& sc) {
    const auto vr = hilsim::validate(sc.body, sc.contact, sc.sim);
    if (!vr.ok()) {
        for (const auto& d : vr.diagnostics) std::cerr << "error: " << d.field << ": " << d.message << '\n';
        throw InputError("scenario failed validation");
    }
    return vr.bundle;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        std::stringstream ss(spec);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
            throw InputError("grid must be start:stop:count");
        const double lo = std::stod(a), hi = std::stod(b);
        const int n = std::stoi(c);
        if (n < 1) throw InputError("grid count must be >= 1");
        if (n == 1) return {lo};
        for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1));
        return grid;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    if (grid.empty()) throw InputError("empty grid");
    return grid;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::string mode;
    std::string out = "run";
    std::optional<double> b_v, h, t_end, dt;
};

template <class State>
int finish_simulation(const hilsim::SimulationResult<State>& res, const hilsim::Scenario& sc,
                      const SimulateArgs& args, const char* mode, double seconds) {
    std::ostringstream traj;
    hilsim::write_trajectory_csv(traj, res.trajectory);
    write_file(args.out + ".traj.csv", traj.str());
    write_file(args.out + ".events.json",
               hilsim::events_json(res.events, sc.analysis.neutral_band).dump(2) + "\n");

    json meta;
    meta["scenario"] = args.scenario;
    meta["mode"] = mode;
    meta["h"] = hilsim::num(sc.sim.h);
    meta["b_v"] = hilsim::num(sc.contact.b_v);
    meta["dt"] = hilsim::num(sc.sim.dt);
    meta["t_end"] = hilsim::num(sc.sim.t_end);
    meta["steps"] = res.steps;
    meta["status"] = res.status == hilsim::SimStatus::completed ? "completed" : "diverged";
    meta["diagnostic"] = res.diagnostic;
    meta["events"] = res.events.size();
    meta["wall_time_s"] = seconds;
    write_file(args.out + ".meta.json", meta.dump(2) + "\n");

    for (const auto& e : res.events) {
        if (e.v_minus == 0.0) continue;
        std::cout << "contact t=[" << hilsim::fmt(e.t_in) << ", " << hilsim::fmt(e.t_out)
                  << "] s  epsilon=" << hilsim::fmt(hilsim::restitution(e)) << '\n';
    }
    if (res.status == hilsim::SimStatus::diverged) {
        std::cerr << "diverged: " << res.diagnostic << '\n';
        return kExitDiverged;
    }
    return 0;
}

int cmd_simulate(const SimulateArgs& args) {
    hilsim::Scenario sc = hilsim::load_scenario(args.scenario);
    if (args.b_v) sc.contact.b_v = *args.b_v;
    if (args.h) sc.sim.h = *args.h;
    if (args.t_end) sc.sim.t_end = *args.t_end;
    if (args.dt) sc.sim.dt = *args.dt;
    if (args.mode == "2d")
        sc.sim.mode = hilsim::SimMode::planar;
    else if (args.mode == "3d")
        sc.sim.mode = hilsim::SimMode::spatial;
    const hilsim::ValidatedBundle b = checked_bundle(sc);
    sc.body = b.body;
    sc.contact = b.contact;
    sc.sim = b.sim;

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if (sc.sim.mode == hilsim::SimMode::planar) {
        const auto res = hilsim::simulate_2d(b);
        return finish_simulation(res, sc, args, "2d", elapsed());
    }
    const auto res = hilsim::simulate_3d(b);
    return finish_simulation(res, sc, args, "3d", elapsed());
}

// ---------------------------------------------------------------------------

struct StabilityArgs {
    std::optional<double> mu, beta, kappa, h;
    int n = 3;
    double band = 0.01;
    bool as_json = false;
    std::string scenario;
};

int cmd_stability(const StabilityArgs& a) {
    if (!a.scenario.empty()) {
        hilsim::Scenario sc = hilsim::load_scenario(a.scenario);
        if (a.beta) sc.contact.b_v = *a.beta;
        if (a.kappa) sc.contact.k_v = *a.kappa;
        if (a.h) sc.sim.h = *a.h;
        const hilsim::ValidatedBundle b = checked_bundle(sc);
        const auto p = hilsim::PlanarLinearization::from(b.body, b.contact);
        const auto c = hilsim::penetration_dde_coeffs(p);
        auto r = hilsim::analyze(c.mu, c.beta, c.kappa, a.n);
        const auto v = hilsim::verdict_4th_order(p, b.sim.h, a.band);
        r.h = b.sim.h;
        r.verdict = v.verdict;
        json j = hilsim::stability_json(r);
        j["h_c_penetration"] = hilsim::num(v.h_c_penetration);
        j["h_c_translation"] = hilsim::num(v.h_c_translation);
        j["h_c_overall"] = hilsim::num(v.h_c);
        if (a.as_json) {
            std::cout << j.dump(2) << '\n';
        } else {
            std::cout << "m_a      = " << hilsim::fmt(c.mu) << " kg\n"
                      << "omega_c  = " << hilsim::fmt(r.omega_c) << " rad/s\n"
                      << "h_c(m_a) = " << hilsim::fmt(v.h_c_penetration) << " s\n"
                      << "h_c(m)   = " << hilsim::fmt(v.h_c_translation) << " s\n"
                      << "h        = " << hilsim::fmt(b.sim.h) << " s\n"
                      << "verdict  = " << hilsim::to_string(v.verdict) << '\n';
        }
        return 0;
    }
    if (!a.mu || !a.beta || !a.kappa)
        throw InputError("give --mu, --beta and --kappa, or --from-scenario");
    const auto r = hilsim::analyze(*a.mu, *a.beta, *a.kappa, a.n, a.h, a.band);
    if (a.as_json) {
        std::cout << hilsim::stability_json(r).dump(2) << '\n';
        return 0;
    }
    std::cout << "omega_c = " << hilsim::fmt(r.omega_c) << " rad/s\n"
              << "h_c     = " << hilsim::fmt(r.h_c) << " s\n"
              << "h_n     =";
    for (double h : r.h_n) std::cout << ' ' << hilsim::fmt(h);
    std::cout << " s\n"
              << "sigma   = " << hilsim::fmt(r.sigma) << '\n';
    if (r.verdict) std::cout << "verdict = " << hilsim::to_string(*r.verdict) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct BoundaryArgs {
    std::string axis;
    double mu = 60.0, beta = 50.0, kappa = 1000.0;
    std::string grid;
    std::string out;
};

int cmd_boundary(const BoundaryArgs& a) {
    hilsim::BoundaryAxis axis;
    if (a.axis == "beta")
        axis = hilsim::BoundaryAxis::beta_vs_h;
    else if (a.axis == "kappa")
        axis = hilsim::BoundaryAxis::kappa_vs_h;
    else if (a.axis == "mu")
        axis = hilsim::BoundaryAxis::mu_vs_h;
    else
        throw InputError("axis must be beta, kappa or mu");
    const auto pts = hilsim::stability_boundary(axis, {a.mu, a.beta, a.kappa}, parse_grid(a.grid));
    std::ostringstream os;
    hilsim::write_curve_csv(os, pts);
    emit(a.out, os.str());
    for (const auto& p : pts)
        if (!p.ok()) std::cerr << "warning: x=" << hilsim::fmt(p.x) << ": " << p.error << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct LinearizeArgs {
    std::string scenario;
    std::optional<double> beta;
    std::string out;
};

int cmd_linearize(const LinearizeArgs& a) {
    hilsim::Scenario sc = hilsim::load_scenario(a.scenario);
    if (a.beta) sc.contact.b_v = *a.beta;
    const hilsim::ValidatedBundle b = checked_bundle(sc);
    const auto lm = hilsim::linearize_2d(b.body, b.contact);
    json j;
    j["state"] = {"z", "v_z", "theta", "omega"};
    j["m_a"] = hilsim::num(lm.m_a);
    j["k"] = hilsim::num(b.contact.analysis_stiffness());
    j["b"] = hilsim::num(b.contact.b_v);
    j["nominal"] = {{"z", hilsim::num(lm.nominal.z)}, {"theta", hilsim::num(lm.nominal.theta)}};
    j["F_x"] = hilsim::matrix_json(lm.F_x);
    j["T"] = hilsim::matrix_json(lm.T);
    j["F_y"] = hilsim::matrix_json(lm.F_y);
    emit(a.out, j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

struct EnergyArgs {
    std::string measured, commanded, out;
    double dt = 0.004;
    double tol = 1e-6;
};

int cmd_energy(const EnergyArgs& a) {
    const auto m = hilsim::read_port_csv(a.measured);
    const auto c = hilsim::read_port_csv(a.commanded);
    if (m.t.size() != c.t.size())
        throw InputError("row count mismatch: " + std::to_string(m.t.size()) + " measured vs " +
                         std::to_string(c.t.size()) + " commanded");
    const auto ms = hilsim::resample(m.t, m.samples, a.dt);
    const auto cs = hilsim::resample(c.t, c.samples, a.dt);
    const auto recs = hilsim::observed_energy(ms, cs, a.dt, a.tol);
    std::ostringstream os;
    hilsim::write_energy_csv(os, recs);
    emit(a.out, os.str());
    if (!recs.empty()) std::cerr << "final class: " << hilsim::to_string(recs.back().cls) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hilsim: delayed contact dynamics and stability analysis for docking simulators.\n"
                 "Units are SI throughout: m, s, kg, rad, N/m, N s/m. Scenario angles may be\n"
                 "given in degrees with *_deg keys."};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Integrate a scenario; writes <out>.traj.csv, <out>.events.json, <out>.meta.json");
    s->add_option("scenario", sim.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    s->add_option("--mode", sim.mode, "2d or 3d (default: from scenario)")->check(CLI::IsMember({"2d", "3d"}));
    s->add_option("--out", sim.out, "Output prefix")->capture_default_str();
    s->add_option("--b-v", sim.b_v, "Override virtual damping b_v [N s/m]");
    s->add_option("--h", sim.h, "Override tracking delay h [s]");
    s->add_option("--t-end", sim.t_end, "Override duration [s]");
    s->add_option("--dt", sim.dt, "Override integration step [s]");

    StabilityArgs st;
    auto* t = app.add_subcommand("stability", "Critical delays of mu d'' + beta d'(t-h) + kappa d(t-h) = 0");
    t->add_option("--mu", st.mu, "Effective inertia mu [kg]");
    t->add_option("--beta", st.beta, "Damping beta [N s/m]");
    t->add_option("--kappa", st.kappa, "Stiffness kappa [N/m]");
    t->add_option("--h", st.h, "Delay to classify [s]");
    t->add_option("--n", st.n, "Number of critical delays to list")->capture_default_str();
    t->add_option("--band", st.band, "Relative neutrality band around h_c")->capture_default_str();
    t->add_flag("--json", st.as_json, "Print a JSON object");
    t->add_option("--from-scenario", st.scenario, "Use the planar linearization of a scenario")
        ->check(CLI::ExistingFile);

    BoundaryArgs bd;
    auto* b = app.add_subcommand("boundary", "Sweep the neutral-stability locus; CSV x_value,h_critical,omega_c,sigma");
    b->add_option("--axis", bd.axis, "Swept coefficient: beta, kappa or mu")->required();
    b->add_option("--mu", bd.mu, "Fixed mu [kg]")->capture_default_str();
    b->add_option("--beta", bd.beta, "Fixed beta [N s/m]")->capture_default_str();
    b->add_option("--kappa", bd.kappa, "Fixed kappa [N/m]")->capture_default_str();
    b->add_option("--grid", bd.grid, "start:stop:count or comma-separated values")->required();
    b->add_option("--out", bd.out, "Output CSV (default: stdout)");

    LinearizeArgs ln;
    auto* l = app.add_subcommand("linearize", "Dump F_x, T and F_y of the planar model as JSON");
    l->add_option("scenario", ln.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    l->add_option("--beta", ln.beta, "Override damping b [N s/m]");
    l->add_option("--out", ln.out, "Output JSON (default: stdout)");

    EnergyArgs en;
    auto* e = app.add_subcommand("energy", "Observed energy of measured vs commanded port streams; CSV in J");
    e->add_option("--measured", en.measured, "Measured stream CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--commanded", en.commanded, "Commanded stream CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--dt", en.dt, "Sample time [s]")->capture_default_str();
    e->add_option("--tol", en.tol, "Lossless tolerance [J]")->capture_default_str();
    e->add_option("--out", en.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kExitInput;
    }

    try {
        if (*s) return cmd_simulate(sim);
        if (*t) return cmd_stability(st);
        if (*b) return cmd_boundary(bd);
        if (*l) return cmd_linearize(ln);
        if (*e) return cmd_energy(en);
    } catch (const hilsim::NumericalError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitDiverged;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
