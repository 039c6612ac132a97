#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("hilsim_cli_" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    /// Runs the CLI with `args`, capturing stdout and stderr. Returns the exit status.
    int run(const std::string& args) {
        const std::string cmd = std::string("cd '") + dir_.string() + "' && '" + HILSIM_CLI_PATH + "' " + args +
                                " > stdout.txt 2> stderr.txt";
        const int raw = std::system(cmd.c_str());
        out_ = slurp("stdout.txt");
        err_ = slurp("stderr.txt");
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    }

    std::string slurp(const std::string& name) const {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void put(const std::string& name, const std::string& content) const {
        std::ofstream(dir_ / name, std::ios::binary) << content;
    }

    static std::string scenario(const std::string& name) {
        return std::string("'") + HILSIM_SCENARIO_DIR + "/" + name + ".json'";
    }

    double first_epsilon(const std::string& prefix) const {
        const json j = json::parse(slurp(prefix + ".events.json"));
        if (j["events"].empty()) return std::nan("");
        return j["events"][0]["epsilon"].get<double>();
    }

    fs::path dir_;
    std::string out_, err_;
};

}  // namespace

TEST_F(Cli, HelpMentionsUnits) {
    EXPECT_EQ(run("--help"), 0);
    EXPECT_NE(out_.find("SI"), std::string::npos);
    EXPECT_NE(out_.find("simulate"), std::string::npos);
}

TEST_F(Cli, SimulateTable1) {
    ASSERT_EQ(run("simulate " + scenario("table1") + " --out t1"), 0) << err_;
    EXPECT_NEAR(first_epsilon("t1"), 1.0, 0.1);
    const json meta = json::parse(slurp("t1.meta.json"));
    EXPECT_EQ(meta["status"], "completed");
    EXPECT_EQ(slurp("t1.traj.csv").substr(0, 10), "t,z,v_z,th");
}

TEST_F(Cli, SimulateUndampedIsStronglyActive) {
    ASSERT_EQ(run("simulate " + scenario("table1") + " --b-v 0 --out b0"), 0) << err_;
    EXPECT_NEAR(first_epsilon("b0"), 1.6, 0.16);
}

TEST_F(Cli, SimulateWithoutContactHasEmptyEventList) {
    ASSERT_EQ(run("simulate " + scenario("table1") + " --t-end 0.1 --out short"), 0) << err_;
    EXPECT_TRUE(json::parse(slurp("short.events.json"))["events"].empty());
}

TEST_F(Cli, SimulateIsDeterministic) {
    ASSERT_EQ(run("simulate " + scenario("fig9") + " --out a"), 0);
    ASSERT_EQ(run("simulate " + scenario("fig9") + " --out b"), 0);
    EXPECT_EQ(slurp("a.traj.csv"), slurp("b.traj.csv"));
    EXPECT_EQ(slurp("a.events.json"), slurp("b.events.json"));
}

TEST_F(Cli, SimulateThreeDimensional) {
    ASSERT_EQ(run("simulate " + scenario("demo3d") + " --out d3"), 0) << err_;
    EXPECT_EQ(json::parse(slurp("d3.meta.json"))["mode"], "3d");
    EXPECT_FALSE(json::parse(slurp("d3.events.json"))["events"].empty());
}

TEST_F(Cli, InvalidScenarioExitsOne) {
    put("bad.json", R"({"body": {"m": -1, "a": 0.3, "J_x": 1},
                        "contact": {"k_v": 3000, "alpha_deg": 30},
                        "sim": {"h": 0.016}})");
    EXPECT_EQ(run("simulate bad.json"), 1);
    EXPECT_NE(err_.find("m must be positive"), std::string::npos) << err_;
    put("typo.json", R"({"body": {"m": 60, "a": 0.3, "J_x": 1},
                         "contact": {"k_v": 3000, "alpha_deg": 30, "damping": 5},
                         "sim": {"h": 0.016}})");
    EXPECT_EQ(run("simulate typo.json"), 1);
    EXPECT_NE(err_.find("damping"), std::string::npos) << err_;
    EXPECT_EQ(run("simulate missing.json"), 1);
}

TEST_F(Cli, DivergenceExitsTwo) {
    put("div.json", R"({"body": {"m": 60, "a": 0.3, "m_a": 15.6},
                        "contact": {"k_v": 3000, "b_v": 0, "alpha_deg": 30, "activation": "bilateral"},
                        "sim": {"h": 0.05, "t_end": 20, "divergence_factor": 10,
                                "initial": {"z": -0.155, "v_z": -0.02, "theta_deg": 60}}})");
    EXPECT_EQ(run("simulate div.json --out div"), 2);
    EXPECT_EQ(json::parse(slurp("div.meta.json"))["status"], "diverged");
}

TEST_F(Cli, StabilityJson) {
    ASSERT_EQ(run("stability --mu 15.6 --beta 50 --kappa 3000 --h 0.016 --json"), 0) << err_;
    const json j = json::parse(out_);
    EXPECT_NEAR(j["h_c"].get<double>(), 0.01637151973, 1e-9);
    EXPECT_NEAR(j["omega_c"].get<double>(), 14.0539211212, 1e-6);
    EXPECT_EQ(j["verdict"], "stable");
    ASSERT_EQ(run("stability --mu 15.6 --beta 50 --kappa 3000 --h 0.0163 --json"), 0);
    EXPECT_EQ(json::parse(out_)["verdict"], "neutral");
}

TEST_F(Cli, StabilityUndampedHasZeroMargin) {
    ASSERT_EQ(run("stability --mu 15.6 --beta 0 --kappa 3000 --json"), 0) << err_;
    EXPECT_EQ(json::parse(out_)["h_c"].get<double>(), 0.0);
}

TEST_F(Cli, StabilityRejectsBadCoefficients) {
    EXPECT_EQ(run("stability --mu 0 --beta 50 --kappa 3000"), 1);
    EXPECT_EQ(run("stability --mu 15.6 --beta 50"), 1);
}

TEST_F(Cli, StabilityFromScenario) {
    ASSERT_EQ(run("stability --from-scenario " + scenario("table1") + " --h 0.016 --beta 45 --json"), 0) << err_;
    EXPECT_EQ(json::parse(out_)["verdict"], "unstable");
    ASSERT_EQ(run("stability --from-scenario " + scenario("table1") + " --h 0.016 --beta 70 --json"), 0) << err_;
    EXPECT_EQ(json::parse(out_)["verdict"], "stable");
}

TEST_F(Cli, BoundaryCurve) {
    ASSERT_EQ(run("boundary --axis beta --mu 60 --kappa 1000 --grid 5:100:20 --out curve.csv"), 0) << err_;
    std::istringstream in(slurp("curve.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x_value,h_critical,omega_c,sigma");
    double prev = 0.0, lo = 1.0, hi = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const double h = std::stod(line.substr(c1 + 1, line.find(',', c1 + 1) - c1 - 1));
        EXPECT_GT(h, prev);
        prev = h;
        lo = std::min(lo, h);
        hi = std::max(hi, h);
        ++rows;
    }
    EXPECT_EQ(rows, 20);
    EXPECT_LT(lo, 0.02);
    EXPECT_GT(hi, 0.02);
}

TEST_F(Cli, BoundarySinglePoint) {
    ASSERT_EQ(run("boundary --axis mu --beta 50 --kappa 1000 --grid 60"), 0) << err_;
    EXPECT_EQ(std::count(out_.begin(), out_.end(), '\n'), 2);
    EXPECT_NE(out_.find("60,0.0493085"), std::string::npos) << out_;
    EXPECT_EQ(run("boundary --axis zeta --grid 1:2:3"), 1);
}

TEST_F(Cli, LinearizeDumpsMatrices) {
    ASSERT_EQ(run("linearize " + scenario("fig9")), 0) << err_;
    const json j = json::parse(out_);
    ASSERT_EQ(j["F_x"].size(), 4u);
    for (const auto& row : j["F_x"]) EXPECT_EQ(row.size(), 4u);
    EXPECT_NEAR(j["F_x"][3][0].get<double>(), 547.742563077, 1e-6);
    EXPECT_NEAR(j["m_a"].get<double>(), 15.6, 1e-9);
}

TEST_F(Cli, EnergyOfIdenticalStreamsIsZero) {
    ASSERT_EQ(run("simulate " + scenario("fig9") + " --out s"), 0);
    ASSERT_EQ(run("energy --measured s.traj.csv --commanded s.traj.csv --dt 0.001"), 0) << err_;
    std::istringstream in(out_);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.substr(line.find(',')), ",0,0,0,0,0,0,0,lossless") << line;
        ++rows;
    }
    EXPECT_GT(rows, 0);
    EXPECT_NE(err_.find("final class: lossless"), std::string::npos);
}

TEST_F(Cli, EnergyDampedAgainstUndampedIsPassive) {
    ASSERT_EQ(run("simulate " + scenario("fig9") + " --h 0 --out damped"), 0);
    ASSERT_EQ(run("simulate " + scenario("fig9") + " --h 0 --b-v 0 --out elastic"), 0);
    ASSERT_EQ(run("energy --measured damped.traj.csv --commanded elastic.traj.csv --dt 0.001 --out e.csv"), 0)
        << err_;
    EXPECT_NE(err_.find("final class: passive"), std::string::npos) << err_;
}

TEST_F(Cli, EnergyRowMismatchExitsOne) {
    put("m.csv", "t,f_x,v_x\n0,1,1\n0.004,1,1\n0.008,1,1\n");
    put("c.csv", "t,f_x,v_x\n0,1,1\n0.004,1,1\n");
    EXPECT_EQ(run("energy --measured m.csv --commanded c.csv"), 1);
    EXPECT_NE(err_.find("mismatch"), std::string::npos);
}
