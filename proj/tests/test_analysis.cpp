#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace hilsim;

TEST(Restitution, TableTwoRows) {
    EXPECT_NEAR(restitution(21.0, 23.4), 1.11, 0.005);
    EXPECT_DOUBLE_EQ(restitution(18.0, 18.0), 1.0);
}

TEST(Restitution, UsesMagnitudes) {
    ContactEvent e;
    e.v_minus = -0.02;
    e.v_plus = 0.018;
    EXPECT_NEAR(restitution(e), 0.9, 1e-15);
}

TEST(Restitution, ScaleInvariant) {
    for (double s : {1e-3, 0.5, 7.0, 1e4}) EXPECT_NEAR(restitution(21.0 * s, 23.4 * s), restitution(21.0, 23.4), 1e-15);
}

TEST(Restitution, RequiresImpactVelocity) {
    try {
        restitution(0.0, 0.1);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_STREQ(e.what(), "no impact velocity");
    }
}

TEST(Restitution, Classification) {
    EXPECT_EQ(classify_restitution(0.82), Verdict::stable);
    EXPECT_EQ(classify_restitution(1.005), Verdict::neutral);
    EXPECT_EQ(classify_restitution(1.6), Verdict::unstable);
    EXPECT_EQ(classify_restitution(1.03, 0.05), Verdict::neutral);
}

TEST(Restitution, AgreesWithLinearVerdictAtOperatingPoint) {
    for (double b : {0.0, 45.0, 70.0}) {
        const double eps = fixtures::table1_restitution(b);
        const PlanarLinearization p{fixtures::kMass, fixtures::kRollInertia, fixtures::kProbe, fixtures::kAlpha,
                                    fixtures::kStiffness, b};
        const Verdict lin = verdict_4th_order(p, fixtures::kDelay).verdict;
        EXPECT_EQ(classify_restitution(eps), lin) << "b = " << b << " eps = " << eps;
    }
}

namespace {

PortSample axis_sample(int axis, double f, double v) {
    PortSample s;
    s.force[axis] = f;
    s.velocity[axis] = v;
    return s;
}

}  // namespace

TEST(ObservedEnergy, IdenticalStreamsCancel) {
    std::vector<PortSample> s;
    for (int i = 0; i < 100; ++i) {
        PortSample p;
        p.force = {0.1 * i, -0.3, 2.0};
        p.torque = {0.01, 0.02 * i, -0.5};
        p.velocity = {0.001, 0.002, -0.003 * i};
        p.angular_velocity = {0.4, -0.1, 0.05};
        s.push_back(p);
    }
    for (const auto& r : observed_energy(s, s)) {
        EXPECT_EQ(r.total, 0.0);
        EXPECT_EQ(r.cls, EnergyClass::lossless);
    }
}

TEST(ObservedEnergy, RectangleSum) {
    std::vector<PortSample> m(250, axis_sample(1, 2.0, 0.5));
    std::vector<PortSample> in(250);
    const auto rec = observed_energy(m, in, 0.004);
    EXPECT_NEAR(rec.back().total, 1.0, 1e-12);
    EXPECT_NEAR(rec.back().channels[1], 1.0, 1e-12);
    EXPECT_NEAR(rec.back().t, 1.0, 1e-12);
    EXPECT_EQ(rec.back().cls, EnergyClass::active);
}

TEST(ObservedEnergy, TotalIsSumOfChannels) {
    std::vector<PortSample> m, in;
    for (int i = 0; i < 50; ++i) {
        PortSample a;
        a.force = {1.0, -2.0, 0.5 * i};
        a.velocity = {0.1, 0.3, -0.2};
        a.torque = {0.2, 0.1, -0.1};
        a.angular_velocity = {1.0, -1.0, 0.5};
        m.push_back(a);
        in.push_back(axis_sample(2, 1.0, 0.1));
    }
    for (const auto& r : observed_energy(m, in, 0.004)) {
        double s = 0.0;
        for (double c : r.channels) s += c;
        EXPECT_EQ(r.total, s);
    }
}

TEST(ObservedEnergy, AdditiveOverWindows) {
    // dyadic values keep every partial sum exact
    const double dt = 0.0078125;
    std::vector<PortSample> m, in;
    for (int i = 0; i < 64; ++i) {
        m.push_back(axis_sample(i % 3, 0.25 * (i % 5), 0.5 - 0.125 * (i % 4)));
        in.push_back(axis_sample((i + 1) % 3, 0.5, 0.125 * (i % 3)));
    }
    const std::size_t M = 23;
    const auto all = observed_energy(m, in, dt);
    const auto head = observed_energy({m.begin(), m.begin() + M}, {in.begin(), in.begin() + M}, dt);
    const auto tail = observed_energy({m.begin() + M, m.end()}, {in.begin() + M, in.end()}, dt);
    EXPECT_EQ(all.back().total, head.back().total + tail.back().total);
    for (int c = 0; c < 6; ++c) EXPECT_EQ(all.back().channels[c], head.back().channels[c] + tail.back().channels[c]);
}

TEST(ObservedEnergy, LengthMismatchIsError) {
    EXPECT_THROW(observed_energy(std::vector<PortSample>(3), std::vector<PortSample>(4)), InputError);
}

TEST(ObservedEnergy, ClassificationTolerance) {
    EXPECT_EQ(classify_energy(5e-7, 1e-6), EnergyClass::lossless);
    EXPECT_EQ(classify_energy(-2e-6, 1e-6), EnergyClass::passive);
    EXPECT_EQ(classify_energy(2e-6, 1e-6), EnergyClass::active);
    EXPECT_THROW(ObservedEnergy(0.0), InputError);
}

TEST(ObservedEnergy, StreamingMatchesBatch) {
    std::vector<PortSample> m, in;
    for (int i = 0; i < 20; ++i) {
        m.push_back(axis_sample(0, 0.3 * i, 0.1));
        in.push_back(axis_sample(0, 0.2 * i, 0.1));
    }
    ObservedEnergy acc(0.004);
    std::vector<EnergyRecord> streamed;
    for (std::size_t i = 0; i < m.size(); ++i) streamed.push_back(acc.add(m[i], in[i]));
    const auto batch = observed_energy(m, in, 0.004);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(streamed[i].total, batch[i].total);
    EXPECT_EQ(acc.count(), m.size());
}

TEST(ObservedEnergy, DampedZeroDelayRunIsPassive) {
    const auto cfg = fixtures::table1_config(0.0, 0.8);
    const auto body = fixtures::planar_body();
    const auto run = simulate(cfg.initial_2d, cfg, body, fixtures::planar_contact(40.0));
    const auto rec = observed_energy(port_stream(run.trajectory),
                                     port_stream(run.trajectory, body, fixtures::planar_contact(0.0)), cfg.dt);
    bool seen = false;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        seen = seen || run.trajectory.in_contact[i];
        if (seen) {
            EXPECT_LT(rec[i].total, 0.0) << i;
        } else {
            EXPECT_EQ(rec[i].total, 0.0) << i;
        }
    }
    EXPECT_TRUE(seen);
    EXPECT_EQ(rec.back().cls, EnergyClass::passive);
}

TEST(Resample, LinearInterpolationOntoGrid) {
    const std::vector<double> t{0.0, 0.001, 0.003, 0.01};
    std::vector<PortSample> s;
    for (double v : {0.0, 1.0, 3.0, 10.0}) s.push_back(axis_sample(2, v, 1.0));
    const auto r = resample(t, s, 0.002);
    ASSERT_EQ(r.size(), 6u);
    for (std::size_t k = 0; k < r.size(); ++k) EXPECT_NEAR(r[k].force.z(), 2.0 * k, 1e-12);
}

TEST(Resample, IdentityOnMatchingGrid) {
    std::vector<double> t;
    std::vector<PortSample> s;
    for (int i = 0; i < 10; ++i) {
        t.push_back(0.004 * i);
        s.push_back(axis_sample(0, i, -i));
    }
    const auto r = resample(t, s, 0.004);
    ASSERT_EQ(r.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(r[i].force.x(), s[i].force.x(), 1e-12);
}

TEST(Resample, RejectsNonMonotoneTime) {
    EXPECT_THROW(resample({0.0, 0.0}, std::vector<PortSample>(2), 0.1), InputError);
}
