#include <gtest/gtest.h>

#include <cmath>

#include "etc/attack.hpp"

using etc::Vector;

namespace {

const std::vector<double> kTableAlpha{0.32, 0.24, 0.30, 0.42, 0.27, 0.32, 0.25, 0.23, 0.39, 0.28};

etc::AttackConfig table_config(double interval = 0.01) {
    Vector p = Eigen::Map<const Vector>(kTableAlpha.data(), 10);
    return etc::make_attack_config(p, 0.02, etc::default_attack_signal(10, 3), interval);
}

double stacked_energy(const std::vector<Vector>& eps) {
    double e = 0;
    for (const auto& v : eps) e += v.squaredNorm();
    return e;
}

}  // namespace

TEST(Attack, ZeroProbabilityNeverCorrupts) {
    auto cfg = etc::make_attack_config(Vector::Zero(3), 0.5, etc::default_attack_signal(3, 2), 0.01);
    etc::AttackProcess proc(cfg, etc::Rng(1));
    const std::vector<Vector> y(3, Vector::Constant(2, 1.5));
    for (int k = 0; k < 1000; ++k) {
        const auto s = proc.sample(k * 0.01);
        for (int a : s.alpha) ASSERT_EQ(a, 0);
        ASSERT_EQ(etc::corrupt_output(y, s), y);
    }
}

TEST(Attack, BernoulliRateFirstAgent) {
    auto cfg = table_config();
    etc::AttackProcess proc(cfg, etc::Rng(2024, 2));
    long hits = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) hits += proc.sample(k * 0.01).alpha[0];
    EXPECT_NEAR(static_cast<double>(hits) / n, 0.32, 0.01);
}

TEST(Attack, BernoulliRatesWithinThreeSigma) {
    auto cfg = table_config();
    etc::AttackProcess proc(cfg, etc::Rng(5, 2));
    const int n = 20000;
    std::vector<long> hits(10, 0);
    for (int k = 0; k < n; ++k) {
        const auto s = proc.sample(k * 0.01);
        for (int i = 0; i < 10; ++i) hits[i] += s.alpha[i];
    }
    for (int i = 0; i < 10; ++i) {
        const double p = kTableAlpha[i];
        const double sigma = std::sqrt(p * (1 - p) / n);
        EXPECT_LE(std::abs(static_cast<double>(hits[i]) / n - p), 3 * sigma) << "agent " << i;
    }
}

TEST(Attack, GatesHeldWithinInterval) {
    auto cfg = table_config(0.5);
    etc::AttackProcess proc(cfg, etc::Rng(9));
    for (int block = 0; block < 50; ++block) {
        const auto first = proc.sample(block * 0.5).alpha;
        for (int k = 1; k < 50; ++k) ASSERT_EQ(proc.sample(block * 0.5 + k * 0.01).alpha, first);
    }
}

TEST(Attack, EnergyBoundOnDenseGrid) {
    auto cfg = table_config();
    double amp2 = cfg.signal.amplitude.squaredNorm();
    EXPECT_NEAR(amp2, 0.02, 1e-15);
    std::vector<std::vector<Vector>> trace;
    double worst = 0;
    for (int k = 0; k <= 200000; ++k) {
        const auto eps = etc::attack_signal(cfg, k * 5e-4);
        worst = std::max(worst, stacked_energy(eps));
        if (k % 100 == 0) trace.push_back(eps);
    }
    EXPECT_LE(worst, 0.02);
    const auto audit = etc::verify_energy_bound(trace, 0.02);
    EXPECT_TRUE(audit.pass);
    EXPECT_LE(audit.max_energy, 0.02 + 1e-12);
}

TEST(Attack, DoubledAmplitudeFailsAudit) {
    auto cfg = table_config();
    cfg.signal.amplitude *= 2;
    std::vector<std::vector<Vector>> trace;
    for (int k = 0; k < 20000; ++k) trace.push_back(etc::attack_signal(cfg, k * 0.01));
    const auto audit = etc::verify_energy_bound(trace, 0.02);
    EXPECT_FALSE(audit.pass);
    EXPECT_GT(audit.max_energy, 0.02);
}

TEST(Attack, ZeroSignalPasses) {
    const std::vector<std::vector<Vector>> trace(5, std::vector<Vector>(3, Vector::Zero(2)));
    const auto audit = etc::verify_energy_bound(trace, 0.0);
    EXPECT_TRUE(audit.pass);
    EXPECT_EQ(audit.max_energy, 0.0);
}

TEST(Attack, CorruptOutputIsAdditive) {
    etc::AttackSample s{{1, 0}, {Vector::Unit(3, 0) * 0.1, Vector::Ones(3)}};
    const Vector y0 = Vector::Zero(3);
    const Vector got = etc::corrupt_output(y0, s, 0);
    EXPECT_EQ(got, Vector(Vector::Unit(3, 0) * 0.1));
    EXPECT_EQ(etc::corrupt_output(Vector::Ones(3), s, 1), Vector::Ones(3));
    EXPECT_THROW(etc::corrupt_output(Vector::Zero(2), s, 0), etc::DimensionMismatch);
    EXPECT_THROW(etc::corrupt_output(std::vector<Vector>(3, y0), s), etc::DimensionMismatch);
}

TEST(Attack, AllAgentsAttackedStaysInsideBound) {
    Vector p = Vector::Ones(10);
    auto cfg = etc::make_attack_config(p, 0.02, etc::default_attack_signal(10, 3), 0.01);
    etc::AttackProcess proc(cfg, etc::Rng(3));
    const std::vector<Vector> y(10, Vector::Constant(3, 4.0));
    for (int k = 0; k < 5000; ++k) {
        const auto yc = etc::corrupt_output(y, proc.sample(k * 0.013));
        double e = 0;
        for (int i = 0; i < 10; ++i) e += (yc[i] - y[i]).squaredNorm();
        ASSERT_LE(e, 0.02 + 1e-12);
    }
}

TEST(Attack, DisabledZeroesEverything) {
    auto cfg = etc::make_attack_config(Vector::Ones(2), 1.0, etc::default_attack_signal(2, 2), 0.01, false);
    etc::AttackProcess proc(cfg, etc::Rng(3));
    for (int k = 0; k < 100; ++k) {
        const auto s = proc.sample(k * 0.1);
        for (int i = 0; i < 2; ++i) {
            ASSERT_EQ(s.alpha[i], 0);
            ASSERT_EQ(s.epsilon[i].norm(), 0.0);
        }
    }
}

TEST(Attack, Deterministic) {
    auto cfg = table_config();
    etc::AttackProcess a(cfg, etc::Rng(11, 2)), b(cfg, etc::Rng(11, 2));
    for (int k = 0; k < 2000; ++k) ASSERT_EQ(a.sample(k * 0.01).alpha, b.sample(k * 0.01).alpha);
}

TEST(Attack, Validation) {
    auto sig = etc::default_attack_signal(2, 2);
    EXPECT_THROW(etc::make_attack_config(Vector::Constant(2, 1.2), 0.1, sig, 0.01), etc::InvalidProbability);
    EXPECT_THROW(etc::make_attack_config(Vector::Constant(2, -0.1), 0.1, sig, 0.01), etc::InvalidProbability);
    EXPECT_THROW(etc::make_attack_config(Vector::Constant(2, 0.5), -1.0, sig, 0.01), etc::InvalidParameter);
    EXPECT_THROW(etc::make_attack_config(Vector::Constant(2, 0.5), 0.1, sig, 0.0), etc::InvalidParameter);
    EXPECT_THROW(etc::make_attack_config(Vector::Constant(3, 0.5), 0.1, sig, 0.01), etc::DimensionMismatch);
    sig.direction[0].setZero();
    EXPECT_THROW(etc::make_attack_config(Vector::Constant(2, 0.5), 0.1, sig, 0.01), etc::InvalidParameter);
}
