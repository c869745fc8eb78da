#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include "etc/synthesis.hpp"
#include "support.hpp"

using etc::Matrix;
using etc::Vector;
namespace fx = etc::testing;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

bool cholesky_ok(const Matrix& m) { return Eigen::LLT<Matrix>(m).info() == Eigen::Success; }

// n = 1, A = 0, B = C = 1, P = Q = 1, X = 2, (c / s) lambda2 = 1, kappa = 0.1,
// attack and graph-spread terms switched off.
etc::GainSet scalar_instance() {
    etc::GainSet g;
    g.P = scalar(1);
    g.Q = scalar(1);
    g.X = scalar(2);
    g.c = 1.0;
    g.kappa = 0.1;
    g.structure.agents = 1;
    g.structure.graphs = 1;
    g.structure.lambda2 = 1.0;
    g.structure.lambdaM = 0.0;
    g.structure.lambdaM_FFT = 0.0;
    g.structure.pi_bar = 1.0;
    g.structure.pi_breve = 1.0;
    g.scalars = etc::uniform_scalars(1, 10.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 2.0);
    return g;
}

}  // namespace

TEST(Verifier, ScalarInstance) {
    const auto rep = etc::verify_theorem_conditions(scalar(0), scalar(1), scalar(1), scalar_instance());
    ASSERT_TRUE(rep.P_positive);
    const auto* cp = rep.matrix("cond_P");
    ASSERT_NE(cp, nullptr);
    EXPECT_NEAR(cp->margin, -0.9, 1e-14);
    EXPECT_TRUE(cp->pass);
    // Psi-bar = -2 X C + kappa Q = -3.9; the Schur block is diag(-3.9, -1)
    EXPECT_NEAR(rep.matrix("cond_observer")->margin, -1.0, 1e-14);
}

TEST(Verifier, NegatedPFailsPositivity) {
    auto g = fx::default_gains();
    g.P = -g.P;
    const auto& s = fx::default_scenario();
    const auto rep = etc::verify_theorem_conditions(s.plant.A, s.plant.B, s.plant.C, g);
    EXPECT_FALSE(rep.P_positive);
    EXPECT_FALSE(rep.feasible);
    EXPECT_TRUE(rep.matrices.empty());  // remaining checks aborted
}

TEST(Verifier, ProtocolConstantsArithmetic) {
    etc::StructuralConstants sc;
    sc.agents = 10;
    sc.pi_breve = 2.0 / 3.0;
    sc.tau = 0.02;
    const auto ps = etc::uniform_scalars(10, 3.0, 0.002, 0.00173, 560, 0.001, 579.6, 1.0, 10, 1.05);
    const auto pc = etc::compute_protocol_constants(sc, ps, 5.2356, 0.5, 0.01);
    EXPECT_NEAR(pc.ctilde, 23.9424, 1e-12);
    EXPECT_NEAR(pc.rho, 23.9424 * (2.0 / 3.0) * 10 * 110, 1e-9);
    EXPECT_NEAR(pc.rho, 17557.8, 0.05);
    EXPECT_NEAR(pc.bound, std::sqrt(0.02 / (0.5 * 0.01)), 1e-14);
}

TEST(Verifier, PublishedTableFlagsDbar) {
    const auto pub = etc::scenario_from_json(etc::published_table_scenario_json());
    auto g = fx::default_gains();
    g.scalars = pub.scalars;
    const auto rep = etc::verify_theorem_conditions(pub.plant.A, pub.plant.B, pub.plant.C, g);
    const auto* d = rep.scalar("dbar > 4c + o + 1");
    ASSERT_NE(d, nullptr);
    EXPECT_FALSE(d->pass);
    EXPECT_NEAR(d->threshold, 4 * 5.2356 + 0.002 + 1, 1e-12);
    EXPECT_NEAR(d->threshold, 21.94, 0.01);
    EXPECT_FALSE(rep.scalar("eta - (rho - varsigma)/iota > 0")->pass);
    EXPECT_FALSE(rep.feasible);
}

TEST(Synthesis, SpacecraftCertified) {
    const auto& out = fx::default_synthesis();
    ASSERT_TRUE(out.feasible) << out.message;
    const auto& g = out.gains;
    EXPECT_TRUE(cholesky_ok(g.P));
    EXPECT_TRUE(cholesky_ok(g.Q));
    const auto& s = fx::default_scenario();
    EXPECT_EQ(g.K, Matrix(s.plant.B.transpose() * g.P));
    EXPECT_LE((g.Q * g.G - g.X).norm(), 1e-9 * g.X.norm());
    EXPECT_TRUE(cholesky_ok(g.Gamma + 1e-12 * Matrix::Identity(6, 6)));
    ASSERT_EQ(out.report.matrices.size(), 4u);
    for (const auto& m : out.report.matrices) EXPECT_LT(m.relative, -1e-8) << m.name;
    for (const auto& sc : out.report.scalars) EXPECT_TRUE(sc.pass) << sc.name;
    EXPECT_LE(g.riccati_residual, 1e-8 * g.P.norm());
}

TEST(Synthesis, SelfConsistentReverification) {
    const auto& s = fx::default_scenario();
    const auto rep = etc::verify_theorem_conditions(s.plant.A, s.plant.B, s.plant.C, fx::default_gains());
    EXPECT_TRUE(rep.feasible);
    EXPECT_TRUE(rep.certified);
}

TEST(Synthesis, ObserverGainHasBlockStructure) {
    const Matrix& G = fx::default_gains().G;
    ASSERT_EQ(G.rows(), 6);
    ASSERT_EQ(G.cols(), 3);
    for (int blk = 0; blk < 2; ++blk) {
        const Matrix b = G.block(3 * blk, 0, 3, 3);
        const double diag = b.diagonal().mean();
        EXPECT_GT(diag, 0.0);
        EXPECT_LE((b - diag * Matrix::Identity(3, 3)).norm(), 0.05 * std::abs(diag)) << "block " << blk;
    }
}

TEST(Synthesis, ControlClosedLoopHurwitz) {
    const auto& s = fx::default_scenario();
    const auto& g = fx::default_gains();
    const double gamma = g.c / g.structure.graphs * g.structure.lambda2;
    const double keff = g.kappa / g.structure.pi_bar;
    const Matrix cl = s.plant.A - gamma * s.plant.B * s.plant.B.transpose() * g.P + 0.5 * keff * Matrix::Identity(6, 6);
    EXPECT_TRUE(etc::is_hurwitz(cl));
}

TEST(Synthesis, DoublingEpsilonNeverRaisesCondP) {
    const auto& s = fx::default_scenario();
    const auto& base = fx::default_gains();
    const double gamma = base.c / base.structure.graphs * base.structure.lambda2;
    const double keff = base.kappa / base.structure.pi_bar;
    double prev = 0.0;
    bool first = true;
    for (double eps = etc::default_riccati_offset(s.plant.A); eps < 0.1; eps *= 2) {
        auto g = base;
        g.P = etc::solve_control_riccati(s.plant.A, s.plant.B, gamma, keff, eps).x;
        const auto rep = etc::verify_theorem_conditions(s.plant.A, s.plant.B, s.plant.C, g);
        const double m = rep.matrix("cond_P")->margin;
        EXPECT_LT(m, 0.0);
        EXPECT_LE(m, -base.structure.pi_bar * eps / 2 * (1 - 1e-6));
        if (!first) {
            EXPECT_LE(m, prev + 1e-12) << "eps " << eps;
        }
        prev = m;
        first = false;
    }
}

TEST(Observer, IdentityExample) {
    // C = I, W = 0, kappa = 0, A = -I: G = I, Q = I gives Psi-bar = -4 I
    const Matrix a = -Matrix::Identity(2, 2);
    const etc::ObserverTerms t{0.0, 0.0, Matrix::Zero(2, 2)};
    const auto r = etc::synthesize_observer(a, Matrix::Identity(2, 2), t);
    EXPECT_TRUE(cholesky_ok(r.Q));
    EXPECT_LT(r.chosen.relative, -1e-8);
}

TEST(Observer, UndetectableIsInfeasible) {
    const etc::ObserverTerms t{0.0, 0.0, Matrix::Zero(2, 2)};
    EXPECT_THROW(etc::synthesize_observer(Matrix::Identity(2, 2), Matrix::Zero(1, 2), t), etc::Infeasible);
}

TEST(Synthesis, ZeroOutputMatrixReportsInfeasible) {
    const auto& s = fx::default_scenario();
    const auto out = etc::synthesize_gains(s.plant.A, s.plant.B, Matrix::Zero(3, 6),
                                           etc::structural_constants(s.topology, s.chain, s.attack), s.scalars,
                                           s.synthesis);
    EXPECT_FALSE(out.feasible);
    EXPECT_FALSE(out.message.empty());
}

TEST(Structure, DefaultScenarioConstants) {
    const auto sc = fx::default_gains().structure;
    EXPECT_EQ(sc.agents, 10);
    EXPECT_EQ(sc.graphs, 2);
    EXPECT_NEAR(sc.pi_bar, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(sc.pi_breve, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(sc.lambda2, 2 - 2 * std::cos(2 * M_PI / 10), 1e-12);
    EXPECT_NEAR(sc.lambdaM, 4.0, 1e-12);
    EXPECT_NEAR(sc.lambdaM_FFT, 0.42 * 0.42, 1e-15);
    EXPECT_DOUBLE_EQ(sc.tau, 0.02);
}

TEST(Scalars, Validation) {
    auto ok = etc::uniform_scalars(2, 22.5, 0.002, 0.00173, 1, 1, 1, 1, 10, 1.05);
    EXPECT_NO_THROW(etc::validate_scalars(ok));
    auto bad = ok;
    bad.varpi0(1) = 0.0;
    EXPECT_THROW(etc::validate_scalars(bad), etc::InvalidParameter);
    bad = ok;
    bad.d0(0) = 1.0;
    EXPECT_THROW(etc::validate_scalars(bad), etc::InvalidParameter);
    bad = ok;
    bad.d0(0) = 30.0;
    EXPECT_THROW(etc::validate_scalars(bad), etc::InvalidParameter);
}
