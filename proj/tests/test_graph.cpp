#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "etc/graph.hpp"

using etc::Graph;
using etc::Matrix;
using etc::Vector;

namespace {

// Default pair: each graph alone is disconnected, the union is the 10-cycle.
std::vector<Graph> default_pair() {
    auto g1 = etc::graph_from_edges(10, {{0, 1}, {1, 2}, {3, 4}, {5, 6}, {7, 8}, {8, 9}});
    auto g2 = etc::graph_from_edges(10, {{2, 3}, {4, 5}, {6, 7}, {9, 0}});
    return {g1, g2};
}

Matrix gen2(double a, double b) {
    Matrix w(2, 2);
    w << -a, a, b, -b;
    return w;
}

}  // namespace

TEST(Laplacian, Examples) {
    EXPECT_EQ(etc::laplacian(etc::graph_from_edges(4, {})), Matrix::Zero(4, 4));
    Matrix k2(2, 2);
    k2 << 1, -1, -1, 1;
    EXPECT_EQ(etc::laplacian(etc::complete_graph(2)), k2);
    Matrix p3(3, 3);
    p3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    EXPECT_EQ(etc::laplacian(etc::graph_from_edges(3, {{0, 1}, {1, 2}})), p3);
}

TEST(Graph, RejectsBadEdges) {
    EXPECT_THROW(etc::graph_from_edges(3, {{0, 0}}), etc::InvalidParameter);
    EXPECT_THROW(etc::graph_from_edges(3, {{0, 3}}), etc::InvalidParameter);
    Graph g{Eigen::MatrixXi::Zero(2, 2)};
    g.adjacency(0, 1) = 1;
    EXPECT_THROW(etc::validate_graph(g), etc::InvalidParameter);
}

TEST(UnionAndCheck, DefaultPairIsCycle) {
    const auto pair = default_pair();
    for (const auto& g : pair) EXPECT_GT(etc::connected_components(g).size(), 1u);
    const auto ts = etc::union_and_check(pair);
    EXPECT_EQ(ts.size(), 2);
    EXPECT_EQ(etc::connected_components(ts.union_graph).size(), 1u);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(ts.union_graph.adjacency.row(i).sum(), 2);
    EXPECT_EQ(ts.union_laplacian, ts.laplacians[0] + ts.laplacians[1]);
    // cycle C10: lambda2 = 2 - 2 cos(2 pi / 10)
    EXPECT_NEAR(etc::algebraic_connectivity(ts.union_laplacian), 2 - 2 * std::cos(2 * M_PI / 10), 1e-12);
}

TEST(UnionAndCheck, SingleConnectedGraph) {
    const auto g = etc::complete_graph(4);
    const auto ts = etc::union_and_check({g});
    EXPECT_EQ(ts.union_graph.adjacency, g.adjacency);
}

TEST(UnionAndCheck, EdgelessUnionCarriesComponents) {
    const auto e = etc::graph_from_edges(3, {});
    try {
        etc::union_and_check({e, e});
        FAIL() << "expected UnionDisconnected";
    } catch (const etc::UnionDisconnected& err) {
        EXPECT_EQ(err.components.size(), 3u);
    }
}

TEST(AlgebraicConnectivity, Examples) {
    EXPECT_NEAR(etc::algebraic_connectivity(etc::laplacian(etc::complete_graph(2))), 2.0, 1e-14);
    EXPECT_NEAR(etc::algebraic_connectivity(etc::laplacian(etc::graph_from_edges(3, {{0, 1}, {1, 2}}))), 1.0,
                1e-14);
    EXPECT_NEAR(etc::algebraic_connectivity(etc::laplacian(etc::graph_from_edges(3, {}))), 0.0, 1e-14);
}

TEST(Laplacian, RandomGraphsConnectivityAgreesWithBfs) {
    std::mt19937_64 gen(11);
    std::bernoulli_distribution edge(0.25);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 2 + trial % 11;
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (edge(gen)) edges.emplace_back(i, j);
        const auto g = etc::graph_from_edges(n, edges);
        const Matrix l = etc::laplacian(g);
        ASSERT_EQ(l.rowwise().sum(), Vector::Zero(n));  // exact
        const double l2 = etc::algebraic_connectivity(l);
        ASSERT_GE(l2, -1e-9);
        ASSERT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(l).eigenvalues().minCoeff(), -1e-9);
        const bool connected = etc::connected_components(g).size() == 1;
        ASSERT_EQ(l2 > 1e-6, connected) << "trial " << trial;
    }
}

TEST(Stationary, Examples) {
    const Vector a = etc::stationary_distribution(gen2(1, 2));
    EXPECT_NEAR(a(0), 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(a(1), 1.0 / 3.0, 1e-10);
    const Vector b = etc::stationary_distribution(gen2(1, 1));
    EXPECT_NEAR(b(0), 0.5, 1e-12);
    const Vector c = etc::stationary_distribution(gen2(3, 1));
    EXPECT_NEAR(c(0), 0.25, 1e-12);
    EXPECT_NEAR(c(1), 0.75, 1e-12);
}

TEST(Stationary, RandomGeneratorsSatisfyBalance) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> rate(0.1, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int s = 2 + trial % 5;
        Matrix w(s, s);
        for (int p = 0; p < s; ++p) {
            for (int q = 0; q < s; ++q) w(p, q) = p == q ? 0.0 : rate(gen);
            w(p, p) = -w.row(p).sum();
        }
        const Vector pi = etc::stationary_distribution(w);
        ASSERT_NEAR(pi.sum(), 1.0, 1e-12);
        ASSERT_LE((pi.transpose() * w).norm(), 1e-10);
        ASSERT_GT(pi.minCoeff(), 0.0);
    }
}

TEST(Stationary, RejectsInvalidAndReducible) {
    Matrix bad(2, 2);
    bad << -1, 2, 1, -1;
    EXPECT_THROW(etc::validate_generator(bad), etc::InvalidGenerator);
    Matrix neg(2, 2);
    neg << 1, -1, 1, -1;
    EXPECT_THROW(etc::validate_generator(neg), etc::InvalidGenerator);
    // two closed classes
    EXPECT_THROW(etc::stationary_distribution(Matrix::Zero(2, 2)), etc::Reducible);
    // state 0 transient
    EXPECT_THROW(etc::stationary_distribution(gen2(1, 0)), etc::Reducible);
}

TEST(Switching, SingleState) {
    const auto chain = etc::make_markov_chain(Matrix::Zero(1, 1));
    etc::Rng rng(1);
    const auto path = etc::sample_switching_path(chain, 50.0, rng);
    ASSERT_EQ(path.states.size(), 1u);
    EXPECT_EQ(path.breakpoints[0], 0.0);
    EXPECT_EQ(path.state_at(49.0), 0);
    EXPECT_EQ(etc::occupancy_fractions(path, 1)(0), 1.0);
}

TEST(Switching, OccupancyConvergesToStationary) {
    const auto chain = etc::make_markov_chain(gen2(1, 2));
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        etc::Rng rng(seed);
        const auto path = etc::sample_switching_path(chain, 1e4, rng);
        const Vector occ = etc::occupancy_fractions(path, 2);
        EXPECT_NEAR(occ.sum(), 1.0, 1e-12);
        EXPECT_NEAR(occ(0), 2.0 / 3.0, 0.03) << "seed " << seed;
    }
}

TEST(Switching, ThreeStateOccupancy) {
    Matrix w(3, 3);
    w << -2, 1, 1, 0.5, -1, 0.5, 3, 0, -3;
    const auto chain = etc::make_markov_chain(w);
    etc::Rng rng(42);
    const auto path = etc::sample_switching_path(chain, 1e4 / 1.0, rng);
    const Vector occ = etc::occupancy_fractions(path, 3);
    EXPECT_LE((occ - chain.stationary).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Switching, PathShape) {
    const auto chain = etc::make_markov_chain(gen2(1, 2));
    etc::Rng rng(8);
    const auto path = etc::sample_switching_path(chain, 100.0, rng);
    ASSERT_EQ(path.breakpoints.size(), path.states.size());
    for (std::size_t k = 1; k < path.breakpoints.size(); ++k) {
        EXPECT_LT(path.breakpoints[k - 1], path.breakpoints[k]);
        EXPECT_NE(path.states[k - 1], path.states[k]);
        EXPECT_EQ(path.state_at(path.breakpoints[k]), path.states[k]);  // right-continuous
    }
    EXPECT_LE(path.breakpoints.back(), 100.0);
}

TEST(Switching, EqualIntervals) {
    etc::SwitchingPath path;
    path.breakpoints = {0.0, 5.0};
    path.states = {0, 1};
    path.horizon = 10.0;
    const Vector occ = etc::occupancy_fractions(path, 2);
    EXPECT_DOUBLE_EQ(occ(0), 0.5);
    EXPECT_DOUBLE_EQ(occ(1), 0.5);
}

TEST(Switching, Deterministic) {
    const auto chain = etc::make_markov_chain(gen2(1, 2));
    etc::Rng a(77), b(77);
    const auto pa = etc::sample_switching_path(chain, 500.0, a);
    const auto pb = etc::sample_switching_path(chain, 500.0, b);
    EXPECT_EQ(pa.breakpoints, pb.breakpoints);
    EXPECT_EQ(pa.states, pb.states);
}

TEST(Switching, AbsorbingState) {
    const etc::MarkovChain chain{gen2(0, 1), Vector(Eigen::Vector2d(1, 0))};
    etc::Rng rng(1);
    EXPECT_THROW(
        {
            for (int k = 0; k < 20; ++k) etc::sample_switching_path(chain, 10.0, rng);
        },
        etc::AbsorbingState);
}
