#pragma once

#include <utility>
#include <vector>

#include "etc/matrix.hpp"
#include "etc/random.hpp"

namespace etc {

using Adjacency = Eigen::MatrixXi;

/// Undirected, unweighted graph on nodes 0..N-1.
struct Graph {
    Adjacency adjacency;

    int node_count() const { return static_cast<int>(adjacency.rows()); }
};

/// Builds a graph from 0-based edge pairs; throws on self loops or bad ids.
Graph graph_from_edges(int node_count, const std::vector<std::pair<int, int>>& edges);
Graph complete_graph(int node_count);
std::vector<std::pair<int, int>> edge_list(const Graph& g);
void validate_graph(const Graph& g);

Matrix laplacian(const Graph& g);

/// Connected components by breadth-first search, each sorted ascending.
std::vector<std::vector<int>> connected_components(const Graph& g);

struct TopologySet {
    std::vector<Graph> graphs;
    Graph union_graph;
    std::vector<Matrix> laplacians;
    Matrix union_laplacian;  // sum of the per-graph Laplacians

    int size() const { return static_cast<int>(graphs.size()); }
    int node_count() const { return union_graph.node_count(); }
};

TopologySet union_and_check(const std::vector<Graph>& graphs);

double algebraic_connectivity(const Matrix& l);

struct MarkovChain {
    Matrix generator;
    Vector stationary;

    int size() const { return static_cast<int>(generator.rows()); }
};

void validate_generator(const Matrix& generator);
Vector stationary_distribution(const Matrix& generator);
MarkovChain make_markov_chain(const Matrix& generator);

/// Piecewise-constant, right-continuous sigma(t); states are 0-based.
struct SwitchingPath {
    std::vector<double> breakpoints;  // breakpoints[0] == 0
    std::vector<int> states;
    double horizon = 0.0;

    int state_at(double t) const;
};

SwitchingPath sample_switching_path(const MarkovChain& chain, double horizon, Rng& rng);
Vector occupancy_fractions(const SwitchingPath& path, int state_count);

}  // namespace etc
