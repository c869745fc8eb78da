#include "etc/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace etc {

Graph graph_from_edges(int node_count, const std::vector<std::pair<int, int>>& edges) {
    if (node_count < 1) throw InvalidParameter("graph needs at least one node");
    Graph g{Adjacency::Zero(node_count, node_count)};
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= node_count || j >= node_count)
            throw InvalidParameter("edge endpoint out of range");
        if (i == j) throw InvalidParameter("self loop on node " + std::to_string(i));
        g.adjacency(i, j) = 1;
        g.adjacency(j, i) = 1;
    }
    return g;
}

Graph complete_graph(int node_count) {
    Graph g{Adjacency::Ones(node_count, node_count)};
    g.adjacency.diagonal().setZero();
    return g;
}

std::vector<std::pair<int, int>> edge_list(const Graph& g) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < g.node_count(); ++i)
        for (int j = i + 1; j < g.node_count(); ++j)
            if (g.adjacency(i, j) != 0) out.emplace_back(i, j);
    return out;
}

void validate_graph(const Graph& g) {
    const auto& a = g.adjacency;
    if (a.rows() != a.cols() || a.rows() == 0) throw InvalidParameter("adjacency must be square and non-empty");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (a(i, i) != 0) throw InvalidParameter("adjacency diagonal must be zero");
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0 && a(i, j) != 1) throw InvalidParameter("adjacency must be binary");
            if (a(i, j) != a(j, i)) throw InvalidParameter("adjacency must be symmetric");
        }
    }
}

Matrix laplacian(const Graph& g) {
    validate_graph(g);
    Eigen::MatrixXi l = -g.adjacency;
    l.diagonal() = g.adjacency.rowwise().sum();
    return l.cast<double>();
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
    const int n = g.node_count();
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> parts;
    for (int start = 0; start < n; ++start) {
        if (label[start] >= 0) continue;
        const int id = static_cast<int>(parts.size());
        parts.emplace_back();
        std::queue<int> frontier;
        frontier.push(start);
        label[start] = id;
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            parts.back().push_back(u);
            for (int v = 0; v < n; ++v) {
                if (g.adjacency(u, v) != 0 && label[v] < 0) {
                    label[v] = id;
                    frontier.push(v);
                }
            }
        }
        std::sort(parts.back().begin(), parts.back().end());
    }
    return parts;
}

TopologySet union_and_check(const std::vector<Graph>& graphs) {
    if (graphs.empty()) throw InvalidParameter("topology set is empty");
    const int n = graphs.front().node_count();
    TopologySet ts;
    ts.union_graph.adjacency = Adjacency::Zero(n, n);
    ts.union_laplacian = Matrix::Zero(n, n);
    for (const auto& g : graphs) {
        validate_graph(g);
        if (g.node_count() != n) throw DimensionMismatch("graphs disagree on node count");
        ts.graphs.push_back(g);
        ts.laplacians.push_back(laplacian(g));
        ts.union_laplacian += ts.laplacians.back();
        ts.union_graph.adjacency = ts.union_graph.adjacency.cwiseMax(g.adjacency);
    }
    auto parts = connected_components(ts.union_graph);
    if (parts.size() > 1)
        throw UnionDisconnected("union graph has " + std::to_string(parts.size()) + " components",
                                std::move(parts));
    return ts;
}

double algebraic_connectivity(const Matrix& l) {
    if (l.rows() < 2) return 0.0;
    return sym_eig(l).values(1);
}

void validate_generator(const Matrix& w) {
    if (w.rows() != w.cols() || w.rows() == 0) throw InvalidGenerator("generator must be square");
    require_finite(w, "generator");
    for (Eigen::Index p = 0; p < w.rows(); ++p) {
        for (Eigen::Index q = 0; q < w.cols(); ++q)
            if (p != q && w(p, q) < 0) throw InvalidGenerator("negative off-diagonal rate");
        if (std::abs(w.row(p).sum()) > 1e-12 * std::max(1.0, w.row(p).cwiseAbs().sum()))
            throw InvalidGenerator("generator row does not sum to zero");
    }
}

Vector stationary_distribution(const Matrix& w) {
    validate_generator(w);
    const Eigen::Index s = w.rows();
    // Replace one balance equation by the normalization.
    Matrix sys = w.transpose();
    sys.row(s - 1).setOnes();
    Vector rhs = Vector::Zero(s);
    rhs(s - 1) = 1.0;
    Vector pi;
    try {
        pi = solve_linear(sys, rhs);
    } catch (const Singular&) {
        throw Reducible("generator has more than one closed class");
    }
    if ((pi.array() <= 1e-12).any()) throw Reducible("stationary law has a zero entry");
    return pi;
}

MarkovChain make_markov_chain(const Matrix& generator) {
    return MarkovChain{generator, stationary_distribution(generator)};
}

int SwitchingPath::state_at(double t) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto idx = std::max<std::ptrdiff_t>(0, (it - breakpoints.begin()) - 1);
    return states[static_cast<std::size_t>(idx)];
}

SwitchingPath sample_switching_path(const MarkovChain& chain, double horizon, Rng& rng) {
    if (!(horizon > 0)) throw InvalidParameter("horizon must be positive");
    const Matrix& w = chain.generator;
    const int s = chain.size();
    SwitchingPath path;
    path.horizon = horizon;
    if (s == 1) {
        path.breakpoints = {0.0};
        path.states = {0};
        return path;
    }
    for (int p = 0; p < s; ++p)
        if (!(-w(p, p) > 0)) throw AbsorbingState("state " + std::to_string(p + 1) + " has zero exit rate");

    auto draw = [&](const auto& weight, double total) {
        double u = rng.uniform() * total;
        int last = -1;
        for (int q = 0; q < s; ++q) {
            const double wq = weight(q);
            if (wq <= 0) continue;
            last = q;
            if (u < wq) return q;
            u -= wq;
        }
        return last;
    };

    int state = draw([&](int q) { return chain.stationary(q); }, chain.stationary.sum());
    double t = 0.0;
    while (t < horizon) {
        path.breakpoints.push_back(t);
        path.states.push_back(state);
        const double rate = -w(state, state);
        t += rng.exponential(rate);
        const int from = state;
        state = draw([&](int q) { return q == from ? 0.0 : w(from, q); }, rate);
    }
    return path;
}

Vector occupancy_fractions(const SwitchingPath& path, int state_count) {
    Vector occ = Vector::Zero(state_count);
    for (std::size_t k = 0; k < path.states.size(); ++k) {
        const double end = k + 1 < path.breakpoints.size() ? path.breakpoints[k + 1] : path.horizon;
        occ(path.states[k]) += end - path.breakpoints[k];
    }
    return occ / path.horizon;
}

}  // namespace etc
