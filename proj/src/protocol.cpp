#include "etc/protocol.hpp"

#include <cmath>

namespace etc {

void validate_plant(const PlantModel& model) {
    const auto n = model.A.rows();
    if (n == 0 || model.A.cols() != n) throw DimensionMismatch("A must be square");
    if (model.B.rows() != n) throw DimensionMismatch("B rows must match A");
    if (model.C.cols() != n) throw DimensionMismatch("C cols must match A");
    require_finite(model.A, "A");
    require_finite(model.B, "B");
    require_finite(model.C, "C");
}

PlantModel build_spacecraft_model(double omega, double omega_dot, double mu, double r) {
    if (!(r > 0)) throw InvalidParameter("orbit radius must be positive");
    const double k = mu / (r * r * r);
    Matrix a = Matrix::Zero(6, 6);
    a.topRightCorner(3, 3) = Matrix::Identity(3, 3);
    a(3, 0) = omega * omega + 2.0 * k;
    a(3, 1) = omega_dot;
    a(3, 4) = 2.0 * omega;
    a(4, 0) = -omega_dot;
    a(4, 1) = omega * omega - k;
    a(4, 3) = -2.0 * omega;
    a(5, 2) = -2.0 * k;
    Matrix b = Matrix::Zero(6, 3);
    b.bottomRows(3) = Matrix::Identity(3, 3);
    Matrix c = Matrix::Zero(3, 6);
    c.leftCols(3) = Matrix::Identity(3, 3);
    return PlantModel{a, b, c};
}

PlantModel build_spacecraft_model(const OrbitParameters& orbit) {
    if (!(orbit.r > 0)) throw InvalidParameter("orbit radius must be positive");
    const double omega = orbit.omega.value_or(std::sqrt(orbit.mu / (orbit.r * orbit.r * orbit.r)));
    return build_spacecraft_model(omega, orbit.omega_dot, orbit.mu, orbit.r);
}

Vector plant_derivative(const PlantModel& model, const Vector& x, const Vector& u) {
    if (x.size() != model.A.rows() || u.size() != model.B.cols()) throw DimensionMismatch("plant_derivative");
    return model.A * x + model.B * u;
}

Vector observer_derivative(const PlantModel& model, const Matrix& g, const Vector& xhat, const Vector& u,
                           const Vector& y_corrupted) {
    if (xhat.size() != model.A.rows() || u.size() != model.B.cols() || y_corrupted.size() != model.C.rows() ||
        g.rows() != model.A.rows() || g.cols() != model.C.rows())
        throw DimensionMismatch("observer_derivative");
    return model.A * xhat + model.B * u + g * (y_corrupted - model.C * xhat);
}

Vector broadcast_relative_state(const NetworkView& view, int i) {
    const auto& held = *view.held;
    const auto& adj = view.graph->adjacency;
    Vector xi = Vector::Zero(held[i].size());
    for (int j = 0; j < static_cast<int>(held.size()); ++j)
        if (adj(i, j) != 0) xi += held[j] - held[i];
    return xi;
}

Vector estimation_deviation(const AgentState& agent) { return agent.held - agent.xhat; }

double quadratic(const Vector& v, const Matrix& gamma) { return v.dot(gamma * v); }

bool trigger_predicate(const AgentState& agent, const Vector& xi_tilde, const Matrix& gamma,
                       const AgentParams& p) {
    const Vector m = estimation_deviation(agent);
    const double lhs = p.iota * (quadratic(m, gamma) - p.o * p.upsilon * quadratic(xi_tilde, gamma));
    return lhs >= agent.varpi;
}

double varpi_derivative(const AgentState& agent, const Vector& xi_tilde, const Matrix& gamma,
                        const AgentParams& p) {
    const Vector m = estimation_deviation(agent);
    return -p.eta * agent.varpi +
           p.varsigma * (p.o * p.upsilon * quadratic(xi_tilde, gamma) - quadratic(m, gamma));
}

double coupling_derivative(const AgentState& agent, const Vector& xi_tilde, const Matrix& gamma,
                           const AgentParams& p) {
    if (agent.d >= p.dbar) return 0.0;
    return p.beta * quadratic(xi_tilde, gamma);
}

Vector control_input(const AgentState& agent, const Vector& xi_tilde, const Matrix& k) {
    if (k.cols() != xi_tilde.size()) throw DimensionMismatch("control_input");
    return agent.d * (k * xi_tilde);
}

}  // namespace etc
