#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "etc/graph.hpp"
#include "etc/matrix.hpp"

namespace etc {

struct PlantModel {
    Matrix A, B, C;

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }
};

void validate_plant(const PlantModel& model);

struct OrbitParameters {
    double mu = 3.986e14;  // m^3/s^2
    double r = 4.224e7;    // m
    double omega_dot = 0.0;
    std::optional<double> omega;  // defaults to sqrt(mu / r^3)
};

/// Relative spacecraft dynamics about a circular reference orbit; state is
/// [x y z vx vy vz], input is acceleration, output is position.
PlantModel build_spacecraft_model(double omega, double omega_dot, double mu, double r);
PlantModel build_spacecraft_model(const OrbitParameters& orbit);

Vector plant_derivative(const PlantModel& model, const Vector& x, const Vector& u);
Vector observer_derivative(const PlantModel& model, const Matrix& g, const Vector& xhat, const Vector& u,
                           const Vector& y_corrupted);

struct AgentState {
    Vector x, xhat, held;
    double d = 1.0;
    double varpi = 1.0;
    double last_trigger = 0.0;
    std::size_t trigger_count = 0;
};

/// Per-agent scalars of the trigger rule and the adaptive law.
struct AgentParams {
    double iota = 1.0, o = 0.0, upsilon = 0.0, eta = 1.0, varsigma = 1.0, beta = 0.0, dbar = 2.0;
};

enum class XiHoldMode { refresh, freeze };

struct NetworkView {
    const Graph* graph = nullptr;        // sigma(t)
    const std::vector<Vector>* held = nullptr;
};

Vector broadcast_relative_state(const NetworkView& view, int i);
Vector estimation_deviation(const AgentState& agent);

double quadratic(const Vector& v, const Matrix& gamma);

bool trigger_predicate(const AgentState& agent, const Vector& xi_tilde, const Matrix& gamma,
                       const AgentParams& params);
double varpi_derivative(const AgentState& agent, const Vector& xi_tilde, const Matrix& gamma,
                        const AgentParams& params);
double coupling_derivative(const AgentState& agent, const Vector& xi_tilde, const Matrix& gamma,
                           const AgentParams& params);
Vector control_input(const AgentState& agent, const Vector& xi_tilde, const Matrix& k);

}  // namespace etc
