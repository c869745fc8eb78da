#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "etc/attack.hpp"
#include "etc/graph.hpp"
#include "etc/protocol.hpp"
#include "etc/synthesis.hpp"

namespace etc {

enum class ObserverInit {
    zero,         // xhat(0) = 0
    measurement,  // xhat(0) = C^+ y_corrupted(0)
    given,        // explicit per-agent vectors
};

struct InitialConditions {
    std::vector<Vector> x0;     // empty: positions uniform in +-position_range, velocities zero
    double position_range = 5.0;
    ObserverInit observer = ObserverInit::measurement;
    std::vector<Vector> xhat0;  // used with ObserverInit::given
};

struct BaselineParams {
    double kappa = 0.05;
    double beta1 = 0.8;
    double beta2 = 0.35;
    double mu = 1.0;
    double c = 10.0;
    Vector gamma;            // per agent; empty means all ones
    bool raw_state = false;  // relative states from x instead of xhat
};

void validate_baseline(const BaselineParams& b);

struct Scenario {
    PlantModel plant;
    TopologySet topology;
    MarkovChain chain;
    AttackConfig attack;
    ProtocolScalars scalars;
    double h = 0.01;
    double horizon = 100.0;
    int decimation = 10;
    InitialConditions initial;
    std::uint64_t seed = 1;
    XiHoldMode xi_hold = XiHoldMode::refresh;
    BaselineParams baseline;
    SynthesisSettings synthesis;

    int agents() const { return topology.node_count(); }
    std::size_t steps() const;
};

void validate_scenario(const Scenario& s);

struct TimeSeries {
    double h = 0.0;
    int decimation = 1;
    std::vector<double> t;
    std::vector<int> sigma;              // 0-based graph index
    std::vector<Matrix> x, xhat, u;      // columns are agents
    std::vector<Vector> d, varpi;
    std::vector<Eigen::VectorXi> triggered;  // 1 if the agent fired since the previous sample
    std::vector<Eigen::VectorXi> alpha;
    std::vector<Vector> delta_pos_norm;
    std::vector<std::vector<double>> events;  // exact trigger times per agent

    std::size_t samples() const { return t.size(); }
};

struct Metrics {
    std::string protocol;
    double steady_state_pos_error = 0.0;
    std::vector<std::size_t> trigger_counts;
    std::size_t total_triggers = 0;
    double min_inter_event = 0.0;
    double mean_inter_event = 0.0;
    std::optional<Vector> d_final;
    std::optional<double> varpi_min;
    Vector occupancy;
    double ms_delta_tail = 0.0;    // tail mean of ||delta||^2
    double mean_delta_tail = 0.0;  // tail mean of ||delta||
    double lyapunov_v1_initial = 0.0;
    double lyapunov_v1_tail = 0.0;
    std::optional<double> threshold_bound_ratio;  // min of varpi / decay bound between triggers
    double attack_energy_max = 0.0;
    bool attack_energy_ok = true;
};

struct RunResult {
    TimeSeries ts;
    Metrics metrics;
};

RunResult run_scenario(const Scenario& scenario, const GainSet& gains);

/// Event-triggered comparison controller u_i = -kappa B^T P_b xi_i(t_k) with
/// P_b the Riccati solution for Q = I, R = I.
RunResult run_baseline(const Scenario& scenario, const GainSet& gains);

/// Row vector B^T P_b used by the comparison controller.
Matrix baseline_gain(const PlantModel& plant);

struct TriggerStats {
    std::size_t count = 0;
    double min_gap = 0.0, mean_gap = 0.0, max_gap = 0.0;
    std::vector<double> gaps;
};

struct TriggerSummary {
    std::vector<TriggerStats> agents;
    std::size_t total = 0;
    double min_gap = 0.0;
    double mean_gap = 0.0;
    bool gaps_at_least_step = true;
};

TriggerSummary trigger_statistics(const TimeSeries& ts);

/// delta^T (L(sigma) (x) P) delta + (1/s) q^T (I (x) Q) q at every sample.
std::vector<double> lyapunov_diagnostic(const TimeSeries& ts, const GainSet& gains, const TopologySet& topology);

/// Minimum over all agents and inter-event windows of
/// varpi(t) / (varpi(t_k) exp(-(eta + varsigma / iota)(t - t_k))); needs decimation 1.
double threshold_bound_ratio(const TimeSeries& ts, const ProtocolScalars& scalars);

enum class Protocol { proposed, baseline };

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

struct BatchResult {
    std::vector<std::uint64_t> seeds;
    std::vector<Metrics> runs;
    Aggregate steady_state_pos_error, total_triggers, mean_delta_tail, ms_delta_tail, min_inter_event;
    double bound = 0.0;
    double bound_ratio = 0.0;  // mean tail ||delta|| over sqrt(tau / (chi kappa))
};

/// Runs every seed (in parallel) and aggregates in seed order.
BatchResult run_batch(const Scenario& scenario, const GainSet& gains, const std::vector<std::uint64_t>& seeds,
                      Protocol protocol = Protocol::proposed);

/// run_batch with at least two seeds.
BatchResult monte_carlo(const Scenario& scenario, const GainSet& gains, const std::vector<std::uint64_t>& seeds,
                        Protocol protocol = Protocol::proposed);

/// Consensus error (M (x) I) x with M = I - 11^T / N; columns are agents.
Matrix consensus_error(const Matrix& x);

}  // namespace etc
