#pragma once

#include <cstdint>
#include <vector>

#include "etc/matrix.hpp"
#include "etc/random.hpp"

namespace etc {

/// Per-agent sinusoid eps_i(t) = amplitude_i * sin(omega_i t + phase_i) * direction_i.
struct AttackSignal {
    Vector amplitude;               // after normalization: sum of squares == tau
    Vector omega;                   // rad/s
    Vector phase;                   // rad
    std::vector<Vector> direction;  // unit p-vectors
};

struct AttackConfig {
    Vector probability;  // alpha-bar_i, diagonal of F
    double tau = 0.0;
    AttackSignal signal;
    double resample_interval = 0.01;  // s
    bool enabled = true;
    AttackSignal raw;  // as supplied, before normalization

    int agents() const { return static_cast<int>(probability.size()); }
};

/// Default waveform: equal weights, omega_i = 0.5 + 0.13 i, phase_i = 2 pi i / N,
/// direction_i[k] proportional to cos(phase_i + 2 pi k / p).
AttackSignal default_attack_signal(int agents, int outputs);

/// Validates ranges and rescales amplitudes so the stacked envelope equals tau.
AttackConfig make_attack_config(Vector probability, double tau, AttackSignal signal,
                                double resample_interval, bool enabled = true);

struct AttackSample {
    std::vector<int> alpha;
    std::vector<Vector> epsilon;
};

std::vector<Vector> attack_signal(const AttackConfig& cfg, double t);

/// Bernoulli gates held over each resample interval.
class AttackProcess {
public:
    AttackProcess(const AttackConfig& cfg, Rng rng);

    AttackSample sample(double t);
    const std::vector<int>& alpha() const { return alpha_; }

private:
    void resample();

    AttackConfig cfg_;
    Rng rng_;
    std::vector<int> alpha_;
    std::int64_t interval_ = -1;
};

Vector corrupt_output(const Vector& y, const AttackSample& sample, int agent);
std::vector<Vector> corrupt_output(const std::vector<Vector>& y, const AttackSample& sample);

struct EnergyAudit {
    bool pass = true;
    double max_energy = 0.0;
    double tau = 0.0;
};

EnergyAudit verify_energy_bound(const std::vector<std::vector<Vector>>& epsilon_trace, double tau);

}  // namespace etc
