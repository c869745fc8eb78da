#include "etc/attack.hpp"

#include <cmath>
#include <numbers>

namespace etc {

AttackSignal default_attack_signal(int agents, int outputs) {
    AttackSignal s;
    s.amplitude = Vector::Ones(agents);
    s.omega.resize(agents);
    s.phase.resize(agents);
    for (int i = 0; i < agents; ++i) {
        s.omega(i) = 0.5 + 0.13 * i;
        s.phase(i) = 2.0 * std::numbers::pi * i / agents;
        Vector dir(outputs);
        for (int k = 0; k < outputs; ++k)
            dir(k) = outputs == 1 ? 1.0 : std::cos(s.phase(i) + 2.0 * std::numbers::pi * k / outputs);
        if (dir.norm() == 0.0) dir(0) = 1.0;
        s.direction.push_back(dir);
    }
    return s;
}

AttackConfig make_attack_config(Vector probability, double tau, AttackSignal signal,
                                double resample_interval, bool enabled) {
    const auto n = probability.size();
    if ((probability.array() < 0.0).any() || (probability.array() > 1.0).any() || !probability.allFinite())
        throw InvalidProbability("attack probability outside [0, 1]");
    if (!(tau >= 0.0)) throw InvalidParameter("tau must be non-negative");
    if (!(resample_interval > 0.0)) throw InvalidParameter("resample_interval must be positive");
    AttackSignal raw = signal;
    if (signal.amplitude.size() != n || signal.omega.size() != n || signal.phase.size() != n ||
        static_cast<Eigen::Index>(signal.direction.size()) != n)
        throw DimensionMismatch("attack signal size does not match agent count");
    for (auto& d : signal.direction) {
        const double norm = d.norm();
        if (!(norm > 0.0)) throw InvalidParameter("attack direction must be non-zero");
        d /= norm;
    }
    // Worst case of sum_i a_i^2 sin^2(.) is sum_i a_i^2.
    const double weight = signal.amplitude.squaredNorm();
    if (weight > 0.0) signal.amplitude *= std::sqrt(tau / weight);
    return AttackConfig{std::move(probability), tau, std::move(signal), resample_interval, enabled, std::move(raw)};
}

std::vector<Vector> attack_signal(const AttackConfig& cfg, double t) {
    const auto& s = cfg.signal;
    std::vector<Vector> eps;
    eps.reserve(static_cast<std::size_t>(cfg.agents()));
    for (int i = 0; i < cfg.agents(); ++i)
        eps.push_back(s.amplitude(i) * std::sin(s.omega(i) * t + s.phase(i)) * s.direction[i]);
    return eps;
}

AttackProcess::AttackProcess(const AttackConfig& cfg, Rng rng)
    : cfg_(cfg), rng_(rng), alpha_(static_cast<std::size_t>(cfg.agents()), 0) {}

void AttackProcess::resample() {
    for (int i = 0; i < cfg_.agents(); ++i)
        alpha_[i] = cfg_.enabled && rng_.bernoulli(cfg_.probability(i)) ? 1 : 0;
}

AttackSample AttackProcess::sample(double t) {
    // Small slack so t = k * interval lands in interval k despite rounding.
    const auto k = static_cast<std::int64_t>(std::floor(t / cfg_.resample_interval + 1e-9));
    while (interval_ < k) {
        resample();
        ++interval_;
    }
    AttackSample out{alpha_, attack_signal(cfg_, t)};
    if (!cfg_.enabled)
        for (auto& e : out.epsilon) e.setZero();
    return out;
}

Vector corrupt_output(const Vector& y, const AttackSample& sample, int agent) {
    const Vector& e = sample.epsilon.at(static_cast<std::size_t>(agent));
    if (e.size() != y.size()) throw DimensionMismatch("corrupt_output: output size");
    return sample.alpha.at(static_cast<std::size_t>(agent)) != 0 ? Vector(y + e) : y;
}

std::vector<Vector> corrupt_output(const std::vector<Vector>& y, const AttackSample& sample) {
    if (y.size() != sample.alpha.size() || y.size() != sample.epsilon.size())
        throw DimensionMismatch("corrupt_output: agent count");
    std::vector<Vector> out;
    out.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out.push_back(corrupt_output(y[i], sample, static_cast<int>(i)));
    return out;
}

EnergyAudit verify_energy_bound(const std::vector<std::vector<Vector>>& epsilon_trace, double tau) {
    EnergyAudit audit;
    audit.tau = tau;
    for (const auto& eps : epsilon_trace) {
        double e = 0.0;
        for (const auto& v : eps) e += v.squaredNorm();
        audit.max_energy = std::max(audit.max_energy, e);
    }
    audit.pass = audit.max_energy <= tau + 1e-12;
    return audit;
}

}  // namespace etc
