#include "etc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace etc {

std::size_t Scenario::steps() const { return static_cast<std::size_t>(std::llround(horizon / h)); }

void validate_baseline(const BaselineParams& b) {
    if (!(b.kappa > 0 && b.beta1 > 0 && b.beta2 > 0 && b.mu > 0 && b.c > 0))
        throw InvalidParameter("baseline parameters must be positive");
    if ((b.gamma.array() <= 0).any()) throw InvalidParameter("baseline gamma must be positive");
}

void validate_scenario(const Scenario& s) {
    validate_plant(s.plant);
    const int n = s.agents();
    if (s.chain.size() != s.topology.size()) throw DimensionMismatch("generator size differs from graph count");
    if (s.attack.agents() != n) throw DimensionMismatch("attack config agent count");
    if (s.scalars.agents() != n) throw DimensionMismatch("protocol scalars agent count");
    for (const auto& dir : s.attack.signal.direction)
        if (dir.size() != s.plant.p()) throw DimensionMismatch("attack direction length differs from outputs");
    validate_scalars(s.scalars);
    if (!(s.h > 0)) throw InvalidParameter("integration step must be positive");
    if (!(s.horizon >= 10 * s.h)) throw InvalidParameter("horizon must cover at least ten steps");
    if (s.decimation < 1) throw InvalidParameter("decimation must be at least 1");
    if (!s.initial.x0.empty()) {
        if (static_cast<int>(s.initial.x0.size()) != n) throw DimensionMismatch("x0 agent count");
        for (const auto& v : s.initial.x0)
            if (v.size() != s.plant.n()) throw DimensionMismatch("x0 state length");
    }
    if (s.initial.observer == ObserverInit::given) {
        if (static_cast<int>(s.initial.xhat0.size()) != n) throw DimensionMismatch("xhat0 agent count");
        for (const auto& v : s.initial.xhat0)
            if (v.size() != s.plant.n()) throw DimensionMismatch("xhat0 state length");
    }
    validate_baseline(s.baseline);
    if (s.baseline.gamma.size() != 0 && s.baseline.gamma.size() != n)
        throw DimensionMismatch("baseline gamma agent count");
}

Matrix consensus_error(const Matrix& x) {
    return x.colwise() - x.rowwise().mean();
}

namespace {

struct Engine {
    const Scenario& sc;
    const GainSet& gains;
    int N, n, m, p;
    SwitchingPath path;
    AttackProcess attack;
    Matrix x, xhat;
    Matrix eps_mask;  // alpha per agent as a row, broadcast over outputs

    Engine(const Scenario& s, const GainSet& g)
        : sc(s), gains(g), N(s.agents()), n(s.plant.n()), m(s.plant.m()), p(s.plant.p()),
          attack(s.attack, make_rng(s.seed, Stream::attack)) {
        validate_scenario(s);
        if (g.K.rows() != m || g.K.cols() != n || g.G.rows() != n || g.G.cols() != p || g.Gamma.rows() != n)
            throw DimensionMismatch("gain set does not match the plant");
        Rng sw = make_rng(s.seed, Stream::switching);
        path = sample_switching_path(s.chain, s.horizon, sw);

        x = Matrix::Zero(n, N);
        if (!s.initial.x0.empty()) {
            for (int i = 0; i < N; ++i) x.col(i) = s.initial.x0[i];
        } else {
            Rng ic = make_rng(s.seed, Stream::initial);
            const int pos = std::min(n, p);
            for (int i = 0; i < N; ++i)
                for (int k = 0; k < pos; ++k) x(k, i) = ic.uniform(-s.initial.position_range, s.initial.position_range);
        }
    }

    Matrix outputs(const Matrix& xs, const Matrix& alpha, double t) const {
        Matrix y = sc.plant.C * xs;
        if (!sc.attack.enabled) return y;
        const auto eps = attack_signal(sc.attack, t);
        for (int i = 0; i < N; ++i)
            if (alpha(0, i) != 0.0) y.col(i) += eps[i];
        return y;
    }

    void init_observer(const Matrix& alpha) {
        xhat = Matrix::Zero(n, N);
        switch (sc.initial.observer) {
            case ObserverInit::zero:
                break;
            case ObserverInit::given:
                for (int i = 0; i < N; ++i) xhat.col(i) = sc.initial.xhat0[i];
                break;
            case ObserverInit::measurement: {
                const Matrix& c = sc.plant.C;
                const Matrix cct = c * c.transpose();
                xhat = c.transpose() * solve_linear(cct, outputs(x, alpha, 0.0));
                break;
            }
        }
    }

    // Classical RK4 on plant and observer with u and alpha held over the step.
    void advance(const Matrix& u, const Matrix& alpha, double t, double h) {
        const Matrix& A = sc.plant.A;
        const Matrix& B = sc.plant.B;
        const Matrix& C = sc.plant.C;
        const Matrix& G = gains.G;
        const Matrix bu = B * u;
        auto deriv = [&](const Matrix& xs, const Matrix& xh, double tau, Matrix& dx, Matrix& dxh) {
            dx = A * xs + bu;
            dxh = A * xh + bu + G * (outputs(xs, alpha, tau) - C * xh);
        };
        Matrix k1x, k1h, k2x, k2h, k3x, k3h, k4x, k4h;
        deriv(x, xhat, t, k1x, k1h);
        deriv(x + 0.5 * h * k1x, xhat + 0.5 * h * k1h, t + 0.5 * h, k2x, k2h);
        deriv(x + 0.5 * h * k2x, xhat + 0.5 * h * k2h, t + 0.5 * h, k3x, k3h);
        deriv(x + h * k3x, xhat + h * k3h, t + h, k4x, k4h);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        xhat += h / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
    }

    Matrix alpha_row(const AttackSample& s) const {
        Matrix a(1, N);
        for (int i = 0; i < N; ++i) a(0, i) = s.alpha[i];
        return a;
    }
};

// Tail statistics, Lyapunov diagnostic and attack audit, all at full rate.
struct Accumulator {
    const Scenario& sc;
    const GainSet& gains;
    double tail_start;
    Metrics metrics;
    std::size_t tail_samples = 0;
    double v1_tail_sum = 0.0;

    Accumulator(const Scenario& s, const GainSet& g, std::string protocol)
        : sc(s), gains(g), tail_start(0.9 * s.horizon - 1e-9 * s.horizon) {
        metrics.protocol = std::move(protocol);
    }

    double v1(const Matrix& x, const Matrix& xhat, int sigma) const {
        const Matrix delta = consensus_error(x);
        const Matrix q = x - xhat;
        const Matrix& l = sc.topology.laplacians[sigma];
        const double a = l.cwiseProduct(delta.transpose() * gains.P * delta).sum();
        const double b = (q.transpose() * gains.Q * q).trace() / sc.topology.size();
        return a + b;
    }

    void observe(double t, const Matrix& x, const Matrix& xhat, int sigma, bool first) {
        const Matrix delta = consensus_error(x);
        if (first) metrics.lyapunov_v1_initial = v1(x, xhat, sigma);
        if (t >= tail_start) {
            const Matrix pos = sc.plant.C * delta;
            metrics.steady_state_pos_error = std::max(metrics.steady_state_pos_error, pos.cwiseAbs().maxCoeff());
            const double dn = delta.norm();
            metrics.ms_delta_tail += dn * dn;
            metrics.mean_delta_tail += dn;
            v1_tail_sum += v1(x, xhat, sigma);
            ++tail_samples;
        }
        if (sc.attack.enabled) {
            double e = 0.0;
            for (const auto& v : attack_signal(sc.attack, t)) e += v.squaredNorm();
            metrics.attack_energy_max = std::max(metrics.attack_energy_max, e);
        }
    }

    void finish(const TimeSeries& ts, const SwitchingPath& path) {
        if (tail_samples > 0) {
            metrics.ms_delta_tail /= tail_samples;
            metrics.mean_delta_tail /= tail_samples;
            metrics.lyapunov_v1_tail = v1_tail_sum / tail_samples;
        }
        metrics.attack_energy_ok = metrics.attack_energy_max <= sc.attack.tau + 1e-12;
        const auto stats = trigger_statistics(ts);
        for (const auto& a : stats.agents) metrics.trigger_counts.push_back(a.count);
        metrics.total_triggers = stats.total;
        metrics.min_inter_event = stats.min_gap;
        metrics.mean_inter_event = stats.mean_gap;
        metrics.occupancy = occupancy_fractions(path, sc.topology.size());
    }
};

struct Recorder {
    TimeSeries ts;
    Eigen::VectorXi fired;

    Recorder(const Scenario& s, int agents) {
        ts.h = s.h;
        ts.decimation = s.decimation;
        ts.events.resize(static_cast<std::size_t>(agents));
        fired = Eigen::VectorXi::Zero(agents);
        const std::size_t samples = s.steps() / static_cast<std::size_t>(s.decimation) + 2;
        ts.t.reserve(samples);
    }

    void fire(int i, double t) {
        fired(i) = 1;
        ts.events[i].push_back(t);
    }

    void record(double t, int sigma, const Engine& e, const Matrix& u, const Vector& d, const Vector& varpi,
                const Matrix& alpha) {
        ts.t.push_back(t);
        ts.sigma.push_back(sigma);
        ts.x.push_back(e.x);
        ts.xhat.push_back(e.xhat);
        ts.u.push_back(u);
        ts.d.push_back(d);
        ts.varpi.push_back(varpi);
        ts.triggered.push_back(fired);
        ts.alpha.push_back(alpha.row(0).transpose().cast<int>());
        const Matrix pos = e.sc.plant.C * consensus_error(e.x);
        ts.delta_pos_norm.push_back(pos.colwise().norm().transpose());
        fired.setZero();
    }
};

void check_state(const Engine& e, std::size_t step) {
    if (!e.x.allFinite() || !e.xhat.allFinite())
        throw InvariantViolation("non-finite state at step " + std::to_string(step), step);
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const GainSet& gains) {
    Engine e(sc, gains);
    const int N = e.N;
    const Matrix& Gamma = gains.Gamma;
    const auto& s = sc.scalars;
    std::vector<AgentParams> params(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        params[i] = AgentParams{s.iota(i), s.o(i), s.upsilon(i), s.eta(i), s.varsigma(i), s.beta(i), s.dbar(i)};

    Accumulator acc(sc, gains, "proposed");
    Recorder rec(sc, N);

    AttackSample sample = e.attack.sample(0.0);
    Matrix alpha = e.alpha_row(sample);
    e.init_observer(alpha);

    std::vector<AgentState> agent(static_cast<std::size_t>(N));
    std::vector<Vector> held(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        agent[i].d = s.d0(i);
        agent[i].varpi = s.varpi0(i);
        agent[i].trigger_count = 1;
        held[i] = e.xhat.col(i);
        rec.fire(i, 0.0);
    }
    int sigma = e.path.state_at(0.0);
    std::vector<Vector> xi(static_cast<std::size_t>(N));
    auto refresh = [&](int i) { xi[i] = broadcast_relative_state(NetworkView{&sc.topology.graphs[sigma], &held}, i); };
    for (int i = 0; i < N; ++i) refresh(i);

    std::vector<double> varpi_at_trigger(static_cast<std::size_t>(N));
    std::vector<double> t_trigger(static_cast<std::size_t>(N), 0.0);
    for (int i = 0; i < N; ++i) varpi_at_trigger[i] = agent[i].varpi;
    double bound_ratio = std::numeric_limits<double>::infinity();
    double varpi_min = s.varpi0.minCoeff();

    Matrix u(e.m, N);
    auto control = [&] {
        for (int i = 0; i < N; ++i) u.col(i) = control_input(agent[i], xi[i], gains.K);
    };
    auto state_vectors = [&] {
        Vector d(N), w(N);
        for (int i = 0; i < N; ++i) {
            d(i) = agent[i].d;
            w(i) = agent[i].varpi;
        }
        return std::pair{d, w};
    };

    control();
    acc.observe(0.0, e.x, e.xhat, sigma, true);
    {
        const auto [d, w] = state_vectors();
        rec.record(0.0, sigma, e, u, d, w, alpha);
    }

    const std::size_t steps = sc.steps();
    const double h = sc.h;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const double t_next = static_cast<double>(k + 1) * h;
        sample = e.attack.sample(t);
        alpha = e.alpha_row(sample);
        control();

        // Threshold and coupling use m and xi frozen at the step start.
        std::vector<double> mgm(static_cast<std::size_t>(N)), xgx(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
            agent[i].xhat = e.xhat.col(i);
            agent[i].held = held[i];
            const Vector mi = estimation_deviation(agent[i]);
            mgm[i] = quadratic(mi, Gamma);
            xgx[i] = quadratic(xi[i], Gamma);
        }
        e.advance(u, alpha, t, h);
        check_state(e, k + 1);

        for (int i = 0; i < N; ++i) {
            const auto& pr = params[i];
            const double forcing = pr.varsigma * (pr.o * pr.upsilon * xgx[i] - mgm[i]);
            auto f = [&](double w) { return -pr.eta * w + forcing; };
            const double w0 = agent[i].varpi;
            const double k1 = f(w0), k2 = f(w0 + 0.5 * h * k1), k3 = f(w0 + 0.5 * h * k2), k4 = f(w0 + h * k3);
            agent[i].varpi = w0 + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            if (!(agent[i].varpi > 0) || !std::isfinite(agent[i].varpi))
                throw InvariantViolation("threshold variable of agent " + std::to_string(i) +
                                             " left (0, inf) at step " + std::to_string(k + 1),
                                         k + 1);
            varpi_min = std::min(varpi_min, agent[i].varpi);

            if (agent[i].d < pr.dbar) agent[i].d = std::min(pr.dbar, agent[i].d + h * pr.beta * xgx[i]);

            const double rate = pr.eta + pr.varsigma / pr.iota;
            const double bound = varpi_at_trigger[i] * std::exp(-rate * (t_next - t_trigger[i]));
            bound_ratio = std::min(bound_ratio, agent[i].varpi / bound);
        }

        const int sigma_next = e.path.state_at(t_next);
        const bool switched = sigma_next != sigma;
        sigma = sigma_next;

        std::vector<int> fired;
        for (int i = 0; i < N; ++i) {
            agent[i].xhat = e.xhat.col(i);
            agent[i].held = held[i];
            if (trigger_predicate(agent[i], xi[i], Gamma, params[i])) fired.push_back(i);
        }
        for (int i : fired) {
            held[i] = e.xhat.col(i);
            agent[i].last_trigger = t_next;
            ++agent[i].trigger_count;
            varpi_at_trigger[i] = agent[i].varpi;
            t_trigger[i] = t_next;
            rec.fire(i, t_next);
        }
        if (sc.xi_hold == XiHoldMode::refresh) {
            if (switched || !fired.empty())
                for (int i = 0; i < N; ++i) refresh(i);
        } else {
            for (int i : fired) refresh(i);
        }

        acc.observe(t_next, e.x, e.xhat, sigma, false);
        if ((k + 1) % static_cast<std::size_t>(sc.decimation) == 0 || k + 1 == steps) {
            control();
            const auto [d, w] = state_vectors();
            rec.record(t_next, sigma, e, u, d, w, alpha);
        }
    }

    acc.metrics.varpi_min = varpi_min;
    acc.metrics.threshold_bound_ratio = bound_ratio;
    {
        const auto [d, w] = state_vectors();
        acc.metrics.d_final = d;
    }
    acc.finish(rec.ts, e.path);
    return RunResult{std::move(rec.ts), std::move(acc.metrics)};
}

Matrix baseline_gain(const PlantModel& plant) {
    const auto res = solve_control_riccati(plant.A, plant.B, 1.0, 0.0, 1.0);
    return plant.B.transpose() * res.x;
}

RunResult run_baseline(const Scenario& sc, const GainSet& gains) {
    Engine e(sc, gains);
    const int N = e.N;
    const auto& bp = sc.baseline;
    const Matrix kb = baseline_gain(sc.plant);
    const Matrix weight = kb.transpose() * kb;  // P B B^T P
    const Vector gamma = bp.gamma.size() ? bp.gamma : Vector::Ones(N);

    Accumulator acc(sc, gains, "baseline");
    Recorder rec(sc, N);

    AttackSample sample = e.attack.sample(0.0);
    Matrix alpha = e.alpha_row(sample);
    e.init_observer(alpha);

    int sigma = e.path.state_at(0.0);
    auto relative = [&] {
        const Matrix& z = bp.raw_state ? e.x : e.xhat;
        return Matrix(z * sc.topology.laplacians[sigma]);  // column i: sum_j a_ij (z_i - z_j)
    };
    Matrix xi_held = relative();
    for (int i = 0; i < N; ++i) rec.fire(i, 0.0);

    const Vector zeros = Vector::Zero(N);
    Matrix u = -bp.kappa * kb * xi_held;
    acc.observe(0.0, e.x, e.xhat, sigma, true);
    rec.record(0.0, sigma, e, u, zeros, zeros, alpha);

    const std::size_t steps = sc.steps();
    const double h = sc.h;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const double t_next = static_cast<double>(k + 1) * h;
        sample = e.attack.sample(t);
        alpha = e.alpha_row(sample);
        u = -bp.kappa * kb * xi_held;
        e.advance(u, alpha, t, h);
        check_state(e, k + 1);
        sigma = e.path.state_at(t_next);

        const Matrix xi = relative();
        for (int i = 0; i < N; ++i) {
            const Vector err = xi_held.col(i) - xi.col(i);
            const double f = bp.kappa / bp.beta1 * quadratic(err, weight) -
                             bp.beta2 * gamma(i) * bp.mu * xi.col(i).squaredNorm() - bp.c;
            if (f >= 0) {
                xi_held.col(i) = xi.col(i);
                rec.fire(i, t_next);
            }
        }

        acc.observe(t_next, e.x, e.xhat, sigma, false);
        if ((k + 1) % static_cast<std::size_t>(sc.decimation) == 0 || k + 1 == steps) {
            u = -bp.kappa * kb * xi_held;
            rec.record(t_next, sigma, e, u, zeros, zeros, alpha);
        }
    }
    acc.finish(rec.ts, e.path);
    return RunResult{std::move(rec.ts), std::move(acc.metrics)};
}

TriggerSummary trigger_statistics(const TimeSeries& ts) {
    TriggerSummary out;
    double gap_sum = 0.0;
    std::size_t gap_count = 0;
    out.min_gap = std::numeric_limits<double>::infinity();
    for (const auto& ev : ts.events) {
        TriggerStats st;
        st.count = ev.size();
        for (std::size_t k = 1; k < ev.size(); ++k) st.gaps.push_back(ev[k] - ev[k - 1]);
        if (!st.gaps.empty()) {
            st.min_gap = *std::min_element(st.gaps.begin(), st.gaps.end());
            st.max_gap = *std::max_element(st.gaps.begin(), st.gaps.end());
            double sum = 0.0;
            for (double g : st.gaps) sum += g;
            st.mean_gap = sum / st.gaps.size();
            gap_sum += sum;
            gap_count += st.gaps.size();
            out.min_gap = std::min(out.min_gap, st.min_gap);
            if (ts.h > 0 && st.min_gap < ts.h * (1.0 - 1e-9)) out.gaps_at_least_step = false;
        }
        out.total += st.count;
        out.agents.push_back(std::move(st));
    }
    if (gap_count == 0) out.min_gap = 0.0;
    out.mean_gap = gap_count ? gap_sum / gap_count : 0.0;
    return out;
}

std::vector<double> lyapunov_diagnostic(const TimeSeries& ts, const GainSet& gains, const TopologySet& topology) {
    std::vector<double> v;
    v.reserve(ts.samples());
    for (std::size_t k = 0; k < ts.samples(); ++k) {
        const Matrix delta = consensus_error(ts.x[k]);
        const Matrix q = ts.x[k] - ts.xhat[k];
        const Matrix& l = topology.laplacians[ts.sigma[k]];
        v.push_back(l.cwiseProduct(delta.transpose() * gains.P * delta).sum() +
                    (q.transpose() * gains.Q * q).trace() / topology.size());
    }
    return v;
}

double threshold_bound_ratio(const TimeSeries& ts, const ProtocolScalars& s) {
    if (ts.samples() == 0) return std::numeric_limits<double>::infinity();
    const int N = static_cast<int>(ts.varpi.front().size());
    double ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
        const double rate = s.eta(i) + s.varsigma(i) / s.iota(i);
        double ref = ts.varpi[0](i), t_ref = ts.t[0];
        for (std::size_t k = 1; k < ts.samples(); ++k) {
            ratio = std::min(ratio, ts.varpi[k](i) / (ref * std::exp(-rate * (ts.t[k] - t_ref))));
            if (ts.triggered[k](i) != 0) {
                ref = ts.varpi[k](i);
                t_ref = ts.t[k];
            }
        }
    }
    return ratio;
}

namespace {

Aggregate aggregate(const std::vector<double>& v) {
    Aggregate a;
    if (v.empty()) return a;
    double sum = 0.0;
    for (double x : v) sum += x;
    a.mean = sum / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.stddev = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
    return a;
}

}  // namespace

BatchResult run_batch(const Scenario& scenario, const GainSet& gains, const std::vector<std::uint64_t>& seeds,
                      Protocol protocol) {
    if (seeds.empty()) throw InvalidParameter("seed list is empty");
    BatchResult out;
    out.seeds = seeds;
    out.runs.resize(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                              static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < seeds.size(); k += workers) {
                try {
                    Scenario sc = scenario;
                    sc.seed = seeds[k];
                    sc.decimation = static_cast<int>(std::max<std::size_t>(1, sc.steps()));
                    auto r = protocol == Protocol::proposed ? run_scenario(sc, gains) : run_baseline(sc, gains);
                    out.runs[k] = std::move(r.metrics);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> sse, trig, mdt, msd, gap;
    for (const auto& m : out.runs) {
        sse.push_back(m.steady_state_pos_error);
        trig.push_back(static_cast<double>(m.total_triggers));
        mdt.push_back(m.mean_delta_tail);
        msd.push_back(m.ms_delta_tail);
        gap.push_back(m.min_inter_event);
    }
    out.steady_state_pos_error = aggregate(sse);
    out.total_triggers = aggregate(trig);
    out.mean_delta_tail = aggregate(mdt);
    out.ms_delta_tail = aggregate(msd);
    out.min_inter_event = aggregate(gap);
    out.bound = gains.chi > 0 && gains.kappa > 0 ? std::sqrt(scenario.attack.tau / (gains.chi * gains.kappa))
                                                 : std::numeric_limits<double>::infinity();
    out.bound_ratio = out.mean_delta_tail.mean / out.bound;
    return out;
}

BatchResult monte_carlo(const Scenario& scenario, const GainSet& gains, const std::vector<std::uint64_t>& seeds,
                        Protocol protocol) {
    if (seeds.size() < 2) throw InvalidParameter("monte_carlo needs at least two seeds");
    return run_batch(scenario, gains, seeds, protocol);
}

}  // namespace etc
