#include "etc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace etc {

ProtocolScalars uniform_scalars(int agents, double dbar, double o, double upsilon, double iota, double eta,
                                double varsigma, double beta, double varpi0, double d0) {
    auto fill = [agents](double v) { return Vector::Constant(agents, v); };
    return ProtocolScalars{fill(dbar), fill(o),    fill(upsilon), fill(iota), fill(eta),
                           fill(varsigma), fill(beta), fill(varpi0),  fill(d0)};
}

void validate_scalars(const ProtocolScalars& s) {
    const auto n = s.dbar.size();
    for (const Vector* v : {&s.o, &s.upsilon, &s.iota, &s.eta, &s.varsigma, &s.beta, &s.varpi0, &s.d0})
        if (v->size() != n) throw DimensionMismatch("protocol scalars disagree on agent count");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(s.varpi0(i) > 0)) throw InvalidParameter("varpi0 must be positive");
        if (!(s.d0(i) > 1.0 && s.d0(i) < s.dbar(i))) throw InvalidParameter("d0 must lie in (1, dbar)");
        if (!(s.iota(i) > 0) || !(s.eta(i) > 0) || !(s.varsigma(i) > 0))
            throw InvalidParameter("iota, eta and varsigma must be positive");
        if (!(s.o(i) >= 0) || !(s.upsilon(i) >= 0) || !(s.beta(i) >= 0))
            throw InvalidParameter("o, upsilon and beta must be non-negative");
    }
}

StructuralConstants structural_constants(const TopologySet& topology, const MarkovChain& chain,
                                         const AttackConfig& attack) {
    if (chain.size() != topology.size()) throw DimensionMismatch("generator size differs from graph count");
    if (attack.agents() != topology.node_count()) throw DimensionMismatch("attack config agent count");
    StructuralConstants sc;
    sc.agents = topology.node_count();
    sc.graphs = topology.size();
    const auto eig = sym_eig(topology.union_laplacian);
    sc.lambda2 = sc.agents > 1 ? eig.values(1) : 0.0;
    sc.lambdaM = eig.values(eig.values.size() - 1);
    sc.lambdaM_FFT = attack.probability.size() ? attack.probability.cwiseAbs2().maxCoeff() : 0.0;
    sc.pi_bar = chain.stationary.minCoeff();
    sc.pi_breve = chain.stationary.maxCoeff();
    sc.tau = attack.tau;
    return sc;
}

double default_riccati_offset(const Matrix& a) { return 1e-4 * a.norm(); }

RiccatiResult solve_control_riccati(const Matrix& a, const Matrix& b, double gamma, double kappa_eff,
                                    double epsilon) {
    if (a.rows() != a.cols() || b.rows() != a.rows()) throw DimensionMismatch("solve_control_riccati");
    const auto n = a.rows();
    const Matrix shifted = a + 0.5 * kappa_eff * Matrix::Identity(n, n);
    const Matrix r = gamma * b * b.transpose();
    auto res = integrate_riccati(shifted, r, epsilon * Matrix::Identity(n, n), Matrix::Identity(n, n));
    if (res.status != RiccatiStatus::converged)
        throw NoConvergence("control Riccati flow did not settle");
    return res;
}

ObserverTerms observer_terms(const GainSet& g) {
    const auto& sc = g.structure;
    const double dbar = g.scalars.dbar.size() ? g.scalars.dbar.maxCoeff() : 0.0;
    const double coef = sc.graphs * (2.0 * g.c + dbar * dbar) * sc.pi_breve * sc.lambdaM * sc.lambdaM;
    return ObserverTerms{g.kappa, sc.lambdaM_FFT, coef * g.Gamma};
}

namespace {

Matrix psi_bar(const Matrix& a, const Matrix& c, const Matrix& q, const Matrix& x, const ObserverTerms& t) {
    const Matrix xc = x * c;
    return a.transpose() * q + q * a - xc - xc.transpose() + t.W + t.kappa * q;
}

// The lower-right block is -I_p: X is n x p, so the identity must match p.
Matrix observer_block(const Matrix& a, const Matrix& c, const Matrix& q, const Matrix& x, const ObserverTerms& t) {
    const auto n = a.rows();
    const auto p = c.rows();
    Matrix m(n + p, n + p);
    const Matrix off = std::sqrt(t.lambda_f) * x;
    m.topLeftCorner(n, n) = psi_bar(a, c, q, x, t);
    m.topRightCorner(n, p) = off;
    m.bottomLeftCorner(p, n) = off.transpose();
    m.bottomRightCorner(p, p) = -Matrix::Identity(p, p);
    return m;
}

MatrixCondition condition(std::string name, const Matrix& m) {
    MatrixCondition mc;
    mc.name = std::move(name);
    mc.margin = definiteness_margin(m);
    mc.norm = symmetrize(m).norm();
    mc.relative = mc.norm > 0 ? mc.margin / mc.norm : mc.margin;
    mc.pass = mc.margin < 0;
    return mc;
}

}  // namespace

ObserverResult synthesize_observer(const Matrix& a, const Matrix& c, const ObserverTerms& terms,
                                   const ObserverSearch& search) {
    const auto n = a.rows();
    if (c.cols() != n || terms.W.rows() != n) throw DimensionMismatch("synthesize_observer");
    const Matrix id = Matrix::Identity(n, n);
    const Matrix ctc = c.transpose() * c;

    struct Gain {
        ObserverCandidate info;
        Matrix G;
    };
    std::vector<Gain> pool;
    std::vector<double> seen;
    ObserverResult out;
    for (double w : search.w_grid) {
        for (double v : search.v_grid) {
            // G depends on w and v only through their product.
            const double z = w * v;
            if (std::any_of(seen.begin(), seen.end(), [z](double s) { return std::abs(s - z) <= 1e-9 * z; }))
                continue;
            seen.push_back(z);
            ObserverCandidate info{w, v};
            // Very large w*v makes the flow stiff for the explicit integrator;
            // those observers are far outside the feasible range anyway.
            RiccatiOptions dual_opt;
            dual_opt.max_steps = search.dual_step_cap;
            const auto dual = integrate_riccati(a.transpose(), w * ctc, v * id, id, dual_opt);
            if (dual.status != RiccatiStatus::converged) {
                out.tried.push_back(info);
                continue;
            }
            const Matrix g = w * dual.x * c.transpose();
            info.decay = decay_rate(a - g * c);
            if (info.decay <= 0) {
                out.tried.push_back(info);
                continue;
            }
            pool.push_back({info, g});
        }
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Gain& l, const Gain& r) { return l.info.decay > r.info.decay; });

    const double wscale = terms.W.norm() > 0 ? terms.W.norm() : 1.0;
    const Matrix q0 = Matrix::Zero(n, n);
    ObserverCandidate best;
    best.relative = std::numeric_limits<double>::infinity();
    for (const auto& cand : pool) {
        const Matrix abar = a - cand.G * c + 0.5 * terms.kappa * id;
        const Matrix r = -terms.lambda_f * cand.G * cand.G.transpose();
        for (double frac : search.delta_fractions) {
            ObserverCandidate info = cand.info;
            info.delta = frac * wscale;
            const auto game = integrate_riccati(abar, r, terms.W + info.delta * id, q0);
            if (game.status != RiccatiStatus::converged || min_eigenvalue(game.x) <= 0) {
                info.margin = info.relative = std::numeric_limits<double>::infinity();
                out.tried.push_back(info);
                continue;
            }
            const Matrix x = game.x * cand.G;
            const auto cond = condition("observer", observer_block(a, c, game.x, x, terms));
            info.margin = cond.margin;
            info.relative = cond.relative;
            info.accepted = cond.relative < -search.relative_margin;
            out.tried.push_back(info);
            if (info.relative < best.relative) best = info;
            if (info.accepted) {
                out.Q = game.x;
                out.X = x;
                out.G = cand.G;
                out.delta = info.delta;
                out.chosen = info;
                return out;
            }
        }
    }
    std::ostringstream msg;
    msg << "observer search exhausted " << out.tried.size() << " candidates";
    if (std::isfinite(best.relative)) msg << "; best relative margin " << best.relative;
    throw Infeasible(msg.str());
}

ProtocolConstants compute_protocol_constants(const StructuralConstants& sc, const ProtocolScalars& ps,
                                             double c, double chi, double kappa) {
    ProtocolConstants pc;
    pc.ctilde = (ps.dbar.array() + 4.0 * c).maxCoeff();
    const double n = sc.agents;
    pc.rho = pc.ctilde * sc.pi_breve * n * (n * n + n);
    pc.bound = chi > 0 && kappa > 0 ? std::sqrt(sc.tau / (chi * kappa)) : std::numeric_limits<double>::infinity();
    return pc;
}

const MatrixCondition* VerificationReport::matrix(const std::string& name) const {
    for (const auto& m : matrices)
        if (m.name == name) return &m;
    return nullptr;
}

const ScalarCondition* VerificationReport::scalar(const std::string& name) const {
    for (const auto& s : scalars)
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

template <typename F>
ScalarCondition worst_agent(std::string name, int agents, bool strict, F&& slack_and_threshold) {
    ScalarCondition sc;
    sc.name = std::move(name);
    sc.slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < agents; ++i) {
        const auto [slack, threshold] = slack_and_threshold(i);
        if (slack < sc.slack) {
            sc.slack = slack;
            sc.threshold = threshold;
            sc.agent = i;
        }
    }
    sc.pass = strict ? sc.slack > 0 : sc.slack >= 0;
    return sc;
}

}  // namespace

VerificationReport verify_theorem_conditions(const Matrix& a, const Matrix& b, const Matrix& c,
                                             const GainSet& g, std::optional<double> chi) {
    VerificationReport rep;
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const auto& sc = g.structure;

    rep.P_positive = g.P.rows() == n && min_eigenvalue(g.P) > 0;
    if (!rep.P_positive) return rep;
    const Matrix gamma = g.P * b * b.transpose() * g.P;
    const double coupling = sc.graphs > 0 ? g.c / sc.graphs * sc.lambda2 : 0.0;
    rep.matrices.push_back(condition(
        "cond_P", sc.pi_bar * (a.transpose() * g.P + g.P * a - coupling * gamma) + g.kappa * g.P));

    rep.Q_positive = g.Q.rows() == n && min_eigenvalue(g.Q) > 0;
    if (!rep.Q_positive) return rep;
    GainSet with_gamma = g;
    with_gamma.Gamma = gamma;
    rep.matrices.push_back(condition("cond_observer", observer_block(a, c, g.Q, g.X, observer_terms(with_gamma))));

    const double chi_auto = 0.99 * std::min(sc.lambda2 * min_eigenvalue(g.P), min_eigenvalue(g.Q));
    rep.chi = chi.value_or(chi_auto);
    rep.matrices.push_back(condition("cond_chi_P", rep.chi * id - sc.lambda2 * g.P));
    rep.matrices.push_back(condition("cond_chi_Q", rep.chi * id - g.Q));

    const auto pc = compute_protocol_constants(sc, g.scalars, g.c, rep.chi, g.kappa);
    const auto& s = g.scalars;
    const int agents = s.agents();
    rep.scalars.push_back(worst_agent("rho - varsigma > 0", agents, true, [&](int i) {
        return std::pair{pc.rho - s.varsigma(i), s.varsigma(i)};
    }));
    rep.scalars.push_back(worst_agent("eta - (rho - varsigma)/iota > 0", agents, true, [&](int i) {
        const double rhs = (pc.rho - s.varsigma(i)) / s.iota(i);
        return std::pair{s.eta(i) - rhs, rhs};
    }));
    rep.scalars.push_back(worst_agent("dbar > 4c + o + 1", agents, true, [&](int i) {
        const double rhs = 4.0 * g.c + s.o(i) + 1.0;
        return std::pair{s.dbar(i) - rhs, rhs};
    }));
    rep.scalars.push_back(worst_agent("upsilon >= 1/rho", agents, false, [&](int i) {
        return std::pair{s.upsilon(i) - 1.0 / pc.rho, 1.0 / pc.rho};
    }));

    rep.feasible = std::all_of(rep.matrices.begin(), rep.matrices.end(), [](const auto& m) { return m.pass; }) &&
                   std::all_of(rep.scalars.begin(), rep.scalars.end(), [](const auto& x) { return x.pass; });
    rep.certified = std::all_of(rep.matrices.begin(), rep.matrices.end(), [](const auto& m) {
        return m.relative < -kCertifiedRelativeMargin;
    });
    return rep;
}

SynthesisOutcome synthesize_gains(const Matrix& a, const Matrix& b, const Matrix& c,
                                  const StructuralConstants& sc, const ProtocolScalars& ps,
                                  const SynthesisSettings& settings) {
    SynthesisOutcome out;
    GainSet& g = out.gains;
    g.c = settings.c;
    g.kappa = settings.kappa;
    g.structure = sc;
    g.scalars = ps;
    g.epsilon = settings.epsilon.value_or(default_riccati_offset(a));

    const double gamma = settings.c / sc.graphs * sc.lambda2;
    if (!(gamma > 0)) {
        out.message = "coupling gain (c/s) lambda2 is not positive";
        return out;
    }
    try {
        const auto ric = solve_control_riccati(a, b, gamma, settings.kappa / sc.pi_bar, g.epsilon);
        g.P = ric.x;
        g.riccati_residual = ric.residual;
    } catch (const NoConvergence& e) {
        out.message = e.what();
        return out;
    }
    g.K = b.transpose() * g.P;
    g.Gamma = symmetrize(g.K.transpose() * g.K);

    try {
        out.observer = synthesize_observer(a, c, observer_terms(g), settings.observer);
    } catch (const Infeasible& e) {
        out.message = e.what();
        return out;
    }
    g.Q = out.observer.Q;
    g.X = out.observer.X;
    g.G = out.observer.G;
    g.observer_delta = out.observer.delta;

    out.report = verify_theorem_conditions(a, b, c, g);
    g.chi = out.report.chi;
    const auto pc = compute_protocol_constants(sc, ps, g.c, g.chi, g.kappa);
    g.ctilde = pc.ctilde;
    g.rho = pc.rho;
    g.bound = pc.bound;
    out.feasible = out.report.feasible && out.report.certified;
    if (!out.feasible) out.message = "verification failed";
    return out;
}

}  // namespace etc
