#pragma once

#include <optional>
#include <string>
#include <vector>

#include "etc/attack.hpp"
#include "etc/graph.hpp"
#include "etc/matrix.hpp"
#include "etc/riccati.hpp"

namespace etc {

/// Per-agent trigger and adaptive-coupling scalars.
struct ProtocolScalars {
    Vector dbar, o, upsilon, iota, eta, varsigma, beta, varpi0, d0;

    int agents() const { return static_cast<int>(dbar.size()); }
};

ProtocolScalars uniform_scalars(int agents, double dbar, double o, double upsilon, double iota, double eta,
                                double varsigma, double beta, double varpi0, double d0);
void validate_scalars(const ProtocolScalars& s);

/// Graph, switching and attack quantities that enter the design conditions.
struct StructuralConstants {
    int agents = 0;
    int graphs = 0;          // s
    double lambda2 = 0.0;    // second eigenvalue of the summed Laplacian
    double lambdaM = 0.0;    // its largest eigenvalue
    double lambdaM_FFT = 0.0;
    double pi_bar = 0.0;     // min stationary probability
    double pi_breve = 0.0;   // max stationary probability
    double tau = 0.0;
};

StructuralConstants structural_constants(const TopologySet& topology, const MarkovChain& chain,
                                         const AttackConfig& attack);

struct GainSet {
    Matrix P, Q, X, K, G, Gamma;
    double c = 0.0, kappa = 0.0, chi = 0.0, epsilon = 0.0;
    StructuralConstants structure;
    ProtocolScalars scalars;
    double ctilde = 0.0, rho = 0.0, bound = 0.0;
    double observer_delta = 0.0;
    double riccati_residual = 0.0;
};

/// 1e-4 * ||A||_F, the offset used by the control Riccati equation.
double default_riccati_offset(const Matrix& a);

/// Stationary point of dP/dt = A'^T P + P A' - gamma P B B^T P + eps I with
/// A' = A + (kappa_eff / 2) I, integrated from P(0) = I.
RiccatiResult solve_control_riccati(const Matrix& a, const Matrix& b, double gamma, double kappa_eff,
                                    double epsilon);

/// Inputs to the observer inequality. W collects every Gamma-dependent term of
/// Psi-bar: s (2c + dbar^2) Pi-breve lambdaM^2 Gamma.
struct ObserverTerms {
    double kappa = 0.0;
    double lambda_f = 0.0;
    Matrix W;
};

ObserverTerms observer_terms(const GainSet& partial);

struct ObserverSearch {
    std::vector<double> w_grid{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    std::vector<double> v_grid{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    std::vector<double> delta_fractions{1e-2, 1e-3, 1e-4, 1e-5};
    double relative_margin = 1e-8;
    std::size_t dual_step_cap = 20'000;
};

struct ObserverCandidate {
    double w = 0.0, v = 0.0;
    double decay = 0.0;
    double delta = 0.0;
    double margin = 0.0;
    double relative = 0.0;
    bool accepted = false;
};

struct ObserverResult {
    Matrix Q, X, G;
    double delta = 0.0;
    ObserverCandidate chosen;
    std::vector<ObserverCandidate> tried;
};

/// Dual Riccati grid for G, then Q from the game Riccati equation
///   Abar^T Q + Q Abar + lambda_f Q G G^T Q + W + delta I = 0,
/// Abar = A - G C + (kappa / 2) I, and X = Q G. Candidates are tried in order
/// of decreasing observer decay rate; the first certified one is returned.
ObserverResult synthesize_observer(const Matrix& a, const Matrix& c, const ObserverTerms& terms,
                                   const ObserverSearch& search = {});

struct ProtocolConstants {
    double ctilde = 0.0;
    double rho = 0.0;
    double bound = 0.0;
};

ProtocolConstants compute_protocol_constants(const StructuralConstants& sc, const ProtocolScalars& ps,
                                             double c, double chi, double kappa);

struct MatrixCondition {
    std::string name;
    double margin = 0.0;    // largest eigenvalue of the symmetrized matrix
    double norm = 0.0;      // its Frobenius norm
    double relative = 0.0;  // margin / norm
    bool pass = false;      // margin < 0
};

struct ScalarCondition {
    std::string name;
    double slack = 0.0;      // worst agent: lhs - rhs
    double threshold = 0.0;  // rhs at the worst agent
    int agent = 0;
    bool pass = false;
};

struct VerificationReport {
    bool P_positive = false;
    bool Q_positive = false;
    std::vector<MatrixCondition> matrices;
    std::vector<ScalarCondition> scalars;
    double chi = 0.0;
    bool feasible = false;
    bool certified = false;  // every matrix margin below -relative_tol * norm

    const MatrixCondition* matrix(const std::string& name) const;
    const ScalarCondition* scalar(const std::string& name) const;
};

inline constexpr double kCertifiedRelativeMargin = 1e-8;

/// Assembles each design inequality from the GainSet and reports signed
/// margins. chi defaults to 0.99 min(lambda_min(lambda2 P), lambda_min(Q)).
VerificationReport verify_theorem_conditions(const Matrix& a, const Matrix& b, const Matrix& c,
                                             const GainSet& gains, std::optional<double> chi = std::nullopt);

struct SynthesisSettings {
    double c = 5.2356;
    double kappa = 0.001;
    std::optional<double> epsilon;
    ObserverSearch observer;
};

struct SynthesisOutcome {
    GainSet gains;
    VerificationReport report;
    ObserverResult observer;
    bool feasible = false;
    std::string message;
};

/// Full design: control Riccati, observer search, constants, verification.
/// Never throws Infeasible; the outcome carries the flag and best report.
SynthesisOutcome synthesize_gains(const Matrix& a, const Matrix& b, const Matrix& c,
                                  const StructuralConstants& sc, const ProtocolScalars& ps,
                                  const SynthesisSettings& settings);

}  // namespace etc
