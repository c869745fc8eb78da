#pragma once

#include <cstddef>

#include "etc/matrix.hpp"

namespace etc {

/// Right-hand side of the symmetric Riccati flow
///   dX/dt = A^T X + X A - X R X + W.
inline Matrix riccati_rhs(const Matrix& a, const Matrix& r, const Matrix& w, const Matrix& x) {
    return a.transpose() * x + x * a - x * r * x + w;
}

struct RiccatiOptions {
    double handoff_tol = 1e-7;      // integrate until ||dX/dt||_F < tol * ||X||_F
    double stationary_tol = 1e-10;  // residual accepted after Newton polishing
    double rtol = 1e-9;
    double atol = 1e-12;
    double blowup_norm = 1e12;
    std::size_t max_steps = 1'000'000;
    int newton_iterations = 50;
};

enum class RiccatiStatus { converged, diverged, stalled };

struct RiccatiResult {
    Matrix x;
    RiccatiStatus status = RiccatiStatus::stalled;
    double residual = 0.0;  // Frobenius norm of the algebraic residual
    double time = 0.0;
    std::size_t steps = 0;
};

/// Integrates the Riccati flow from x0 with an adaptive Dormand-Prince pair
/// until it is nearly stationary, then polishes with Newton steps on the
/// algebraic equation. The integrator alone stalls near 1e-10 relative
/// because accepted steps jitter at the rtol level. Blow-up past
/// blowup_norm reports diverged.
RiccatiResult integrate_riccati(const Matrix& a, const Matrix& r, const Matrix& w, const Matrix& x0,
                                const RiccatiOptions& opt = {});

/// Newton iteration on A^T X + X A - X R X + W = 0 started at x0; returns the
/// iterate with the smallest residual.
Matrix newton_riccati(const Matrix& a, const Matrix& r, const Matrix& w, const Matrix& x0, int iterations);

/// sup { alpha : M + alpha I is Hurwitz }; non-positive when M is not Hurwitz.
double decay_rate(const Matrix& m);

}  // namespace etc
