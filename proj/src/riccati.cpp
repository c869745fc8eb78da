#include "etc/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace etc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600,    0.0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

Matrix newton_riccati(const Matrix& a, const Matrix& r, const Matrix& w, const Matrix& x0, int iterations) {
    Matrix best = x0;
    double best_res = riccati_rhs(a, r, w, x0).norm();
    Matrix x = x0;
    for (int it = 0; it < iterations; ++it) {
        const Matrix ak = a - r * x;
        Matrix next;
        try {
            next = solve_lyapunov(ak, w + x * r * x);
        } catch (const Singular&) {
            break;
        }
        if (!next.allFinite()) break;
        const double res = riccati_rhs(a, r, w, next).norm();
        x = next;
        if (res < best_res) {
            best = next;
            best_res = res;
        } else if (res > 10.0 * best_res) {
            break;
        }
        if (best_res <= 1e-14 * std::max(1.0, best.norm())) break;
    }
    return best;
}

RiccatiResult integrate_riccati(const Matrix& a, const Matrix& r, const Matrix& w, const Matrix& x0,
                                const RiccatiOptions& opt) {
    require_finite(a, "riccati A");
    require_finite(r, "riccati R");
    require_finite(w, "riccati W");
    RiccatiResult out;
    Matrix x = x0;
    Matrix f = riccati_rhs(a, r, w, x);
    double h = 1e-3 / std::max(1.0, f.norm());
    std::array<Matrix, 7> k;

    for (std::size_t step = 0;; ++step) {
        out.steps = step;
        const double xn = x.norm();
        if (!x.allFinite() || xn > opt.blowup_norm) {
            out.status = RiccatiStatus::diverged;
            out.x = x;
            return out;
        }
        if (f.norm() == 0.0 || f.norm() < opt.handoff_tol * xn) {
            out.status = RiccatiStatus::converged;
            break;
        }
        if (step >= opt.max_steps) {
            out.status = RiccatiStatus::stalled;
            break;
        }
        k[0] = f;
        for (int s = 1; s < 7; ++s) {
            Matrix xs = x;
            for (int j = 0; j < s; ++j)
                if (kA[s][j] != 0.0) xs += h * kA[s][j] * k[j];
            k[s] = riccati_rhs(a, r, w, xs);
        }
        Matrix x5 = x, x4 = x;
        for (int s = 0; s < 7; ++s) {
            x5 += h * kB5[s] * k[s];
            x4 += h * kB4[s] * k[s];
        }
        const double scale = opt.atol + opt.rtol * std::max(xn, x5.norm());
        const double err = (x5 - x4).norm() / scale;
        if (!std::isfinite(err)) {
            h *= 0.1;
            if (h < 1e-300) {
                out.status = RiccatiStatus::diverged;
                out.x = x;
                return out;
            }
            continue;
        }
        if (err <= 1.0) {
            out.time += h;
            x = symmetrize(x5);
            f = riccati_rhs(a, r, w, x);
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
    }

    if (out.status == RiccatiStatus::converged && opt.newton_iterations > 0)
        x = newton_riccati(a, r, w, x, opt.newton_iterations);
    out.x = symmetrize(x);
    out.residual = riccati_rhs(a, r, w, out.x).norm();
    if (out.status == RiccatiStatus::converged && out.residual > opt.stationary_tol * std::max(1.0, out.x.norm()))
        out.status = RiccatiStatus::stalled;
    return out;
}

double decay_rate(const Matrix& m) {
    const Eigen::Index n = m.rows();
    const Matrix id = Matrix::Identity(n, n);
    if (!is_hurwitz(m)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (is_hurwitz(Matrix(m + hi * id))) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) return hi;
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (is_hurwitz(Matrix(m + mid * id)))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace etc
