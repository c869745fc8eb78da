#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "etc/errors.hpp"

namespace etc {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite()) throw NonFinite(std::string(what) + ": non-finite entry");
}

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
template <typename DA, typename DB>
MatrixX<typename DA::Scalar> kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    using Scalar = typename DA::Scalar;
    const MatrixX<Scalar> bb = b;
    MatrixX<Scalar> out(a.rows() * bb.rows(), a.cols() * bb.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * bb.rows(), j * bb.cols(), bb.rows(), bb.cols()) = a(i, j) * bb;
    return out;
}

template <typename Scalar>
struct SymEigResult {
    VectorX<Scalar> values;   // ascending
    MatrixX<Scalar> vectors;  // column k pairs with values(k)
    int sweeps = 0;
};

inline constexpr int kJacobiSweepCap = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is flipped so that its
/// largest-magnitude component (first one on ties) is positive.
template <typename Derived>
SymEigResult<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& s) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    using std::sqrt;
    if (s.rows() != s.cols()) throw DimensionMismatch("sym_eig: matrix is not square");
    require_finite(s, "sym_eig");

    MatrixX<Scalar> a = s;
    const Eigen::Index n = a.rows();
    const Scalar scale = a.cwiseAbs().maxCoeff();
    const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (n > 0 && asym > Scalar(1e-10) * scale) throw NotSymmetric("sym_eig: input is not symmetric");
    a = (a + a.transpose()) / Scalar(2);

    MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar total = a.squaredNorm();

    auto off_diagonal = [&] {
        Scalar sum = 0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) sum += a(p, q) * a(p, q);
        return Scalar(2) * sum;
    };

    int sweep = 0;
    for (;; ++sweep) {
        const Scalar off = off_diagonal();
        if (off == Scalar(0) || off <= eps * eps * total) break;
        if (sweep == kJacobiSweepCap) throw NoConvergence("sym_eig: sweep cap reached");
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Scalar apq = a(p, q);
                if (apq == Scalar(0)) continue;
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
                const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                                 (abs(theta) + sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
                const Scalar sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = a(q, p) = Scalar(0);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

    SymEigResult<Scalar> out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    out.sweeps = sweep;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src);
        VectorX<Scalar> col = v.col(src);
        Eigen::Index big = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (abs(col(i)) > abs(col(big))) big = i;
        if (col(big) < Scalar(0)) col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& s) {
    return (s + s.transpose()) / typename Derived::Scalar(2);
}

/// Largest eigenvalue of (S + S^T) / 2. Negative means negative definite.
template <typename Derived>
typename Derived::Scalar definiteness_margin(const Eigen::MatrixBase<Derived>& s) {
    if (s.rows() != s.cols()) throw DimensionMismatch("definiteness_margin: matrix is not square");
    if (s.rows() == 0) return typename Derived::Scalar(0);
    const auto eig = sym_eig(symmetrize(s));
    return eig.values(eig.values.size() - 1);
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& s) {
    return sym_eig(symmetrize(s)).values(0);
}

template <typename Derived>
typename Derived::Scalar max_eigenvalue(const Eigen::MatrixBase<Derived>& s) {
    return definiteness_margin(s);
}

inline constexpr double kPivotFloor = 1e-12;

/// Gaussian elimination with partial pivoting; rhs may have several columns.
template <typename DA, typename DB>
MatrixX<typename DA::Scalar> solve_linear(const Eigen::MatrixBase<DA>& a_in,
                                          const Eigen::MatrixBase<DB>& rhs) {
    using Scalar = typename DA::Scalar;
    using std::abs;
    if (a_in.rows() != a_in.cols()) throw DimensionMismatch("solve_linear: matrix is not square");
    if (rhs.rows() != a_in.rows()) throw DimensionMismatch("solve_linear: rhs row count");
    require_finite(a_in, "solve_linear");
    require_finite(rhs, "solve_linear");

    MatrixX<Scalar> a = a_in;
    MatrixX<Scalar> x = rhs;
    const Eigen::Index n = a.rows();
    const Scalar floor = Scalar(kPivotFloor) * a.norm();

    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (abs(a(i, k)) > abs(a(piv, k))) piv = i;
        if (!(abs(a(piv, k)) > floor) || a(piv, k) == Scalar(0))
            throw Singular("solve_linear: pivot below floor");
        if (piv != k) {
            a.row(k).swap(a.row(piv));
            x.row(k).swap(x.row(piv));
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const Scalar f = a(i, k) / a(k, k);
            if (f == Scalar(0)) continue;
            a.row(i).tail(n - k) -= f * a.row(k).tail(n - k);
            x.row(i) -= f * x.row(k);
        }
    }
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        for (Eigen::Index j = k + 1; j < n; ++j) x.row(k) -= a(k, j) * x.row(j);
        x.row(k) /= a(k, k);
    }
    return x;
}

/// Solves A^T X + X A = -R for X through the vectorized Kronecker system.
template <typename DA, typename DR>
MatrixX<typename DA::Scalar> solve_lyapunov(const Eigen::MatrixBase<DA>& a,
                                            const Eigen::MatrixBase<DR>& r) {
    using Scalar = typename DA::Scalar;
    const Eigen::Index n = a.rows();
    const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
    const MatrixX<Scalar> at = a.transpose();
    const MatrixX<Scalar> op = kron(id, at) + kron(at, id);
    const MatrixX<Scalar> rr = -r;
    const VectorX<Scalar> rhs = Eigen::Map<const VectorX<Scalar>>(rr.data(), n * n);
    const MatrixX<Scalar> sol = solve_linear(op, rhs);
    MatrixX<Scalar> x = Eigen::Map<const MatrixX<Scalar>>(sol.data(), n, n);
    return symmetrize(x);
}

/// True when every eigenvalue of A has real part below zero, decided by the
/// Lyapunov certificate A^T Y + Y A = -I with Y > 0.
template <typename Derived>
bool is_hurwitz(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a.rows();
    try {
        const MatrixX<Scalar> y = solve_lyapunov(a, MatrixX<Scalar>::Identity(n, n));
        if (!y.allFinite()) return false;
        return min_eigenvalue(y) > Scalar(0);
    } catch (const Singular&) {
        return false;
    }
}

}  // namespace etc
