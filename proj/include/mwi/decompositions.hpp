// Hermitian eigendecomposition (cyclic Jacobi) and singular value
// decomposition built on top of it.
//
// The Jacobi rotation for a Hermitian pair (p,q) with a_pq = r*e^{i*phi},
// alpha = a_pp, beta = a_qq uses the plane unitary
//
//     U = [ c            -s*e^{i*phi} ]
//         [ s*e^{-i*phi}  c           ]
//
// and zeroes the off-diagonal element when t = s/c solves
// t^2 - 2*tau*t - 1 = 0 with tau = (beta - alpha)/(2r); the smaller-
// magnitude root keeps the rotation angle below pi/4.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mwi/errors.hpp"
#include "mwi/matrix.hpp"

namespace mwi::linalg {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kMaxJacobiSweeps = 100;
// Singular values below this fraction of the largest are snapped to zero,
// which is what makes the Schmidt rank deterministic.
inline constexpr double kSingularValueCutoff = 1e-12;

struct HermitianEigen {
    std::vector<double> eigenvalues; // descending
    ComplexMatrix eigenvectors;      // orthonormal columns, phase-fixed
};

struct SvdResult {
    ComplexMatrix u;                     // rows x k
    std::vector<double> singular_values; // descending, k = min(rows, cols)
    ComplexMatrix v;                     // cols x k
};

namespace detail {

inline double offdiag_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Rotate working matrix `a` (Hermitian) and accumulator `v` in the (p,q)
// plane so that a(p,q) becomes zero.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const Complex phase = apq / r; // e^{i*phi}

    const double alpha = a(p, p).real();
    const double beta = a(q, q).real();
    const double tau = (beta - alpha) / (2.0 * r);
    // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
    const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const std::size_t n = a.rows();
    const Complex u = phase;
    const Complex ubar = std::conj(phase);

    // columns: A <- A * U
    for (std::size_t i = 0; i < n; ++i) {
        const Complex aip = a(i, p);
        const Complex aiq = a(i, q);
        a(i, p) = c * aip + s * ubar * aiq;
        a(i, q) = -s * u * aip + c * aiq;
    }
    // rows: A <- U^dagger * A
    for (std::size_t j = 0; j < n; ++j) {
        const Complex apj = a(p, j);
        const Complex aqj = a(q, j);
        a(p, j) = c * apj + s * u * aqj;
        a(q, j) = -s * ubar * apj + c * aqj;
    }
    // clean up roundoff drift in the rotated 2x2 block
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = Complex(a(p, p).real(), 0.0);
    a(q, q) = Complex(a(q, q).real(), 0.0);

    // accumulate eigenvectors: V <- V * U
    for (std::size_t i = 0; i < n; ++i) {
        const Complex vip = v(i, p);
        const Complex viq = v(i, q);
        v(i, p) = c * vip + s * ubar * viq;
        v(i, q) = -s * u * vip + c * viq;
    }
}

// Multiply each column by a unit phase so its first component of
// non-negligible magnitude is real and positive. Makes the output unique
// for reproducibility (up to degenerate subspaces).
inline void phase_fix_columns(ComplexMatrix& v) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const Complex z = v(i, j);
            const double m = std::abs(z);
            if (m > 1e-12) {
                const Complex w = std::conj(z) / m;
                for (std::size_t k = 0; k < v.rows(); ++k) v(k, j) *= w;
                break;
            }
        }
    }
}

} // namespace detail

// Eigendecomposition of a Hermitian matrix. `tol` is relative: it bounds the
// accepted Hermiticity defect of the input and the residual of the result.
inline HermitianEigen hermitian_eig(const ComplexMatrix& m, double tol = kDefaultTol) {
    if (m.rows() != m.cols()) throw ShapeError("hermitian_eig: matrix must be square");
    const std::size_t n = m.rows();

    const double base_norm = frobenius_norm(m);
    {
        double defect = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                defect += std::norm(m(i, j) - std::conj(m(j, i)));
        if (std::sqrt(defect) > tol * std::max(base_norm, 1e-300))
            throw ContractViolation("hermitian_eig: input is not Hermitian within tolerance");
    }

    // Work on the Hermitian average so tiny asymmetries cannot bias sweeps.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    ComplexMatrix v = ComplexMatrix::identity(n);

    if (n > 1) {
        const double stop = 1e-14 * std::max(base_norm, 1e-300);
        const double skip = stop / static_cast<double>(n);
        bool converged = false;
        for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
            if (detail::offdiag_norm(a) <= stop) {
                converged = true;
                break;
            }
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                    if (std::abs(a(p, q)) > skip) detail::jacobi_rotate(a, v, p, q);
        }
        if (!converged && detail::offdiag_norm(a) > tol * std::max(base_norm, 1e-300))
            throw NumericError("hermitian_eig: Jacobi sweeps did not converge");
    }

    // stable sort by eigenvalue, descending
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

    HermitianEigen out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    detail::phase_fix_columns(out.eigenvectors);
    return out;
}

// SVD of a general matrix, computed as the Hermitian eigendecomposition of
// m^dagger * m followed by back-substitution for U. Economy form:
// k = min(rows, cols) columns in both U and V.
inline SvdResult svd(const ComplexMatrix& m, double tol = kDefaultTol) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const std::size_t k = std::min(rows, cols);

    const ComplexMatrix gram = multiply(adjoint(m), m); // cols x cols
    const HermitianEigen eig = hermitian_eig(gram, tol);

    SvdResult out;
    out.singular_values.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        out.singular_values[j] = std::sqrt(std::max(eig.eigenvalues[j], 0.0));
    const double sigma_max = out.singular_values.empty() ? 0.0 : out.singular_values[0];
    for (auto& s : out.singular_values)
        if (s < kSingularValueCutoff * sigma_max) s = 0.0;

    out.v = ComplexMatrix(cols, k);
    for (std::size_t j = 0; j < k; ++j) out.v.set_col(j, eig.eigenvectors.col(j));

    out.u = ComplexMatrix(rows, k);
    for (std::size_t j = 0; j < k; ++j) {
        const double sj = out.singular_values[j];
        std::vector<Complex> uj(rows, Complex(0.0, 0.0));
        if (sj > 0.0) {
            for (std::size_t i = 0; i < rows; ++i) {
                Complex acc = 0.0;
                for (std::size_t l = 0; l < cols; ++l) acc += m(i, l) * out.v(l, j);
                uj[i] = acc / sj;
            }
        }
        // null-space columns (and any column degraded by roundoff) are
        // completed from canonical basis vectors
        for (std::size_t attempt = 0; attempt <= rows; ++attempt) {
            for (std::size_t prev = 0; prev < j; ++prev) {
                Complex c = 0.0;
                for (std::size_t i = 0; i < rows; ++i) c += std::conj(out.u(i, prev)) * uj[i];
                for (std::size_t i = 0; i < rows; ++i) uj[i] -= c * out.u(i, prev);
            }
            double nrm = 0.0;
            for (const auto& z : uj) nrm += std::norm(z);
            nrm = std::sqrt(nrm);
            if (nrm > 1e-6) {
                for (auto& z : uj) z /= nrm;
                break;
            }
            if (attempt == rows) throw NumericError("svd: could not complete orthonormal U");
            std::fill(uj.begin(), uj.end(), Complex(0.0, 0.0));
            uj[attempt] = 1.0;
        }
        out.u.set_col(j, uj);
    }
    detail::phase_fix_columns(out.u);

    // keep U*Sigma*V^dagger consistent with the phase fix applied to U:
    // any phase taken out of u_j must be pushed into v_j
    for (std::size_t j = 0; j < k; ++j) {
        if (out.singular_values[j] == 0.0) continue;
        // recompute the column phase relation: v_j <- v_j * phase where
        // phase = <u_j, m v_j> / |<u_j, m v_j>| restores m v_j = sigma u_j
        Complex proj = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            Complex mv = 0.0;
            for (std::size_t l = 0; l < cols; ++l) mv += m(i, l) * out.v(l, j);
            proj += std::conj(out.u(i, j)) * mv;
        }
        const double mag = std::abs(proj);
        if (mag > 0.0) {
            const Complex w = std::conj(proj) / mag;
            for (std::size_t l = 0; l < cols; ++l) out.v(l, j) *= w;
        }
    }
    return out;
}

} // namespace mwi::linalg
