// Shared helpers for the test suites: seeded random matrices and distance
// measures.
#pragma once

#include <complex>
#include <random>
#include <vector>

#include "mwi/matrix.hpp"
#include "mwi/rng.hpp"

namespace test_support {

using mwi::linalg::Complex;
using mwi::linalg::ComplexMatrix;

inline ComplexMatrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Complex> e(rows * cols);
    for (auto& z : e) z = Complex(nd(gen), nd(gen));
    return ComplexMatrix(rows, cols, std::move(e));
}

inline ComplexMatrix random_hermitian(std::mt19937_64& gen, std::size_t n) {
    const ComplexMatrix a = random_matrix(gen, n, n);
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return h;
}

inline ComplexMatrix random_unitary(std::mt19937_64& gen, std::size_t n) {
    const auto basis = mwi::rng::haar_basis(gen, n);
    ComplexMatrix u(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) u(i, j) = basis[j][i];
    return u;
}

inline std::vector<Complex> random_unit_vector(std::mt19937_64& gen, std::size_t dim) {
    return mwi::rng::haar_unit_vector(gen, dim);
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

// || M^dagger M - I ||_max over the given matrix's columns.
inline double orthonormality_defect(const ComplexMatrix& m) {
    double worst = 0.0;
    for (std::size_t a = 0; a < m.cols(); ++a)
        for (std::size_t b = 0; b < m.cols(); ++b) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) dot += std::conj(m(i, a)) * m(i, b);
            const Complex want = (a == b) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            worst = std::max(worst, std::abs(dot - want));
        }
    return worst;
}

} // namespace test_support
