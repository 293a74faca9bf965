// Bipartite states, reduced density matrices, the bi-orthogonal (Schmidt)
// preferred basis, entanglement entropy, and the measurement-like
// correlating interaction that drives branching.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mwi/decompositions.hpp"
#include "mwi/errors.hpp"
#include "mwi/matrix.hpp"

namespace mwi::schmidt {

using linalg::Complex;
using linalg::ComplexMatrix;

// Schmidt weights below this absolute threshold do not count towards the
// rank; separates numeric noise from genuine branches.
inline constexpr double kRankThreshold = 1e-12;

// Normalized pure state of system I (x) II held as its coefficient matrix:
// entry (i, j) is the amplitude on |i>_I |j>_II.
class BipartiteState {
public:
    BipartiteState(std::size_t d1, std::size_t d2, ComplexMatrix coeffs)
        : d1_(d1), d2_(d2), coeffs_(std::move(coeffs)) {
        if (coeffs_.rows() != d1_ || coeffs_.cols() != d2_)
            throw ShapeError("bipartite state: coefficient matrix shape mismatch");
        const double n = linalg::frobenius_norm(coeffs_);
        if (n < 1e-154) throw DegenerateInput("bipartite state: zero vector");
        if (n != 1.0) coeffs_ = linalg::scale(coeffs_, Complex(1.0 / n, 0.0));
    }

    std::size_t d1() const { return d1_; }
    std::size_t d2() const { return d2_; }
    const ComplexMatrix& coeffs() const { return coeffs_; }

private:
    std::size_t d1_;
    std::size_t d2_;
    ComplexMatrix coeffs_;
};

// Reshape a flat amplitude vector (index = i*d2 + j) into a normalized
// bipartite state.
inline BipartiteState make_bipartite(const std::vector<Complex>& vec, std::size_t d1, std::size_t d2) {
    if (vec.size() != d1 * d2) throw ShapeError("make_bipartite: length must equal d1*d2");
    return BipartiteState(d1, d2, ComplexMatrix(d1, d2, vec));
}

enum class Side { I, II };

class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols()) throw ShapeError("density matrix must be square");
        double defect = 0.0;
        for (std::size_t i = 0; i < matrix_.rows(); ++i)
            for (std::size_t j = 0; j < matrix_.cols(); ++j)
                defect += std::norm(matrix_(i, j) - std::conj(matrix_(j, i)));
        if (std::sqrt(defect) > 1e-10 * std::max(linalg::frobenius_norm(matrix_), 1e-300))
            throw ContractViolation("density matrix: not Hermitian");
        if (std::abs(linalg::trace(matrix_).real() - 1.0) > 1e-10 ||
            std::abs(linalg::trace(matrix_).imag()) > 1e-10)
            throw ContractViolation("density matrix: trace must be 1");
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t dim() const { return matrix_.rows(); }

private:
    ComplexMatrix matrix_;
};

// rho_I = c c^dagger,  rho_II = c^T conj(c).
inline DensityMatrix reduced_density(const BipartiteState& s, Side side) {
    const ComplexMatrix& c = s.coeffs();
    if (side == Side::I) return DensityMatrix(linalg::multiply(c, linalg::adjoint(c)));
    return DensityMatrix(linalg::multiply(linalg::transpose(c), linalg::conjugate(c)));
}

// lambda_n spectrum plus the paired bi-orthogonal bases: the coefficient
// matrix reconstructs as sum_n sqrt(lambda_n) * left_n (x) right_n.
struct SchmidtDecomposition {
    std::vector<double> lambdas; // descending, sum 1
    ComplexMatrix left;          // columns |phi_n>, orthonormal in C^d1
    ComplexMatrix right;         // columns |chi_n>, orthonormal in C^d2
    std::size_t rank = 0;        // count of lambdas above kRankThreshold
};

inline SchmidtDecomposition schmidt_decompose(const BipartiteState& s) {
    const linalg::SvdResult f = linalg::svd(s.coeffs());
    SchmidtDecomposition out;
    out.lambdas.resize(f.singular_values.size());
    for (std::size_t i = 0; i < f.singular_values.size(); ++i)
        out.lambdas[i] = f.singular_values[i] * f.singular_values[i];
    out.left = f.u;
    out.right = linalg::conjugate(f.v); // coeffs = sum sigma_n u_n (conj v_n)^T
    out.rank = 0;
    for (double l : out.lambdas)
        if (l > kRankThreshold) ++out.rank;
    return out;
}

// Entropy of a probability spectrum, in nats. Entries <= 0 are skipped.
inline double spectrum_entropy(std::span<const double> lambdas) {
    double s = 0.0;
    for (double l : lambdas)
        if (l > 0.0) s -= l * std::log(l);
    return s;
}

inline double entanglement_entropy(const BipartiteState& s) {
    const auto dec = schmidt_decompose(s);
    return spectrum_entropy(dec.lambdas);
}

// True iff the Schmidt rank is 1 within `tol` on the second-largest weight.
inline bool is_factorized(const BipartiteState& s, double tol = kRankThreshold) {
    const auto dec = schmidt_decompose(s);
    return dec.lambdas.size() < 2 || dec.lambdas[1] <= tol;
}

namespace detail {

inline void require_orthonormal_columns(const ComplexMatrix& m, const char* what) {
    for (std::size_t a = 0; a < m.cols(); ++a)
        for (std::size_t b = a; b < m.cols(); ++b) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) dot += std::conj(m(i, a)) * m(i, b);
            const Complex want = (a == b) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            if (std::abs(dot - want) > 1e-10)
                throw ContractViolation(std::string(what) + ": columns are not orthonormal");
        }
}

} // namespace detail

// The measurement-like interaction of a device with pointer states |Phi>_i
// and an object with eigenstates |Psi>_i. Extra pointer states beyond the
// object dimension are allowed and simply unused.
class MeasurementModel {
public:
    MeasurementModel(ComplexMatrix object_basis, ComplexMatrix pointer_states,
                     std::vector<Complex> device_init)
        : object_basis_(std::move(object_basis)),
          pointer_states_(std::move(pointer_states)),
          device_init_(std::move(device_init)) {
        if (pointer_states_.rows() < object_basis_.rows())
            throw ShapeError("measurement model: device dimension must be >= object dimension");
        if (pointer_states_.cols() < object_basis_.cols())
            throw ShapeError("measurement model: need one pointer state per outcome");
        detail::require_orthonormal_columns(object_basis_, "object basis");
        detail::require_orthonormal_columns(pointer_states_, "pointer states");
        if (device_init_.size() != pointer_states_.rows())
            throw ShapeError("measurement model: device init has wrong dimension");
        double n = 0.0;
        for (const auto& z : device_init_) n += std::norm(z);
        if (std::abs(std::sqrt(n) - 1.0) > 1e-10)
            throw ContractViolation("measurement model: device init is not normalized");
    }

    MeasurementModel(ComplexMatrix object_basis, ComplexMatrix pointer_states,
                     std::size_t device_init_index = 0)
        : MeasurementModel(std::move(object_basis), std::move(pointer_states),
                           unit_vector(pointer_states, device_init_index)) {}

    std::size_t outcomes() const { return object_basis_.cols(); }
    std::size_t object_dim() const { return object_basis_.rows(); }
    std::size_t device_dim() const { return pointer_states_.rows(); }
    const ComplexMatrix& object_basis() const { return object_basis_; }
    const ComplexMatrix& pointer_states() const { return pointer_states_; }
    const std::vector<Complex>& device_init() const { return device_init_; }

    // Standard model on computational bases: d_obj outcomes, device of
    // dimension d_dev >= d_obj, device initially in pointer state 0.
    static MeasurementModel computational(std::size_t d_obj, std::size_t d_dev) {
        return MeasurementModel(ComplexMatrix::identity(d_obj),
                                ComplexMatrix::identity(d_dev), 0);
    }

private:
    static std::vector<Complex> unit_vector(const ComplexMatrix& pointer_states, std::size_t idx) {
        if (idx >= pointer_states.cols())
            throw ShapeError("measurement model: device init index out of range");
        return pointer_states.col(idx);
    }

    ComplexMatrix object_basis_;
    ComplexMatrix pointer_states_;
    std::vector<Complex> device_init_;
};

// U |Phi>_0 |Psi> = sum_i c_i |Phi>_i |Psi>_i, returned as a bipartite state
// with the device as side I and the object as side II. The Schmidt spectrum
// of the output is (|c_i|^2) up to ordering.
inline BipartiteState apply_measurement(const MeasurementModel& m,
                                        const std::vector<Complex>& object_amplitudes) {
    if (object_amplitudes.size() != m.outcomes())
        throw ShapeError("apply_measurement: amplitude count must match outcomes");
    double n = 0.0;
    for (const auto& z : object_amplitudes) n += std::norm(z);
    n = std::sqrt(n);
    if (n < 1e-154) throw DegenerateInput("apply_measurement: zero amplitude vector");

    const std::size_t dd = m.device_dim();
    const std::size_t dob = m.object_dim();
    ComplexMatrix coeffs(dd, dob);
    for (std::size_t i = 0; i < m.outcomes(); ++i) {
        const Complex ci = object_amplitudes[i] / n;
        if (ci == Complex(0.0, 0.0)) continue;
        for (std::size_t a = 0; a < dd; ++a) {
            const Complex phi = m.pointer_states()(a, i);
            if (phi == Complex(0.0, 0.0)) continue;
            for (std::size_t b = 0; b < dob; ++b)
                coeffs(a, b) += ci * phi * m.object_basis()(b, i);
        }
    }
    return BipartiteState(dd, dob, std::move(coeffs));
}

// Product state |Phi>_i (x) |Psi>_i of one post-measurement branch.
inline BipartiteState conditional_state(const MeasurementModel& m, std::size_t outcome) {
    if (outcome >= m.outcomes()) throw ShapeError("conditional_state: outcome out of range");
    const std::size_t dd = m.device_dim();
    const std::size_t dob = m.object_dim();
    ComplexMatrix coeffs(dd, dob);
    for (std::size_t a = 0; a < dd; ++a)
        for (std::size_t b = 0; b < dob; ++b)
            coeffs(a, b) = m.pointer_states()(a, outcome) * m.object_basis()(b, outcome);
    return BipartiteState(dd, dob, std::move(coeffs));
}

} // namespace mwi::schmidt
