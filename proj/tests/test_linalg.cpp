#include "catch_amalgamated.hpp"

#include <random>

#include "mwi/decompositions.hpp"
#include "mwi/matrix.hpp"
#include "test_support.hpp"

using namespace mwi;
using linalg::Complex;
using linalg::ComplexMatrix;
using test_support::max_abs_diff;
using test_support::orthonormality_defect;
using test_support::random_hermitian;
using test_support::random_matrix;

TEST_CASE("mat_ops basics") {
    SECTION("trace of the identity") {
        CHECK(linalg::trace(ComplexMatrix::identity(4)) == Complex(4.0, 0.0));
    }
    SECTION("adjoint is an involution") {
        std::mt19937_64 gen(11);
        const auto a = random_matrix(gen, 3, 5);
        CHECK(max_abs_diff(linalg::adjoint(linalg::adjoint(a)), a) == 0.0);
    }
    SECTION("Frobenius norm squared equals trace of A^dagger A") {
        std::mt19937_64 gen(12);
        const auto a = random_matrix(gen, 5, 5);
        const double f2 = linalg::frobenius_norm(a) * linalg::frobenius_norm(a);
        const Complex t = linalg::trace(linalg::multiply(linalg::adjoint(a), a));
        CHECK(std::abs(t.imag()) < 1e-12);
        CHECK(f2 == Catch::Approx(t.real()).epsilon(1e-12));
    }
    SECTION("shape mismatch throws") {
        const auto a = ComplexMatrix(2, 3);
        const auto b = ComplexMatrix(2, 3);
        CHECK_THROWS_AS(linalg::multiply(a, b), ShapeError);
        CHECK_THROWS_AS(linalg::trace(a), ShapeError);
    }
    SECTION("non-finite entries are rejected") {
        std::vector<Complex> e = {Complex(1.0, 0.0), Complex(std::nan(""), 0.0)};
        CHECK_THROWS_AS(ComplexMatrix(1, 2, e), ContractViolation);
    }
}

TEST_CASE("tensor_product") {
    SECTION("identity case") {
        const auto i2 = ComplexMatrix::identity(2);
        CHECK(max_abs_diff(linalg::tensor_product(i2, i2), ComplexMatrix::identity(4)) == 0.0);
    }
    SECTION("basis vectors") {
        const auto e0 = ComplexMatrix::column({1.0, 0.0});
        const auto e1 = ComplexMatrix::column({0.0, 1.0});
        const auto out = linalg::tensor_product(e0, e1);
        REQUIRE(out.rows() == 4);
        CHECK(out(0, 0) == Complex(0.0, 0.0));
        CHECK(out(1, 0) == Complex(1.0, 0.0));
        CHECK(out(2, 0) == Complex(0.0, 0.0));
        CHECK(out(3, 0) == Complex(0.0, 0.0));
    }
    SECTION("mixed-product identity (A x B)(x x y) = (Ax) x (By)") {
        std::mt19937_64 gen(21);
        const auto a = random_matrix(gen, 2, 2);
        const auto b = random_matrix(gen, 2, 2);
        const auto x = random_matrix(gen, 2, 1);
        const auto y = random_matrix(gen, 2, 1);
        const auto lhs = linalg::multiply(linalg::tensor_product(a, b), linalg::tensor_product(x, y));
        const auto rhs = linalg::tensor_product(linalg::multiply(a, x), linalg::multiply(b, y));
        CHECK(max_abs_diff(lhs, rhs) < 1e-13);
    }
    SECTION("associativity up to reshaping") {
        std::mt19937_64 gen(22);
        const auto a = random_matrix(gen, 2, 3);
        const auto b = random_matrix(gen, 3, 2);
        const auto c = random_matrix(gen, 2, 2);
        const auto lhs = linalg::tensor_product(linalg::tensor_product(a, b), c);
        const auto rhs = linalg::tensor_product(a, linalg::tensor_product(b, c));
        CHECK(max_abs_diff(lhs, rhs) == 0.0);
    }
    SECTION("capacity error past the maximum dimension") {
        const auto big = ComplexMatrix(3000, 1);
        const auto two = ComplexMatrix(2, 1);
        CHECK_THROWS_AS(linalg::tensor_product(big, two), CapacityError);
    }
}

TEST_CASE("hermitian_eig") {
    SECTION("diagonal spectrum") {
        ComplexMatrix m(2, 2);
        m(0, 0) = 0.7;
        m(1, 1) = 0.3;
        const auto eig = linalg::hermitian_eig(m);
        CHECK(eig.eigenvalues[0] == Catch::Approx(0.7).margin(1e-14));
        CHECK(eig.eigenvalues[1] == Catch::Approx(0.3).margin(1e-14));
    }
    SECTION("Pauli-x spectrum") {
        ComplexMatrix m(2, 2);
        m(0, 1) = 1.0;
        m(1, 0) = 1.0;
        const auto eig = linalg::hermitian_eig(m);
        CHECK(eig.eigenvalues[0] == Catch::Approx(1.0).margin(1e-13));
        CHECK(eig.eigenvalues[1] == Catch::Approx(-1.0).margin(1e-13));
    }
    SECTION("random 8x8 reconstruction") {
        std::mt19937_64 gen(33);
        const auto h = random_hermitian(gen, 8);
        const auto eig = linalg::hermitian_eig(h);
        ComplexMatrix lam(8, 8);
        for (std::size_t i = 0; i < 8; ++i) lam(i, i) = eig.eigenvalues[i];
        const auto rec = linalg::multiply(linalg::multiply(eig.eigenvectors, lam),
                                          linalg::adjoint(eig.eigenvectors));
        CHECK(linalg::frobenius_norm(linalg::subtract(h, rec)) <
              1e-10 * linalg::frobenius_norm(h));
        CHECK(orthonormality_defect(eig.eigenvectors) < 1e-12);
        for (std::size_t i = 1; i < 8; ++i)
            CHECK(eig.eigenvalues[i - 1] >= eig.eigenvalues[i]);
    }
    SECTION("non-Hermitian input is rejected") {
        ComplexMatrix m(2, 2);
        m(0, 1) = 1.0;
        m(1, 0) = 0.5;
        CHECK_THROWS_AS(linalg::hermitian_eig(m), ContractViolation);
    }
    SECTION("density-matrix spectra stay in [0,1] and sum to the trace") {
        std::mt19937_64 gen(34);
        for (int rep = 0; rep < 20; ++rep) {
            const auto a = random_matrix(gen, 6, 6);
            auto rho = linalg::multiply(a, linalg::adjoint(a));
            const double tr = linalg::trace(rho).real();
            rho = linalg::scale(rho, Complex(1.0 / tr, 0.0));
            const auto eig = linalg::hermitian_eig(rho);
            double sum = 0.0;
            for (double l : eig.eigenvalues) {
                CHECK(l >= -1e-10);
                CHECK(l <= 1.0 + 1e-10);
                sum += l;
            }
            CHECK(sum == Catch::Approx(1.0).margin(1e-10));
        }
    }
    SECTION("reproducible output, including degenerate spectra") {
        const auto run = [] {
            ComplexMatrix m(3, 3);
            m(0, 0) = 1.0;
            m(1, 1) = 1.0;
            m(2, 2) = 0.5;
            m(0, 1) = Complex(0.0, 0.25);
            m(1, 0) = Complex(0.0, -0.25);
            return linalg::hermitian_eig(m);
        };
        const auto a = run();
        const auto b = run();
        CHECK(a.eigenvalues == b.eigenvalues);
        CHECK(max_abs_diff(a.eigenvectors, b.eigenvectors) == 0.0);
        // phase fix: the first significant component of every column is
        // real and nonnegative
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) {
                const Complex z = a.eigenvectors(i, j);
                if (std::abs(z) > 1e-12) {
                    CHECK(z.imag() == Catch::Approx(0.0).margin(1e-14));
                    CHECK(z.real() > 0.0);
                    break;
                }
            }
    }
}

TEST_CASE("svd") {
    SECTION("identity has unit singular values") {
        const auto f = linalg::svd(ComplexMatrix::identity(3));
        for (double s : f.singular_values) CHECK(s == Catch::Approx(1.0).margin(1e-13));
    }
    SECTION("rank-1 outer product") {
        std::mt19937_64 gen(41);
        const auto u = random_matrix(gen, 3, 1);
        const auto v = random_matrix(gen, 4, 1);
        const auto m = linalg::multiply(u, linalg::adjoint(v));
        const auto f = linalg::svd(m);
        const double nu = linalg::frobenius_norm(u);
        const double nv = linalg::frobenius_norm(v);
        CHECK(f.singular_values[0] == Catch::Approx(nu * nv).epsilon(1e-12));
        for (std::size_t i = 1; i < f.singular_values.size(); ++i)
            CHECK(f.singular_values[i] == 0.0); // snapped exactly
    }
    SECTION("singular values square to the Gram eigenvalues") {
        std::mt19937_64 gen(42);
        const auto m = random_matrix(gen, 3, 4);
        const auto f = linalg::svd(m);
        const auto gram = linalg::multiply(linalg::adjoint(m), m);
        const auto eig = linalg::hermitian_eig(gram);
        for (std::size_t i = 0; i < f.singular_values.size(); ++i)
            CHECK(f.singular_values[i] * f.singular_values[i] ==
                  Catch::Approx(eig.eigenvalues[i]).margin(1e-10));
    }
    SECTION("reconstruction and orthonormality on random shapes") {
        std::mt19937_64 gen(43);
        const std::pair<std::size_t, std::size_t> shapes[] = {{5, 3}, {3, 5}, {6, 6}, {2, 7}};
        for (auto [r, c] : shapes) {
            const auto m = random_matrix(gen, r, c);
            const auto f = linalg::svd(m);
            CHECK(orthonormality_defect(f.u) < 1e-10);
            CHECK(orthonormality_defect(f.v) < 1e-10);
            for (std::size_t i = 1; i < f.singular_values.size(); ++i)
                CHECK(f.singular_values[i - 1] >= f.singular_values[i]);
            ComplexMatrix sig(f.singular_values.size(), f.singular_values.size());
            for (std::size_t i = 0; i < f.singular_values.size(); ++i)
                sig(i, i) = f.singular_values[i];
            const auto rec =
                linalg::multiply(linalg::multiply(f.u, sig), linalg::adjoint(f.v));
            CHECK(linalg::frobenius_norm(linalg::subtract(m, rec)) <
                  1e-10 * linalg::frobenius_norm(m));
        }
    }
    SECTION("tiny singular values below the cutoff snap to zero") {
        ComplexMatrix m(2, 2);
        m(0, 0) = 1.0;
        m(1, 1) = 1e-14; // below 1e-12 * sigma_max
        const auto f = linalg::svd(m);
        CHECK(f.singular_values[0] == Catch::Approx(1.0));
        CHECK(f.singular_values[1] == 0.0);
        CHECK(orthonormality_defect(f.u) < 1e-12);
    }
}
