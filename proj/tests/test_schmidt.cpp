#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "mwi/json_io.hpp"
#include "mwi/schmidt.hpp"
#include "test_support.hpp"

using namespace mwi;
using linalg::Complex;
using linalg::ComplexMatrix;
using test_support::max_abs_diff;
using test_support::random_unit_vector;
using test_support::random_unitary;

namespace {

const double kLn2 = 0.6931471805599453;
// -0.7 ln 0.7 - 0.3 ln 0.3
const double kEntropy73 = 0.6108643020548935;

schmidt::BipartiteState random_state(std::mt19937_64& gen, std::size_t d1, std::size_t d2) {
    return schmidt::make_bipartite(random_unit_vector(gen, d1 * d2), d1, d2);
}

std::vector<double> density_spectrum(const schmidt::DensityMatrix& rho) {
    return linalg::hermitian_eig(rho.matrix()).eigenvalues;
}

} // namespace

TEST_CASE("make_bipartite") {
    SECTION("basis product state") {
        const auto s = schmidt::make_bipartite({1.0, 0.0, 0.0, 0.0}, 2, 2);
        CHECK(s.coeffs()(0, 0) == Complex(1.0, 0.0));
        CHECK(s.coeffs()(1, 1) == Complex(0.0, 0.0));
    }
    SECTION("Bell state reshapes to I/sqrt(2)") {
        const double r = 1.0 / std::sqrt(2.0);
        const auto s = schmidt::make_bipartite({r, 0.0, 0.0, r}, 2, 2);
        CHECK(std::abs(s.coeffs()(0, 0).real() - r) < 1e-15);
        CHECK(std::abs(s.coeffs()(1, 1).real() - r) < 1e-15);
    }
    SECTION("unnormalized input is normalized") {
        const auto s = schmidt::make_bipartite({2.0, 0.0, 0.0, 0.0}, 2, 2);
        CHECK(s.coeffs()(0, 0) == Complex(1.0, 0.0));
    }
    SECTION("zero vector and shape errors") {
        CHECK_THROWS_AS(schmidt::make_bipartite({0.0, 0.0, 0.0, 0.0}, 2, 2), DegenerateInput);
        CHECK_THROWS_AS(schmidt::make_bipartite({1.0, 0.0}, 2, 2), ShapeError);
    }
}

TEST_CASE("reduced_density") {
    SECTION("product state gives a pure reduced matrix") {
        const auto s = schmidt::make_bipartite({1.0, 0.0, 0.0, 0.0}, 2, 2);
        const auto rho = schmidt::reduced_density(s, schmidt::Side::I);
        CHECK(std::abs(rho.matrix()(0, 0) - Complex(1.0, 0.0)) < 1e-15);
        CHECK(std::abs(rho.matrix()(1, 1)) < 1e-15);
        const auto rho2 = linalg::multiply(rho.matrix(), rho.matrix());
        CHECK(max_abs_diff(rho2, rho.matrix()) < 1e-14); // rho^2 = rho
    }
    SECTION("Bell state reduces to the maximally mixed matrix") {
        const double r = 1.0 / std::sqrt(2.0);
        const auto s = schmidt::make_bipartite({r, 0.0, 0.0, r}, 2, 2);
        const auto rho = schmidt::reduced_density(s, schmidt::Side::I);
        // direct 2x2 computation: c c^dagger with c = I/sqrt(2)
        CHECK(rho.matrix()(0, 0).real() == Catch::Approx(0.5).margin(1e-14));
        CHECK(rho.matrix()(1, 1).real() == Catch::Approx(0.5).margin(1e-14));
        CHECK(std::abs(rho.matrix()(0, 1)) < 1e-15);
    }
    SECTION("both sides carry the same nonzero spectrum") {
        std::mt19937_64 gen(101);
        const auto s = random_state(gen, 3, 4);
        const auto sI = density_spectrum(schmidt::reduced_density(s, schmidt::Side::I));
        const auto sII = density_spectrum(schmidt::reduced_density(s, schmidt::Side::II));
        for (std::size_t i = 0; i < sI.size(); ++i)
            CHECK(sI[i] == Catch::Approx(sII[i]).margin(1e-10));
        // the extra dimension of side II only adds a zero eigenvalue
        CHECK(std::abs(sII[3]) < 1e-10);
    }
}

TEST_CASE("schmidt_decompose") {
    SECTION("product state has rank 1") {
        const auto s = schmidt::make_bipartite({1.0, 0.0, 0.0, 0.0}, 2, 2);
        const auto dec = schmidt::schmidt_decompose(s);
        CHECK(dec.rank == 1);
        CHECK(dec.lambdas[0] == Catch::Approx(1.0).margin(1e-13));
    }
    SECTION("Bell state splits evenly") {
        const double r = 1.0 / std::sqrt(2.0);
        const auto s = schmidt::make_bipartite({r, 0.0, 0.0, r}, 2, 2);
        const auto dec = schmidt::schmidt_decompose(s);
        CHECK(dec.rank == 2);
        CHECK(dec.lambdas[0] == Catch::Approx(0.5).margin(1e-13));
        CHECK(dec.lambdas[1] == Catch::Approx(0.5).margin(1e-13));
    }
    SECTION("diagonal coefficients give the computational bases") {
        const auto s =
            schmidt::make_bipartite({std::sqrt(0.7), 0.0, 0.0, std::sqrt(0.3)}, 2, 2);
        const auto dec = schmidt::schmidt_decompose(s);
        CHECK(dec.lambdas[0] == Catch::Approx(0.7).margin(1e-13));
        CHECK(dec.lambdas[1] == Catch::Approx(0.3).margin(1e-13));
        CHECK(max_abs_diff(dec.left, ComplexMatrix::identity(2)) < 1e-13);
        CHECK(max_abs_diff(dec.right, ComplexMatrix::identity(2)) < 1e-13);
    }
    SECTION("reconstruction from the bi-orthogonal pair") {
        std::mt19937_64 gen(103);
        for (int rep = 0; rep < 10; ++rep) {
            const auto s = random_state(gen, 4, 3);
            const auto dec = schmidt::schmidt_decompose(s);
            ComplexMatrix rec(4, 3);
            for (std::size_t n = 0; n < dec.lambdas.size(); ++n) {
                const double w = std::sqrt(dec.lambdas[n]);
                for (std::size_t i = 0; i < 4; ++i)
                    for (std::size_t j = 0; j < 3; ++j)
                        rec(i, j) += w * dec.left(i, n) * dec.right(j, n);
            }
            CHECK(max_abs_diff(rec, s.coeffs()) < 1e-9);
            double sum = 0.0;
            for (double l : dec.lambdas) {
                CHECK(l >= 0.0);
                sum += l;
            }
            CHECK(sum == Catch::Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("entanglement_entropy") {
    SECTION("product state") {
        const auto s = schmidt::make_bipartite({1.0, 0.0, 0.0, 0.0}, 2, 2);
        CHECK(schmidt::entanglement_entropy(s) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("Bell state") {
        const double r = 1.0 / std::sqrt(2.0);
        const auto s = schmidt::make_bipartite({r, 0.0, 0.0, r}, 2, 2);
        CHECK(schmidt::entanglement_entropy(s) == Catch::Approx(kLn2).margin(1e-12));
    }
    SECTION("0.7/0.3 spectrum") {
        const auto s =
            schmidt::make_bipartite({std::sqrt(0.7), 0.0, 0.0, std::sqrt(0.3)}, 2, 2);
        CHECK(schmidt::entanglement_entropy(s) == Catch::Approx(kEntropy73).margin(1e-12));
    }
    SECTION("bounded by log of the smaller dimension") {
        std::mt19937_64 gen(104);
        for (int rep = 0; rep < 10; ++rep) {
            const auto s = random_state(gen, 2, 5);
            const double e = schmidt::entanglement_entropy(s);
            CHECK(e >= 0.0);
            CHECK(e <= std::log(2.0) + 1e-12);
        }
    }
}

TEST_CASE("is_factorized") {
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(schmidt::is_factorized(schmidt::make_bipartite({1.0, 0.0, 0.0, 0.0}, 2, 2), 1e-12));
    CHECK_FALSE(schmidt::is_factorized(schmidt::make_bipartite({r, 0.0, 0.0, r}, 2, 2), 1e-12));

    SECTION("threshold semantics at lambda_2 = 1e-14") {
        const auto s = schmidt::make_bipartite(
            {std::sqrt(1.0 - 1e-14), 0.0, 0.0, std::sqrt(1e-14)}, 2, 2);
        CHECK(schmidt::is_factorized(s, 1e-12));
        CHECK_FALSE(schmidt::is_factorized(s, 1e-16));
    }
}

TEST_CASE("apply_measurement") {
    SECTION("eigenstate input stays factorized") {
        const auto m = schmidt::MeasurementModel::computational(2, 2);
        const auto s = schmidt::apply_measurement(m, {1.0, 0.0});
        CHECK(schmidt::is_factorized(s, 1e-12));
    }
    SECTION("spectrum equals |c_i|^2") {
        const auto m = schmidt::MeasurementModel::computational(2, 2);
        const auto s = schmidt::apply_measurement(m, {std::sqrt(0.3), std::sqrt(0.7)});
        const auto dec = schmidt::schmidt_decompose(s);
        CHECK(dec.lambdas[0] == Catch::Approx(0.7).margin(1e-12));
        CHECK(dec.lambdas[1] == Catch::Approx(0.3).margin(1e-12));
    }
    SECTION("uniform three-outcome split has entropy ln 3") {
        const auto m = schmidt::MeasurementModel::computational(3, 3);
        const double a = 1.0 / std::sqrt(3.0);
        const auto s = schmidt::apply_measurement(m, {a, a, a});
        CHECK(schmidt::entanglement_entropy(s) ==
              Catch::Approx(std::log(3.0)).margin(1e-12));
    }
    SECTION("device larger than the object") {
        const auto m = schmidt::MeasurementModel::computational(2, 5);
        const auto s = schmidt::apply_measurement(m, {std::sqrt(0.4), std::sqrt(0.6)});
        CHECK(s.d1() == 5);
        CHECK(s.d2() == 2);
        const auto dec = schmidt::schmidt_decompose(s);
        CHECK(dec.lambdas[0] == Catch::Approx(0.6).margin(1e-12));
        CHECK(dec.lambdas[1] == Catch::Approx(0.4).margin(1e-12));
    }
    SECTION("zero amplitudes are rejected") {
        const auto m = schmidt::MeasurementModel::computational(2, 2);
        CHECK_THROWS_AS(schmidt::apply_measurement(m, {0.0, 0.0}), DegenerateInput);
    }
    SECTION("non-orthonormal pointer states are rejected") {
        ComplexMatrix bad(2, 2);
        bad(0, 0) = 1.0;
        bad(0, 1) = 1.0;
        CHECK_THROWS_AS(schmidt::MeasurementModel(ComplexMatrix::identity(2), bad, 0),
                        ContractViolation);
    }
    SECTION("conditional states are product states") {
        std::mt19937_64 gen(105);
        const auto u = random_unitary(gen, 3);
        const auto w = random_unitary(gen, 4);
        const auto m = schmidt::MeasurementModel(u, w, 0);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(schmidt::is_factorized(schmidt::conditional_state(m, i), 1e-12));
    }
}

TEST_CASE("schmidt invariants on random states") {
    std::mt19937_64 gen(106);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t d1 = 2 + gen() % 4;
        const std::size_t d2 = 2 + gen() % 4;
        const auto s = random_state(gen, d1, d2);

        SECTION("spectra coincidence and entropy symmetry, rep " + std::to_string(rep)) {
            const auto sI = density_spectrum(schmidt::reduced_density(s, schmidt::Side::I));
            const auto sII = density_spectrum(schmidt::reduced_density(s, schmidt::Side::II));
            const std::size_t k = std::min(sI.size(), sII.size());
            for (std::size_t i = 0; i < k; ++i)
                CHECK(sI[i] == Catch::Approx(sII[i]).margin(1e-10));
            const double eI = schmidt::spectrum_entropy(sI);
            const double eII = schmidt::spectrum_entropy(sII);
            CHECK(eI == Catch::Approx(eII).margin(1e-9));
        }
    }

    SECTION("local unitaries leave the spectrum and entropy unchanged") {
        for (int rep = 0; rep < 10; ++rep) {
            const auto s = random_state(gen, 3, 3);
            const auto uI = random_unitary(gen, 3);
            const auto uII = random_unitary(gen, 3);
            const auto rotated = schmidt::BipartiteState(
                3, 3,
                linalg::multiply(linalg::multiply(uI, s.coeffs()), linalg::transpose(uII)));
            const auto a = schmidt::schmidt_decompose(s);
            const auto b = schmidt::schmidt_decompose(rotated);
            for (std::size_t i = 0; i < a.lambdas.size(); ++i)
                CHECK(a.lambdas[i] == Catch::Approx(b.lambdas[i]).margin(1e-9));
            CHECK(schmidt::entanglement_entropy(s) ==
                  Catch::Approx(schmidt::entanglement_entropy(rotated)).margin(1e-9));
        }
    }

    SECTION("measurement spectrum recovery") {
        for (int rep = 0; rep < 10; ++rep) {
            const auto m = schmidt::MeasurementModel::computational(4, 4);
            auto amps = random_unit_vector(gen, 4);
            const auto s = schmidt::apply_measurement(m, amps);
            auto dec = schmidt::schmidt_decompose(s);
            std::vector<double> expect(4);
            for (std::size_t i = 0; i < 4; ++i) expect[i] = std::norm(amps[i]);
            std::sort(expect.rbegin(), expect.rend());
            for (std::size_t i = 0; i < 4; ++i)
                CHECK(dec.lambdas[i] == Catch::Approx(expect[i]).margin(1e-10));
        }
    }

    SECTION("factorization agrees with purity away from the threshold") {
        const auto m = schmidt::MeasurementModel::computational(2, 2);
        const double tol = 1e-6;
        for (double delta : {1e-14, 1e-10, 1e-3, 0.3}) {
            const auto s = schmidt::apply_measurement(
                m, {std::sqrt(1.0 - delta), std::sqrt(delta)});
            const auto rho = schmidt::reduced_density(s, schmidt::Side::I);
            const double purity =
                linalg::trace(linalg::multiply(rho.matrix(), rho.matrix())).real();
            const bool fact = schmidt::is_factorized(s, tol);
            const bool pure = purity >= 1.0 - 2.0 * tol;
            CHECK(fact == pure);
        }
    }
}

TEST_CASE("state json round trip") {
    std::mt19937_64 gen(107);
    const auto s = random_state(gen, 3, 2);
    const auto j = io::state_to_json(s);
    CHECK(j["d1"] == 3);
    CHECK(j["d2"] == 2);
    const auto back = io::state_from_json(j);
    CHECK(max_abs_diff(back.coeffs(), s.coeffs()) == 0.0); // doubles round-trip exactly

    CHECK_THROWS_AS(io::state_from_json(nlohmann::json::array()), ContractViolation);
}
