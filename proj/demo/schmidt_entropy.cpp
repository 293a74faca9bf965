// Walkthrough: a binary measurement-like interaction turns a product state
// into an entangled one; the Schmidt spectrum carries the Born weights and
// the entanglement entropy measures the branching.

#include <cmath>
#include <cstdio>

#include "mwi/schmidt.hpp"

using namespace mwi;

int main() {
    const auto model = schmidt::MeasurementModel::computational(2, 2);

    std::printf("%-8s %-12s %-12s %-10s\n", "c0^2", "lambda_max", "lambda_min", "entropy");
    for (double w = 0.5; w <= 1.0 + 1e-12; w += 0.1) {
        const std::vector<schmidt::Complex> amps = {std::sqrt(w), std::sqrt(1.0 - w)};
        const auto state = schmidt::apply_measurement(model, amps);
        const auto dec = schmidt::schmidt_decompose(state);
        std::printf("%-8.2f %-12.6f %-12.6f %-10.6f\n", w, dec.lambdas[0],
                    dec.lambdas.size() > 1 ? dec.lambdas[1] : 0.0,
                    schmidt::spectrum_entropy(dec.lambdas));
    }

    const std::vector<schmidt::Complex> bell = {1.0, 0.0, 0.0, 1.0};
    const auto state = schmidt::make_bipartite(bell, 2, 2);
    std::printf("\nBell state entropy: %.12f (ln 2 = %.12f)\n",
                schmidt::entanglement_entropy(state), std::log(2.0));
    return 0;
}
