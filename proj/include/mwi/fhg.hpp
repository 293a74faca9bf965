// Finkelstein-Hartle-Graham frequency-operator computations: the exact
// squared norm of (F_N^k - p_k) on the N-fold product state by three
// routes (explicit string enumeration, binomial collapse, closed form),
// the Born-vs-count comparison table, and the Graham averaging check.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "mwi/errors.hpp"
#include "mwi/numeric.hpp"
#include "mwi/rng.hpp"

namespace mwi::fhg {

using Complex = std::complex<double>;

// Enumeration budget for the explicit route: M^N outcome strings.
inline constexpr std::uint64_t kMaxOutcomeStrings = std::uint64_t(1) << 20;
inline constexpr std::uint64_t kMaxMultinomialCopies = 1000000;
inline constexpr unsigned kMaxGrahamTrials = 64;
// Above this many trials the table masses switch to log-space evaluation.
inline constexpr unsigned kGrahamDirectTrials = 30;

// Amplitudes C_i of the measured state, the number of identical copies N,
// and the outcome index k whose relative frequency is tracked.
struct FrequencySpec {
    std::vector<Complex> amplitudes;
    std::uint64_t copies = 1;
    std::size_t outcome = 0;

    FrequencySpec(std::vector<Complex> amps, std::uint64_t n, std::size_t k)
        : amplitudes(std::move(amps)), copies(n), outcome(k) {
        if (amplitudes.empty()) throw ShapeError("frequency spec: empty amplitude list");
        if (copies < 1) throw ContractViolation("frequency spec: copies must be >= 1");
        if (outcome >= amplitudes.size())
            throw ContractViolation("frequency spec: outcome index out of range");
        double s = 0.0;
        for (const auto& c : amplitudes) s += std::norm(c);
        if (std::abs(s - 1.0) > 1e-10)
            throw ContractViolation("frequency spec: amplitudes are not normalized");
    }

    double p_k() const { return std::norm(amplitudes[outcome]); }
};

// || (F_N^k - p_k) |Psi>^(x)N ||^2 by exhaustive enumeration of the M^N
// outcome strings. Probabilities are built up incrementally along the
// string, so memory stays O(N).
inline double freq_deviation_explicit(const FrequencySpec& spec) {
    const std::size_t m = spec.amplitudes.size();
    const std::uint64_t n = spec.copies;
    {
        double strings = std::pow(static_cast<double>(m), static_cast<double>(n));
        if (strings > static_cast<double>(kMaxOutcomeStrings))
            throw CapacityError("freq_deviation_explicit: M^N exceeds the enumeration budget");
    }
    std::vector<double> probs(m);
    for (std::size_t i = 0; i < m; ++i) probs[i] = std::norm(spec.amplitudes[i]);
    const double pk = probs[spec.outcome];
    const double inv_n = 1.0 / static_cast<double>(n);

    KahanSum total;
    // depth-first walk over outcome strings; prefix probability and the
    // running count of k-outcomes are carried down the stack
    struct Frame {
        std::size_t next = 0;
        double prod = 1.0;
        std::uint64_t hits = 0;
    };
    std::vector<Frame> stack(n + 1);
    stack[0] = {0, 1.0, 0};
    std::size_t depth = 0;
    for (;;) {
        if (depth == n) {
            const double d = static_cast<double>(stack[depth].hits) * inv_n - pk;
            total.add(d * d * stack[depth].prod);
            --depth;
            continue;
        }
        Frame& f = stack[depth];
        if (f.next == m) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        const std::size_t i = f.next++;
        stack[depth + 1].next = 0;
        stack[depth + 1].prod = f.prod * probs[i];
        stack[depth + 1].hits = f.hits + (i == spec.outcome ? 1 : 0);
        ++depth;
    }
    return total.value();
}

// Closed form of Eq. of the theorem: p_k (1 - p_k) / N.
inline double freq_deviation_closed(double p_k, std::uint64_t n) {
    if (!(p_k >= 0.0 && p_k <= 1.0))
        throw ContractViolation("freq_deviation_closed: p_k must be in [0,1]");
    if (n < 1) throw ContractViolation("freq_deviation_closed: N must be >= 1");
    return p_k * (1.0 - p_k) / static_cast<double>(n);
}

// Binomial-collapsed route: sum_m (m/N - p)^2 Binom(N, m) p^m (1-p)^(N-m).
// Weights are generated by the multiplicative recurrence outward from the
// mode and normalized by their own sum, so no anchor value (and no lgamma
// accuracy) enters the result.
inline double freq_deviation_multinomial(double p, std::uint64_t n) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ContractViolation("freq_deviation_multinomial: p must be in [0,1]");
    if (n < 1) throw ContractViolation("freq_deviation_multinomial: N must be >= 1");
    if (n > kMaxMultinomialCopies)
        throw CapacityError("freq_deviation_multinomial: N exceeds the polynomial budget");
    if (p == 0.0 || p == 1.0) return 0.0;

    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    const auto term = [&](std::uint64_t m, double w, KahanSum& num) {
        const double d = std::fma(p, nd, -static_cast<double>(m)) / nd;
        num.add(w * d * d);
    };

    const std::uint64_t mode = std::min<std::uint64_t>(
        n, static_cast<std::uint64_t>(p * (nd + 1.0)));
    KahanSum num, den;
    const double tiny = 1e-290;

    double w = 1.0; // unnormalized weight at the mode
    for (std::uint64_t m = mode;; ++m) {
        term(m, w, num);
        den.add(w);
        if (m == n) break;
        w *= (static_cast<double>(n - m) / static_cast<double>(m + 1)) * (p / q);
        if (w < tiny) break;
    }
    w = 1.0;
    for (std::uint64_t m = mode; m > 0;) {
        w *= (static_cast<double>(m) / static_cast<double>(n - m + 1)) * (q / p);
        --m;
        if (w < tiny) break;
        term(m, w, num);
        den.add(w);
    }
    return num.value() / den.value();
}

inline double freq_deviation_multinomial(const FrequencySpec& spec) {
    return freq_deviation_multinomial(spec.p_k(), spec.copies);
}

// --- Born vs count comparison table ----------------------------------------

struct GrahamRow {
    unsigned m = 0;                  // number of first outcomes
    std::uint64_t branch_count = 0;  // C(trials, m)
    double count_mass = 0.0;         // C(trials, m) / 2^trials
    double born_mass = 0.0;          // C(trials, m) p^m (1-p)^(trials-m)
};

inline std::vector<GrahamRow> graham_table(double p, unsigned trials) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("graham_table: p must be in [0,1]");
    if (trials < 1) throw ContractViolation("graham_table: trials must be >= 1");
    if (trials > kMaxGrahamTrials)
        throw CapacityError("graham_table: trials exceeds the exact-integer budget");

    // Pascal row: exact in 64 bits for trials <= 64
    std::vector<std::uint64_t> binom(trials + 1, 0);
    binom[0] = 1;
    for (unsigned row = 1; row <= trials; ++row)
        for (unsigned j = row; j > 0; --j) binom[j] += binom[j - 1];

    const double q = 1.0 - p;
    std::vector<GrahamRow> rows(trials + 1);
    for (unsigned m = 0; m <= trials; ++m) {
        GrahamRow& r = rows[m];
        r.m = m;
        r.branch_count = binom[m];
        r.count_mass = std::ldexp(static_cast<double>(binom[m]), -static_cast<int>(trials));
        if (trials <= kGrahamDirectTrials) {
            r.born_mass = static_cast<double>(binom[m]) * std::pow(p, m) *
                          std::pow(q, trials - m);
        } else {
            if ((p == 0.0 && m > 0) || (q == 0.0 && m < trials)) {
                r.born_mass = 0.0;
            } else {
                double lg = std::log(static_cast<double>(binom[m]));
                if (m > 0) lg += m * std::log(p);
                if (m < trials) lg += (trials - m) * std::log(q);
                r.born_mass = std::exp(lg);
            }
        }
    }
    return rows;
}

// Monte Carlo mean of |C_k|^2 over Haar-random unit vectors; Graham's
// thermodynamic averaging gives exactly 1/dim in expectation.
inline double graham_average_check(std::size_t dim, std::uint64_t samples, std::uint64_t seed,
                                   unsigned streams = 1) {
    if (dim < 1) throw ContractViolation("graham_average_check: dim must be >= 1");
    if (samples < 1) throw ContractViolation("graham_average_check: samples must be >= 1");
    auto acc = rng::run_streams<MomentAccum>(
        samples, streams, [&](std::uint64_t first, std::uint64_t last, MomentAccum& out) {
            for (std::uint64_t i = first; i < last; ++i) {
                auto gen = rng::sample_rng(seed, i);
                auto v = rng::haar_unit_vector(gen, dim);
                out.add(std::norm(v[0]));
            }
        });
    return acc.mean();
}

} // namespace mwi::fhg
