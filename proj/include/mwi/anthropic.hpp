// Scenario engines for the mesoscopic anthropic arguments: Haar fidelity,
// Zeno chains, the complexity random walk with anthropic conditioning,
// the planetary-coincidence diffusion, and the order-of-magnitude ledgers.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mwi/errors.hpp"
#include "mwi/numeric.hpp"
#include "mwi/rng.hpp"

namespace mwi::anthropic {

using rng::Complex;

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

// Mean squared overlap of two independent Haar-random unit vectors;
// expectation 1/dim. When `per_sample` is given it receives every
// |<i|f>|^2 value, indexed by global sample number.
inline MeanStdErr haar_fidelity_mean(std::size_t dim, std::uint64_t samples, std::uint64_t seed,
                                     unsigned streams = 1,
                                     std::vector<double>* per_sample = nullptr) {
    if (dim < 1) throw ContractViolation("haar_fidelity_mean: dim must be >= 1");
    if (samples < 2) throw ContractViolation("haar_fidelity_mean: samples must be >= 2");
    if (per_sample) per_sample->assign(samples, 0.0);
    auto acc = rng::run_streams<MomentAccum>(
        samples, streams, [&](std::uint64_t first, std::uint64_t last, MomentAccum& out) {
            for (std::uint64_t i = first; i < last; ++i) {
                auto gen = rng::sample_rng(seed, i);
                auto a = rng::haar_unit_vector(gen, dim);
                auto b = rng::haar_unit_vector(gen, dim);
                const double f = std::norm(rng::inner(a, b));
                out.add(f);
                if (per_sample) (*per_sample)[i] = f;
            }
        });
    return {acc.mean(), acc.std_error()};
}

// --- Zeno chains -------------------------------------------------------------

// Crossed polarizer pair with K equally spaced intermediate analyzers:
// transmission = cos^(2(K+1))(pi / (2(K+1))). Monotone in K, -> 1.
inline double zeno_polarizer_chain(unsigned intermediates) {
    const double n = static_cast<double>(intermediates) + 1.0;
    const double c = std::cos(M_PI / (2.0 * n));
    return std::pow(c, 2.0 * n);
}

// Same quantity by simulating the chain of 2-dimensional projections: a
// linear polarization state is projected onto each analyzer direction in
// turn and the transmitted intensity is accumulated.
inline double zeno_polarizer_chain_simulated(unsigned intermediates) {
    const double step = M_PI / (2.0 * (static_cast<double>(intermediates) + 1.0));
    double sx = 1.0, sy = 0.0; // polarization state, starts along the first axis
    double transmitted = 1.0;
    for (unsigned j = 1; j <= intermediates + 1; ++j) {
        const double angle = static_cast<double>(j) * step;
        const double ax = std::cos(angle);
        const double ay = std::sin(angle);
        const double amp = ax * sx + ay * sy;
        transmitted *= amp * amp;
        if (transmitted == 0.0) return 0.0;
        // renormalized post-measurement state lies along the analyzer
        sx = ax;
        sy = ay;
    }
    return transmitted;
}

enum class ZenoMode { polarizer, random };

struct ZenoChainConfig {
    std::size_t dim = 2;
    unsigned intermediates = 0; // K
    ZenoMode mode = ZenoMode::random;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t initial_index = 0;               // |i> = basis vector index
    std::size_t final_index = std::size_t(-1);   // |f>; defaults to dim-1
};

// K complete projective measurements in independent Haar-random bases,
// outcomes sampled by Born weights, then the probability of landing on |f>.
// The analytic expectation is 1/dim for every K >= 1: random measurements
// do not help the transition, unlike the engineered polarizer chain.
inline MeanStdErr zeno_random_chain(const ZenoChainConfig& cfg, unsigned streams = 1,
                                    std::vector<double>* per_sample = nullptr) {
    if (cfg.mode != ZenoMode::random)
        throw ContractViolation("zeno_random_chain: config mode must be random");
    if (cfg.dim < 2) throw ContractViolation("zeno_random_chain: dim must be >= 2");
    if (cfg.samples < 2) throw ContractViolation("zeno_random_chain: samples must be >= 2");
    const std::size_t dim = cfg.dim;
    const std::size_t init = cfg.initial_index;
    const std::size_t fin = (cfg.final_index == std::size_t(-1)) ? dim - 1 : cfg.final_index;
    if (init >= dim || fin >= dim)
        throw ContractViolation("zeno_random_chain: state index out of range");
    if (per_sample) per_sample->assign(cfg.samples, 0.0);

    auto acc = rng::run_streams<MomentAccum>(
        cfg.samples, streams, [&](std::uint64_t first, std::uint64_t last, MomentAccum& out) {
            for (std::uint64_t s = first; s < last; ++s) {
                auto gen = rng::sample_rng(cfg.seed, s);
                std::uniform_real_distribution<double> uni(0.0, 1.0);
                std::vector<Complex> state(dim, Complex(0.0, 0.0));
                state[init] = 1.0;
                for (unsigned k = 0; k < cfg.intermediates; ++k) {
                    const auto basis = rng::haar_basis(gen, dim);
                    const double u = uni(gen);
                    double cdf = 0.0;
                    std::size_t picked = dim - 1;
                    for (std::size_t j = 0; j < dim; ++j) {
                        cdf += std::norm(rng::inner(basis[j], state));
                        if (u < cdf) {
                            picked = j;
                            break;
                        }
                    }
                    state = basis[picked];
                }
                const double p = std::norm(state[fin]);
                out.add(p);
                if (per_sample) (*per_sample)[s] = p;
            }
        });
    return {acc.mean(), acc.std_error()};
}

// --- Complexity random walk ---------------------------------------------------

struct EvolutionConfig {
    std::uint64_t steps = 1;    // t
    double step_sigma = 1.0;    // complexity units per step
    double threshold = 1.0;     // anthropic selection level
    std::uint64_t branches = 1; // B
    std::uint64_t seed = 0;
    bool reflecting = true;     // zero complexity barrier on/off
};

struct EvolutionResult {
    double mean_final = 0.0;
    double frac_above_threshold = 0.0;
    double conditional_mean = 0.0; // NaN when no branch passes the threshold
};

namespace detail {

struct WalkAccum {
    KahanSum sum_final;
    KahanSum sum_above;
    std::uint64_t count = 0;
    std::uint64_t count_above = 0;

    void merge(const WalkAccum& o) {
        sum_final.add(o.sum_final.value());
        sum_above.add(o.sum_above.value());
        count += o.count;
        count_above += o.count_above;
    }
};

} // namespace detail

// B independent random walks of t Gaussian steps reflected at the zero
// complexity barrier (x <- |x + xi|). Reports the population mean, the
// fraction of branches above the anthropic threshold, and the mean over
// that selected ensemble.
inline EvolutionResult evolve_complexity(const EvolutionConfig& cfg, unsigned streams = 1,
                                         std::vector<double>* per_branch = nullptr) {
    if (cfg.steps < 1) throw ContractViolation("evolve_complexity: steps must be >= 1");
    if (cfg.branches < 1) throw ContractViolation("evolve_complexity: branches must be >= 1");
    if (!(cfg.step_sigma > 0.0))
        throw ContractViolation("evolve_complexity: step_sigma must be > 0");
    if (!(cfg.threshold >= 0.0))
        throw ContractViolation("evolve_complexity: threshold must be >= 0");
    if (per_branch) per_branch->assign(cfg.branches, 0.0);

    auto acc = rng::run_streams<detail::WalkAccum>(
        cfg.branches, streams,
        [&](std::uint64_t first, std::uint64_t last, detail::WalkAccum& out) {
            for (std::uint64_t b = first; b < last; ++b) {
                auto gen = rng::sample_rng(cfg.seed, b);
                std::normal_distribution<double> step(0.0, cfg.step_sigma);
                double x = 0.0;
                if (cfg.reflecting) {
                    for (std::uint64_t t = 0; t < cfg.steps; ++t) x = std::fabs(x + step(gen));
                } else {
                    for (std::uint64_t t = 0; t < cfg.steps; ++t) x += step(gen);
                }
                out.sum_final.add(x);
                ++out.count;
                if (x > cfg.threshold) {
                    out.sum_above.add(x);
                    ++out.count_above;
                }
                if (per_branch) (*per_branch)[b] = x;
            }
        });

    EvolutionResult res;
    res.mean_final = acc.sum_final.value() / static_cast<double>(acc.count);
    res.frac_above_threshold =
        static_cast<double>(acc.count_above) / static_cast<double>(acc.count);
    res.conditional_mean = acc.count_above
                               ? acc.sum_above.value() / static_cast<double>(acc.count_above)
                               : std::numeric_limits<double>::quiet_NaN();
    return res;
}

// P(at least one of B independent branches succeeds) = 1 - (1-q)^B,
// evaluated in log space so it stays exact for tiny q and huge B.
inline double survival_probability(double q, double branches) {
    if (!(q >= 0.0 && q <= 1.0)) throw ContractViolation("survival_probability: q must be in [0,1]");
    if (!(branches >= 1.0)) throw ContractViolation("survival_probability: branch count must be >= 1");
    if (q == 1.0) return 1.0;
    return -std::expm1(branches * std::log1p(-q));
}

// --- Planetary coincidence diffusion -----------------------------------------

struct CoincidenceConfig {
    double r0 = 1.0;          // initial apparent-size ratio
    double drift_sigma = 0.0; // per-step standard deviation
    std::uint64_t steps = 1;
    double epsilon = 0.0;     // tolerance band |r - 1| < epsilon
    std::uint64_t branches = 1;
    std::uint64_t seed = 0;
};

struct CoincidenceResult {
    double frac_in_band = 0.0;
    double analytic_frac = 0.0; // Gaussian band mass after `steps` increments
};

namespace detail {

struct BandAccum {
    std::uint64_t count = 0;
    std::uint64_t in_band = 0;
    void merge(const BandAccum& o) {
        count += o.count;
        in_band += o.in_band;
    }
};

} // namespace detail

inline CoincidenceResult coincidence_scan(const CoincidenceConfig& cfg, unsigned streams = 1,
                                          std::vector<double>* per_branch = nullptr) {
    if (!(cfg.epsilon > 0.0)) throw ContractViolation("coincidence_scan: epsilon must be > 0");
    if (!(cfg.drift_sigma > 0.0))
        throw ContractViolation("coincidence_scan: drift_sigma must be > 0");
    if (cfg.steps < 1) throw ContractViolation("coincidence_scan: steps must be >= 1");
    if (cfg.branches < 1) throw ContractViolation("coincidence_scan: branches must be >= 1");
    if (per_branch) per_branch->assign(cfg.branches, 0.0);

    auto acc = rng::run_streams<detail::BandAccum>(
        cfg.branches, streams,
        [&](std::uint64_t first, std::uint64_t last, detail::BandAccum& out) {
            for (std::uint64_t b = first; b < last; ++b) {
                auto gen = rng::sample_rng(cfg.seed, b);
                std::normal_distribution<double> step(0.0, cfg.drift_sigma);
                double r = cfg.r0;
                for (std::uint64_t t = 0; t < cfg.steps; ++t) r += step(gen);
                ++out.count;
                if (std::fabs(r - 1.0) < cfg.epsilon) ++out.in_band;
                if (per_branch) (*per_branch)[b] = r;
            }
        });

    const double spread = cfg.drift_sigma * std::sqrt(static_cast<double>(cfg.steps));
    CoincidenceResult res;
    res.frac_in_band = static_cast<double>(acc.in_band) / static_cast<double>(acc.count);
    res.analytic_frac = normal_cdf((1.0 + cfg.epsilon - cfg.r0) / spread) -
                        normal_cdf((1.0 - cfg.epsilon - cfg.r0) / spread);
    return res;
}

// --- Order-of-magnitude ledgers -----------------------------------------------

struct BranchCountConfig {
    double universe_age_s = 4.35e17;
    double planck_time_s = 5.39e-44;
    double branching_base = 2.0; // per-tick multiplicity
};

struct BranchCountResult {
    double log10_n = 0.0;
    double log10_log10_n = 0.0;
};

// N = f(T / t_P) with f near-exponential: log10 N = (T/t_P) * log10(base).
// Everything stays in (iterated) log10 space; N itself is never formed.
inline BranchCountResult branch_count_estimate(const BranchCountConfig& cfg) {
    if (!(cfg.universe_age_s > 0.0) || !(cfg.planck_time_s > 0.0))
        throw ContractViolation("branch_count_estimate: times must be positive");
    if (cfg.universe_age_s < cfg.planck_time_s)
        throw ContractViolation("branch_count_estimate: universe age must be >= Planck time");
    if (!(cfg.branching_base > 1.0))
        throw ContractViolation("branch_count_estimate: branching base must be > 1");

    const double log10_ratio =
        std::log10(cfg.universe_age_s) - std::log10(cfg.planck_time_s);
    const double log10_base = std::log10(cfg.branching_base);

    BranchCountResult res;
    res.log10_log10_n = log10_ratio + std::log10(log10_base);
    res.log10_n = (log10_ratio < 300.0)
                      ? std::pow(10.0, log10_ratio) * log10_base
                      : std::numeric_limits<double>::infinity();
    return res;
}

struct LifeLedger {
    double log10_event_prob = 0.0;     // e.g. -400 for the first replicator
    double log10_attempts = 0.0;       // e.g. +29 small warm ponds * time
    double log10_log10_branches = 0.0; // e.g. 60
};

struct LedgerVerdict {
    double log10_expected_per_world = 0.0;
    double surplus = 0.0; // log10(N) + log10(expected events per world)
    bool compensated = false;
};

// Does the branch multiplicity cover the per-world deficit? The expected
// number of successes across all branches is 10^surplus.
inline LedgerVerdict life_ledger_verdict(const LifeLedger& ledger) {
    LedgerVerdict v;
    v.log10_expected_per_world = ledger.log10_event_prob + ledger.log10_attempts;
    const double log10_n = (ledger.log10_log10_branches < 300.0)
                               ? std::pow(10.0, ledger.log10_log10_branches)
                               : std::numeric_limits<double>::infinity();
    v.surplus = log10_n + v.log10_expected_per_world;
    v.compensated = v.surplus >= 0.0;
    return v;
}

} // namespace mwi::anthropic
