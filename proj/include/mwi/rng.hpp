// Reproducible random streams.
//
// Every Monte Carlo sample owns an independent generator keyed by
// (seed, sample_index) through the splitmix64 finalizer, so the set of
// samples drawn for a given seed does not depend on how they are
// partitioned into streams. Streams are contiguous chunks of the sample
// index range; their partial results are merged in stream order, which
// makes a run deterministic for a fixed (seed, streams) pair.
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "mwi/errors.hpp"

namespace mwi::rng {

using Complex = std::complex<double>;

// i-th output of the splitmix64 sequence started at `seed`.
inline std::uint64_t split_key(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t sample_index) {
    return std::mt19937_64(split_key(seed, sample_index));
}

struct SampleRange {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
};

// Split [0, total) into `streams` contiguous chunks (first chunks get the
// remainder).
inline std::vector<SampleRange> partition_samples(std::uint64_t total, unsigned streams) {
    if (streams == 0) throw ContractViolation("streams must be >= 1");
    std::vector<SampleRange> ranges(streams);
    std::uint64_t base = total / streams;
    std::uint64_t rem = total % streams;
    std::uint64_t at = 0;
    for (unsigned s = 0; s < streams; ++s) {
        std::uint64_t len = base + (s < rem ? 1 : 0);
        ranges[s] = {at, at + len};
        at += len;
    }
    return ranges;
}

// Run `body(first, last, partial)` over each stream's index range and fold
// the partials in stream order. Partial must be default-constructible and
// provide merge(const Partial&).
template <class Partial, class Body>
Partial run_streams(std::uint64_t samples, unsigned streams, Body&& body) {
    auto ranges = partition_samples(samples, streams);
    std::vector<Partial> partials(streams);

    unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = std::min<unsigned>(streams, hw ? hw : 1);
    if (workers <= 1) {
        for (unsigned s = 0; s < streams; ++s)
            body(ranges[s].begin, ranges[s].end, partials[s]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (unsigned s = w; s < streams; s += workers)
                    body(ranges[s].begin, ranges[s].end, partials[s]);
            });
        }
        for (auto& t : pool) t.join();
    }

    Partial merged;
    for (const auto& p : partials) merged.merge(p);
    return merged;
}

// --- Haar-distributed draws ------------------------------------------------

inline std::vector<Complex> gaussian_vector(std::mt19937_64& gen, std::size_t dim) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Complex> v(dim);
    for (auto& z : v) {
        double re = nd(gen);
        double im = nd(gen);
        z = Complex(re, im);
    }
    return v;
}

inline double norm_of(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// Uniform unit vector on the sphere of C^dim.
inline std::vector<Complex> haar_unit_vector(std::mt19937_64& gen, std::size_t dim) {
    for (;;) {
        auto v = gaussian_vector(gen, dim);
        double n = norm_of(v);
        if (n > 1e-150) {
            for (auto& z : v) z /= n;
            return v;
        }
    }
}

// Haar-random orthonormal basis of C^dim: Gaussian columns + modified
// Gram-Schmidt (column phases are irrelevant for projective measurements).
inline std::vector<std::vector<Complex>> haar_basis(std::mt19937_64& gen, std::size_t dim) {
    std::vector<std::vector<Complex>> basis;
    basis.reserve(dim);
    while (basis.size() < dim) {
        auto v = gaussian_vector(gen, dim);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                Complex c = inner(b, v);
                for (std::size_t i = 0; i < dim; ++i) v[i] -= c * b[i];
            }
        double n = norm_of(v);
        if (n < 1e-8) continue; // numerically dependent draw, retry
        for (auto& z : v) z /= n;
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace mwi::rng
