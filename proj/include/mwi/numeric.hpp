// Small numeric helpers: compensated summation, moment accumulation,
// normal CDF.
#pragma once

#include <cmath>
#include <cstdint>

namespace mwi {

// Kahan compensated sum. Keeps long sums of same-magnitude terms accurate
// to a few ulp instead of n*eps.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

// Streaming mean / standard error accumulator with an associative merge.
struct MomentAccum {
    KahanSum sum;
    KahanSum sum_sq;
    std::uint64_t count = 0;

    void add(double x) {
        sum.add(x);
        sum_sq.add(x * x);
        ++count;
    }

    void merge(const MomentAccum& other) {
        sum.add(other.sum.value());
        sum_sq.add(other.sum_sq.value());
        count += other.count;
    }

    double mean() const { return count ? sum.value() / static_cast<double>(count) : 0.0; }

    // Standard error of the mean from the sample variance.
    double std_error() const {
        if (count < 2) return 0.0;
        double n = static_cast<double>(count);
        double m = mean();
        double var = (sum_sq.value() - n * m * m) / (n - 1.0);
        if (var < 0.0) var = 0.0; // roundoff guard for near-constant samples
        return std::sqrt(var / n);
    }
};

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

} // namespace mwi
