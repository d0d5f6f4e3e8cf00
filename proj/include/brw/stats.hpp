#pragma once
#include <cstdint>
#include <vector>

namespace brw {

struct Summary {
    size_t n = 0;
    double mean = 0.0;
    double var = 0.0;  // unbiased (n-1), 0 for n < 2
    double se = 0.0;
    double min = 0.0;
    double max = 0.0;
};
Summary summarize(const std::vector<double>& xs);

struct WilsonCI {
    double lo = 0.0;
    double hi = 1.0;
};
// score interval for k successes out of n at normal quantile z
WilsonCI wilson(uint64_t k, uint64_t n, double z);

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489008;

// Two-sample comparison of integer-valued laws: total variation distance on
// pooled bins plus a chi-square homogeneity p-value.  Bins are greedy runs
// over the sorted support, closed once the pooled count reaches both
// (n_a+n_b)/60 and 10, so the chi-square approximation stays honest and TV
// noise stays well under the 0.02 gates used by the test suites.
struct SampleComparison {
    double tv = 0.0;
    double chi2 = 0.0;
    int df = 0;
    double p = 1.0;
    size_t bins = 0;
};
SampleComparison compare_samples(const std::vector<int64_t>& a,
                                 const std::vector<int64_t>& b);

// pack a small (y,f) pair into one comparison key
inline int64_t pair_key(uint64_t y, uint64_t f) {
    return int64_t((y << 32) | (f & 0xffffffffull));
}

} // namespace brw
