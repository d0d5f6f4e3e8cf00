#pragma once
#include <string>
#include <vector>
#include "brw/counts.hpp"
#include "brw/rng.hpp"
#include "brw/sampling.hpp"

namespace brw {

enum class OffKind { deterministic, poisson, geometric, table };

struct SumResult {
    u128 value = 0;
    bool approx = false;   // Gaussian fallback or saturation was used
};

// Offspring law of the branching walk.  The tree-level processes use
// mean-d laws; thinning by 1/d produces the critical (mean-1) laws that
// drive all the Galton-Watson analysis, so instances here are allowed any
// positive mean -- make()/parse() add the mean==d check for user input.
class OffspringDist {
  public:
    static OffspringDist deterministic(uint64_t n);
    static OffspringDist poisson(double mean);
    // pmf(j) = (1/(m+1)) (m/(m+1))^j, mean m
    static OffspringDist geometric(double mean);
    // finite table, pmf[j] = P(j children); normalized, must sum to 1 within 1e-12
    static OffspringDist table(std::vector<double> pmf);

    // spec-facing factory: kind name + integer d >= 2; validates mean == d
    static OffspringDist make(const std::string& kind, int d,
                              const std::vector<double>& table_pmf = {});
    // "det:3" | "poisson:3" | "geom:3" | "table:0=0.5,6=0.5"
    static OffspringDist parse(const std::string& spec);

    OffKind kind() const { return kind_; }
    double mean() const { return mean_; }
    double variance() const { return var_; }
    double pmf(uint64_t j) const;
    bool is_critical(double tol = 1e-9) const { return std::abs(mean_ - 1.0) <= tol; }
    std::string spec_string() const;

    long double pgf(long double s) const;
    // 1 - f(1-q), computed without forming 1-q near q=0 (expm1/log1p forms);
    // this is the survival-probability recursion step
    long double survival_step(long double q) const;

    // binomial p-thinning;  f_thin(s) = f(1 - p + p s)
    OffspringDist thin(double p) const;

    // kappa = 1 - E[d^-L] = 1 - f(1/d); enters the frozen-count bounds
    double kappa(int d) const;

    // sum of n iid draws
    SumResult sample_sum(u128 n, Philox& rng,
                         uint64_t n_exact = kNExactDefault, bool strict = false) const;
    // single draw (per-particle simulators / oracles)
    uint64_t sample_one(Philox& rng) const;

  private:
    OffKind kind_ = OffKind::deterministic;
    double mean_ = 0, var_ = 0;
    uint64_t det_n_ = 0;
    double lambda_ = 0;     // poisson
    double geo_mean_ = 0;   // geometric
    std::vector<double> pmf_;       // table
    std::vector<double> cdf_;       // table sampling
};

} // namespace brw
