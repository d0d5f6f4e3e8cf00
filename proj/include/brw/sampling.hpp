#pragma once
#include <random>
#include <stdexcept>
#include "brw/counts.hpp"
#include "brw/rng.hpp"

namespace brw {

// Above this count, sums and splits switch from exact sampling to a
// moment-matched Gaussian (rounded, clamped) and the result carries an
// "approximate" flag.  Cover runs at depth blow through this almost
// immediately; the flag is what lets small-scale tests insist on exactness.
inline constexpr uint64_t kNExactDefault = 1'000'000;

struct StrictExactViolation : std::runtime_error {
    StrictExactViolation() : std::runtime_error(
        "strict-exact mode: an approximate sampling path was required") {}
    explicit StrictExactViolation(const std::string& what)
        : std::runtime_error("strict-exact mode: " + what) {}
};

// Binomial(n, p) for n within the exact window.  libstdc++'s implementation
// is an exact sampler; params are rebuilt per call because (n, p) varies.
inline uint64_t binomial_exact(Philox& rng, uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<int64_t> b(int64_t(n), p);
    int64_t v = b(rng);
    return v < 0 ? 0 : uint64_t(v);
}

// Binomial(n, p) for arbitrary n: exact below n_exact, else Gaussian.
inline u128 binomial_u128(Philox& rng, u128 n, double p, uint64_t n_exact,
                          bool& approx, bool strict) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (n <= n_exact) return binomial_exact(rng, uint64_t(n), p);
    if (strict) throw StrictExactViolation{};
    approx = true;
    long double mean = to_ld(n) * (long double)p;
    long double sd = std::sqrt(to_ld(n) * (long double)p * (1.0L - (long double)p));
    bool dummy = false;
    u128 v = from_ld(mean + sd * (long double)rng.normal(), dummy);
    return v > n ? n : v;
}

// Split K particles uniformly over nbins neighbours: chain of conditional
// binomials, K_i ~ Binomial(K_remaining, 1/(nbins-i)).  Exact whenever each
// stage's remaining count is inside the exact window.
inline void split_uniform(Philox& rng, u128 K, int nbins, u128* out,
                          uint64_t n_exact, bool& approx, bool strict) {
    u128 rem = K;
    for (int i = 0; i < nbins - 1; ++i) {
        u128 c = binomial_u128(rng, rem, 1.0 / double(nbins - i), n_exact, approx, strict);
        out[i] = c;
        rem -= c;
    }
    out[nbins - 1] = rem;
}

inline uint64_t poisson_exact(Philox& rng, double mean) {
    std::poisson_distribution<int64_t> p(mean);
    int64_t v = p(rng);
    return v < 0 ? 0 : uint64_t(v);
}

// Negative binomial: failures before the n-th success, success prob q.
// Gamma-Poisson mixture (exact identity).
inline uint64_t negbin_exact(Philox& rng, uint64_t n, double q) {
    if (n == 0) return 0;
    std::gamma_distribution<double> g(double(n), (1.0 - q) / q);
    return poisson_exact(rng, g(rng));
}

} // namespace brw
