#pragma once
#include <vector>
#include "brw/counts.hpp"
#include "brw/offspring.hpp"
#include "brw/rng.hpp"

namespace brw {

// One realized trajectory of a branching process: generation sizes,
// total progeny, and whether generation n was still alive.
struct GWTrace {
    std::vector<u128> z;   // z[0..n_gen], absorbing at 0
    u128 total = 0;        // sum of z[i]
    bool survived = false; // z[n_gen] > 0
    bool approx = false;
};

// Critical branching only (mean 1): that is the regime every consumer
// here lives in, and silently accepting supercritical input would make
// the survival oracle meaningless.
GWTrace simulate_gw(const OffspringDist& dist, int n_gen, u128 z0, Philox& rng,
                    uint64_t n_exact = kNExactDefault, bool strict = false);

// Lean variants for big Monte Carlo loops (no per-generation storage).
bool gw_survives(const OffspringDist& dist, int n_gen, Philox& rng);
u128 gw_last_generation(const OffspringDist& dist, int n_gen, Philox& rng);

// q_n = P(Z_n > 0) from one particle, by iterating q <- 1 - f(1-q) in
// extended precision.  Deterministic; no sampling.
long double pgf_survival_exact(const OffspringDist& dist, int64_t n);

// q_n for several n in one pass (ns must be nondecreasing)
std::vector<long double> survival_curve(const OffspringDist& dist,
                                        const std::vector<int64_t>& ns);

struct GammaTail {
    double gamma = 0;
    double estimate = 0;   // P(S_n >= gamma n^2 | Z_n > 0)
    double se = 0;
    double liminf_q = 0;   // n * P(S_n >= gamma n^2), unconditional
};

struct TailMCResult {
    uint64_t reps = 0;
    uint64_t accepted = 0;  // surviving traces
    std::vector<GammaTail> tails;
};

// Conditioning on survival is by rejection: dead-by-n traces are discarded
// for the conditional estimate (still counted for the unconditional one).
// Throws if fewer than 100 traces survive.
TailMCResult total_progeny_tail_mc(const OffspringDist& dist, int64_t n,
                                   const std::vector<double>& gammas,
                                   uint64_t reps, Philox& rng);

} // namespace brw
