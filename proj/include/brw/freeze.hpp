#pragma once
#include <utility>
#include <vector>
#include "brw/counts.hpp"
#include "brw/offspring.hpp"
#include "brw/rng.hpp"
#include "brw/tree.hpp"

namespace brw {

// Counts from one freezing run: particles frozen at the target (y), frozen
// on their k-th away-step (f), and every particle ever seen (s).
struct FreezeOutcome {
    u128 y = 0;
    u128 f = 0;
    u128 s = 0;
    bool terminated = true;
    bool approx = false;
    u128 watch_hits = 0;  // arrivals at opts.watch with small away-count
};

struct FrozenCell {
    VertexId pos;
    int away = 0;
    u128 count = 0;
};

// The frozen configuration a run leaves behind: away-frozen particles by
// (position, away-count) cell, plus how many froze at the target.
struct FrozenConfig {
    std::vector<FrozenCell> away_frozen;
    u128 at_target = 0;
};

struct FreezeOpts {
    uint64_t n_exact = kNExactDefault;
    bool strict = false;
    u128 event_cap = u128(1000000000ull);  // births before declaring pathology
    // optional watch vertex: count arrivals there with away <= watch_max_away
    // (used to condition runs the way chaining does)
    const VertexId* watch = nullptr;
    int watch_max_away = 0;
};

// Full-tree (target,k)-freezing from an initial multiset of particle
// positions (all with away-count 0).  Exact event simulation on aggregated
// (vertex, away) cells.
std::pair<FreezeOutcome, FrozenConfig>
freeze_tree(const std::vector<std::pair<VertexId, u128>>& initial,
            const VertexId& target, int k, const OffspringDist& dist, int d,
            Philox& rng, const FreezeOpts& opts = {});

// Symmetry-projected form: state is (distance-to-target m, away-count a);
// same (Y,F,S) law as freeze_tree from n0 particles at any fixed vertex at
// distance L, at cost polynomial in the band, not the particle count.
FreezeOutcome freeze_1d(int L, int k, u128 n0, const OffspringDist& dist,
                        int d, Philox& rng, const FreezeOpts& opts = {});

// Continue a finished run whose target was never reached: a (new_target,1)-
// freeze started from the away-frozen particles (away-counts reset).  With
// new_target below the old one this realizes the k-chaining identity.
std::pair<FreezeOutcome, FrozenConfig>
freeze_chain(const FrozenConfig& frozen, const VertexId& new_target,
             const OffspringDist& dist, int d, Philox& rng,
             const FreezeOpts& opts = {});

} // namespace brw
