#pragma once
#include <cstdint>
#include <vector>
#include "brw/counts.hpp"
#include "brw/offspring.hpp"
#include "brw/rng.hpp"
#include "brw/tree.hpp"

namespace brw {

struct FieldOpts {
    uint64_t n_exact = kNExactDefault;
    bool strict = false;
    bool prune = true;        // drop cells that provably cannot re-enter B(r)
    bool early_stop = true;   // stop stepping once B(r) is covered
    uint64_t mem_budget = 4ull << 30;
};

struct HittingRecord {
    int r = 0;
    int horizon = 0;
    int64_t cover_time = -1;  // -1: not covered by horizon (or extinct)
    bool extinct = false;
    bool approx = false;
    bool saturated = false;
    uint64_t unhit = 0;
    // first-arrival times by [depth][shell index], -1 = never
    std::vector<std::vector<int32_t>> H;
    // these must stay zero everywhere; recorded rather than assumed
    uint64_t parity_violations = 0;
    uint64_t floor_violations = 0;

    bool censored() const { return cover_time < 0 && !extinct; }
};

// ----- census support ---------------------------------------------------------
// For each boundary vertex z the away-step count of a particle at v at time
// t is (t + d(v,z) - d(0,z))/2 regardless of path, so "no arrival at z with
// fewer than k away-steps" is exactly {H(z) >= r + 2k}, and the count of
// k-th away-steps is a flow functional of the field: flows u->v at time t
// with d(v,z) = 2k + r - t, d(u,z) = d(v,z) - 1.  The tables below index
// those flows once per (d, r, k_max).

struct CensusEdgeRef {
    uint8_t from_parent;  // 1: read v's inflow-from-parent; 0: read child's upflow
    int32_t depth;
    uint64_t index;       // (depth,index) of v itself or of the toward-child
};

struct CensusTables {
    int d = 3, r = 1, k_max = 1;
    int Dmax = 0;
    std::vector<VertexId> shell;                     // z by shell index
    std::vector<std::vector<std::vector<CensusEdgeRef>>> by_dist;  // [zi][D]
    std::vector<std::vector<int32_t>> zz;            // shell-to-shell distance
};

CensusTables make_census_tables(int d, int r, int k_max);  // r <= 8 enforced

struct CensusZRecord {
    int32_t hit_time = -1;   // H(z), -1 if unhit by horizon
    int32_t min_away = -1;   // (H(z) - r)/2 for hit z
    std::vector<u128> f;     // f[k-1] = F^(k) flow count (exact when y_zero)
    std::vector<uint8_t> y_zero;  // y_zero[k-1]: no arrival with < k away-steps
};

struct CensusRecord {
    HittingRecord hits;
    std::vector<CensusZRecord> zs;
};

// ----- the engine -------------------------------------------------------------
// Per-vertex counts inside B(r); outside mass is aggregated per (boundary
// vertex, depth excess) cell, which is exact for everything recorded here
// because an outside subtree contains no recorded vertex and its shells are
// exchangeable.

class FieldSim {
  public:
    FieldSim(int r, int horizon, const OffspringDist& dist, int d, Philox& rng,
             const FieldOpts& opts = {}, const CensusTables* census = nullptr);

    void step();
    int t() const { return t_; }
    int horizon() const { return horizon_; }
    bool covered() const { return cover_time_ >= 0; }
    bool extinct() const { return extinct_; }
    bool field_empty() const { return field_empty_; }
    bool done() const {
        return extinct_ || field_empty_ || (opts_.early_stop && covered());
    }
    u128 total_mass() const;
    u128 census_f(size_t zi, int k) const { return F_[zi][size_t(k - 1)]; }

    HittingRecord take_hits();

  private:
    int d_, r_, horizon_;
    const OffspringDist& dist_;
    Philox& rng_;
    FieldOpts opts_;
    const CensusTables* census_;
    int census_t_max_ = -1;

    int t_ = 0;
    int64_t cover_time_ = -1;
    bool approx_ = false, sat_ = false, extinct_ = false, field_empty_ = false;

    std::vector<std::vector<u128>> in_cur_, in_nxt_;    // [depth][index]
    std::vector<std::vector<u128>> out_cur_, out_nxt_;  // [m-1][shell index]
    std::vector<std::vector<int32_t>> H_;
    std::vector<uint64_t> unhit_depth_;
    uint64_t unhit_ = 0;

    // census scratch (only touched while t+1 <= r + 2 k_max)
    std::vector<std::vector<u128>> up_, from_par_;
    std::vector<std::vector<u128>> down_into_;  // [shell index][m], m <= 2 k_max
    std::vector<std::vector<u128>> F_;          // [zi][k-1]

    void ensure_out_layer(std::vector<std::vector<u128>>& out, int m);
};

HittingRecord run_cover(int r, int horizon_slack, const OffspringDist& dist,
                        int d, Philox& rng, const FieldOpts& opts = {});

// cover times of every nested ball B(r'), r' = 0..r, read off one run's H
// field (same trajectory, so they are coupled and nondecreasing); -1 where
// some vertex of B(r') is censored
std::vector<int64_t> nested_cover_times(const HittingRecord& rec);

CensusRecord census_run(const CensusTables& tables, const OffspringDist& dist,
                        int horizon_slack, Philox& rng, const FieldOpts& opts = {});

// ----- banded single-target hitting -------------------------------------------
// Projected (distance, away-count <= k_band) chain; particles above the band
// are discarded, so the sample is exact for the event {H <= L + 2 k_band}
// and censoring is an under-approximation beyond it.

struct HitBandSample {
    int64_t H = -1;  // -1: not hit within L + 2 k_band (censored)
    bool approx = false;
    bool saturated = false;
};

HitBandSample run_hitting_single(int L, int k_band, const OffspringDist& dist,
                                 int d, Philox& rng,
                                 uint64_t n_exact = kNExactDefault,
                                 bool strict = false);

// ----- per-particle genealogy runs (tiny scales only) --------------------------
// Independent oracle for the census functionals and the engine behind the
// many-particles-at-root experiment: every particle is simulated, and the
// per-z freeze counts are decided from the away-count identity plus an
// alive-bit per (z,k) that is cleared when the lineage freezes.

struct GenealogyTables {
    int d = 3, r = 1, k_max = 1;
    int depth_cap = 0;   // r + 2 k_max; no live lineage can be deeper
    size_t nz = 0;
    std::vector<VertexId> shell;
    std::vector<std::vector<uint8_t>> dz;  // [depth][index*nz + zi]
};

GenealogyTables make_genealogy_tables(int d, int r, int k_max);

struct PerParticleOpts {
    bool record_hits = true;  // track H over B(r) up to t = r + 2 k_max
    u128 particle_cap = u128(20'000'000ull);
};

struct PerParticleResult {
    std::vector<std::vector<u128>> y;  // [zi][k-1]
    std::vector<std::vector<u128>> f;  // [zi][k-1]
    HittingRecord hits;
};

PerParticleResult per_particle_run(const GenealogyTables& tables, u128 n0,
                                   const OffspringDist& dist, Philox& rng,
                                   const PerParticleOpts& opts = {});

} // namespace brw
