#include "brw/field.hpp"
#include "brw/sampling.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <stdexcept>
#include <string>

namespace brw {

// -------------------------------------------------------------------------
// census tables
// -------------------------------------------------------------------------

CensusTables make_census_tables(int d, int r, int k_max) {
    if (d < 2 || d > 16) throw std::invalid_argument("census: d out of range");
    if (r < 1 || r > 8)
        throw std::invalid_argument("census: per-boundary-vertex tables are only kept for r <= 8");
    if (k_max < 1 || k_max > 8) throw std::invalid_argument("census: k_max must be in [1,8]");

    CensusTables T;
    T.d = d;
    T.r = r;
    T.k_max = k_max;
    T.Dmax = 2 * k_max + r - 1;  // deepest distance a qualifying flow can target
    const uint64_t nz = shell_size(d, r);
    T.shell.reserve(nz);
    for (uint64_t i = 0; i < nz; ++i) T.shell.push_back(vertex_at(d, r, i));

    T.by_dist.assign(nz, {});
    T.zz.assign(nz, std::vector<int32_t>(nz, 0));
    for (uint64_t zi = 0; zi < nz; ++zi) {
        const VertexId& z = T.shell[zi];
        auto& rows = T.by_dist[zi];
        rows.assign(size_t(T.Dmax) + 1, {});
        for (int j = 0; j <= r; ++j) {
            for (uint64_t i = 0; i < shell_size(d, j); ++i) {
                VertexId v = vertex_at(d, j, i);
                int D = tree_distance(v, z);
                if (D < 1 || D > T.Dmax) continue;
                VertexId u = neighbor_toward(v, z);
                CensusEdgeRef e;
                if (u.depth() == v.depth() + 1) {
                    // z sits below v; the step away from z into v comes up
                    // from v's child on the z side
                    e.from_parent = 0;
                    e.depth = j + 1;
                    e.index = index_of(d, u);
                } else {
                    e.from_parent = 1;
                    e.depth = j;
                    e.index = i;
                }
                rows[size_t(D)].push_back(e);
            }
        }
        for (uint64_t wi = 0; wi < nz; ++wi)
            T.zz[zi][wi] = int32_t(tree_distance(z, T.shell[wi]));
    }
    return T;
}

// -------------------------------------------------------------------------
// FieldSim
// -------------------------------------------------------------------------

FieldSim::FieldSim(int r, int horizon, const OffspringDist& dist, int d, Philox& rng,
                   const FieldOpts& opts, const CensusTables* census)
    : d_(d), r_(r), horizon_(horizon), dist_(dist), rng_(rng), opts_(opts), census_(census) {
    if (d < 2 || d > 16) throw std::invalid_argument("field: d out of range");
    if (r < 0) throw std::invalid_argument("field: r must be >= 0");
    if (horizon < r) throw std::invalid_argument("field: horizon must be >= r");
    if (census_) {
        if (census_->d != d || census_->r != r)
            throw std::invalid_argument("field: census tables built for different (d, r)");
        census_t_max_ = r + 2 * census_->k_max;
        if (horizon < census_t_max_)
            throw std::invalid_argument("field: horizon too short for census window r + 2*k_max");
    }

    // refuse up front if the grid cannot fit
    uint64_t ball_cells = 0;
    for (int j = 0; j <= r; ++j) ball_cells += shell_size(d, j);
    const uint64_t zrow = shell_size(d, r);
    const uint64_t out_layers = uint64_t(std::max(0, horizon - r));
    uint64_t need = 2 * ball_cells * 16          // in_cur/in_nxt
                    + 2 * zrow * out_layers * 16 // outside bands, worst case
                    + ball_cells * 4;            // H
    if (census_) {
        need += 2 * ball_cells * 16 + zrow * uint64_t(2 * census_->k_max + 1) * 16
                + zrow * uint64_t(census_->k_max) * 16;
    }
    if (need > opts_.mem_budget)
        throw std::runtime_error("field: grid for r=" + std::to_string(r) + ", horizon=" +
                                 std::to_string(horizon) + " requires ~" + std::to_string(need) +
                                 " bytes (budget " + std::to_string(opts_.mem_budget) + ")");

    in_cur_.resize(size_t(r) + 1);
    in_nxt_.resize(size_t(r) + 1);
    H_.resize(size_t(r) + 1);
    unhit_depth_.resize(size_t(r) + 1);
    for (int j = 0; j <= r; ++j) {
        const size_t n = shell_size(d, j);
        in_cur_[j].assign(n, 0);
        in_nxt_[j].assign(n, 0);
        H_[j].assign(n, -1);
        unhit_depth_[j] = n;
    }
    in_cur_[0][0] = 1;
    H_[0][0] = 0;
    unhit_depth_[0] = 0;
    for (int j = 1; j <= r; ++j) unhit_ += unhit_depth_[j];
    if (unhit_ == 0) cover_time_ = 0;

    if (census_) {
        up_.resize(size_t(r) + 1);
        from_par_.resize(size_t(r) + 1);
        for (int j = 0; j <= r; ++j) {
            up_[j].assign(shell_size(d, j), 0);
            from_par_[j].assign(shell_size(d, j), 0);
        }
        down_into_.assign(zrow, std::vector<u128>(size_t(2 * census_->k_max) + 1, 0));
        F_.assign(zrow, std::vector<u128>(size_t(census_->k_max), 0));
    }
}

void FieldSim::ensure_out_layer(std::vector<std::vector<u128>>& out, int m) {
    while (int(out.size()) < m) out.emplace_back(shell_size(d_, r_), 0);
}

u128 FieldSim::total_mass() const {
    bool s = false;
    u128 tot = 0;
    for (auto& row : in_cur_)
        for (u128 v : row) tot = sat_add(tot, v, s);
    for (auto& row : out_cur_)
        for (u128 v : row) tot = sat_add(tot, v, s);
    return tot;
}

void FieldSim::step() {
    assert(t_ < horizon_);
    const int tp = t_ + 1;
    const int dm1 = d_ - 1;
    const double inv_d = 1.0 / d_;
    const bool cen = census_ && tp <= census_t_max_;

    // zero only the parity slices that can receive at time tp
    for (int j = tp & 1; j <= std::min(tp, r_); j += 2)
        std::fill(in_nxt_[j].begin(), in_nxt_[j].end(), u128(0));
    const int m_reach = tp - r_;
    const int m_recv_hi = opts_.prune ? std::min(m_reach, horizon_ - tp) : m_reach;
    for (int m = 1; m <= m_recv_hi; ++m) {
        if ((r_ + m - tp) % 2 != 0) continue;
        ensure_out_layer(out_nxt_, m);
        std::fill(out_nxt_[m - 1].begin(), out_nxt_[m - 1].end(), u128(0));
    }
    if (cen) {
        for (auto& row : up_) std::fill(row.begin(), row.end(), u128(0));
        for (auto& row : from_par_) std::fill(row.begin(), row.end(), u128(0));
        for (auto& row : down_into_) std::fill(row.begin(), row.end(), u128(0));
    }

    bool any_born = false, any_next = false;
    std::array<u128, 16> buf{};

    // inside sources: depths with the live parity
    const int j_hi = std::min(t_, r_);
    for (int j = t_ & 1; j <= j_hi; j += 2) {
        auto& row = in_cur_[j];
        const size_t nrow = row.size();
        for (size_t i = 0; i < nrow; ++i) {
            const u128 n = row[i];
            if (n == 0) continue;
            SumResult br = dist_.sample_sum(n, rng_, opts_.n_exact, opts_.strict);
            approx_ |= br.approx;
            const u128 K = br.value;
            if (K == 0) continue;
            any_born = true;
            if (j == 0) {
                if (r_ == 0) {
                    // no resolved vertices besides the root: everything is outside
                    if (m_recv_hi >= 1) {
                        out_nxt_[0][0] = sat_add(out_nxt_[0][0], K, sat_);
                        any_next = true;
                    }
                    continue;
                }
                split_uniform(rng_, K, d_, buf.data(), opts_.n_exact, approx_, opts_.strict);
                for (int c = 0; c < d_; ++c) {
                    if (buf[c] == 0) continue;
                    in_nxt_[1][c] = sat_add(in_nxt_[1][c], buf[c], sat_);
                    if (cen) from_par_[1][c] = sat_add(from_par_[1][c], buf[c], sat_);
                    any_next = true;
                }
            } else {
                const u128 up = binomial_u128(rng_, K, inv_d, opts_.n_exact, approx_, opts_.strict);
                const u128 rest = K - up;
                if (up > 0) {
                    const uint64_t pi = parent_index(d_, j, i);
                    in_nxt_[j - 1][pi] = sat_add(in_nxt_[j - 1][pi], up, sat_);
                    if (cen) up_[j][i] = sat_add(up_[j][i], up, sat_);
                    any_next = true;
                }
                if (rest == 0) continue;
                if (j < r_) {
                    split_uniform(rng_, rest, dm1, buf.data(), opts_.n_exact, approx_, opts_.strict);
                    for (int c = 0; c < dm1; ++c) {
                        if (buf[c] == 0) continue;
                        const uint64_t ci = child_index(d_, i, c);
                        in_nxt_[j + 1][ci] = sat_add(in_nxt_[j + 1][ci], buf[c], sat_);
                        if (cen) from_par_[j + 1][ci] = sat_add(from_par_[j + 1][ci], buf[c], sat_);
                        any_next = true;
                    }
                } else {
                    // boundary: the d-1 non-parent directions all leave B(r)
                    if (m_recv_hi >= 1) {
                        out_nxt_[0][i] = sat_add(out_nxt_[0][i], rest, sat_);
                        any_next = true;
                    }
                    if (cen) down_into_[i][1] = sat_add(down_into_[i][1], rest, sat_);
                }
            }
        }
    }

    // outside sources: excess-depth bands with the live parity
    const int m_src_hi = std::min<int>(int(out_cur_.size()), t_ - r_);
    for (int m = 1; m <= m_src_hi; ++m) {
        if ((r_ + m - t_) % 2 != 0) continue;
        auto& layer = out_cur_[m - 1];
        const size_t nz = layer.size();
        for (size_t z = 0; z < nz; ++z) {
            const u128 n = layer[z];
            if (n == 0) continue;
            SumResult br = dist_.sample_sum(n, rng_, opts_.n_exact, opts_.strict);
            approx_ |= br.approx;
            const u128 K = br.value;
            if (K == 0) continue;
            any_born = true;
            const u128 up = binomial_u128(rng_, K, inv_d, opts_.n_exact, approx_, opts_.strict);
            const u128 down = K - up;
            if (up > 0) {
                if (m == 1) {
                    in_nxt_[r_][z] = sat_add(in_nxt_[r_][z], up, sat_);
                } else {
                    out_nxt_[m - 2][z] = sat_add(out_nxt_[m - 2][z], up, sat_);
                }
                any_next = true;
            }
            if (down > 0) {
                if (m + 1 <= m_recv_hi) {
                    out_nxt_[m][z] = sat_add(out_nxt_[m][z], down, sat_);
                    any_next = true;
                }
                if (cen && m + 1 <= 2 * census_->k_max)
                    down_into_[z][m + 1] = sat_add(down_into_[z][m + 1], down, sat_);
            }
        }
    }

    // census: flows u->v with d(v,z) = 2k + r - tp, d(u,z) one less, are
    // exactly the k-th away-steps relative to z (path-independence of the
    // away-count); sum them into F
    if (cen) {
        const auto& T = *census_;
        const size_t nz = T.shell.size();
        for (size_t zi = 0; zi < nz; ++zi) {
            for (int k = 1; k <= T.k_max; ++k) {
                const int D = 2 * k + r_ - tp;
                if (D < 1 || D > T.Dmax) continue;
                u128 acc = 0;
                for (const auto& e : T.by_dist[zi][size_t(D)]) {
                    const u128 v =
                        e.from_parent ? from_par_[e.depth][e.index] : up_[e.depth][e.index];
                    acc = sat_add(acc, v, sat_);
                }
                for (size_t wi = 0; wi < nz; ++wi) {
                    const int m = D - T.zz[zi][wi];
                    if (m >= 1 && m <= 2 * T.k_max)
                        acc = sat_add(acc, down_into_[wi][m], sat_);
                }
                if (acc != 0) F_[zi][k - 1] = sat_add(F_[zi][k - 1], acc, sat_);
            }
        }
    }

    // first arrivals on the freshly written parity slices
    if (unhit_ > 0) {
        for (int j = tp & 1; j <= std::min(tp, r_); j += 2) {
            if (unhit_depth_[j] == 0) continue;
            auto& nx = in_nxt_[j];
            auto& h = H_[j];
            for (size_t i = 0; i < nx.size(); ++i) {
                if (nx[i] != 0 && h[i] < 0) {
                    h[i] = tp;
                    --unhit_depth_[j];
                    --unhit_;
                }
            }
        }
        if (unhit_ == 0 && cover_time_ < 0) cover_time_ = tp;
    }

    if (!any_born)
        extinct_ = true;
    else if (!any_next)
        field_empty_ = true;

    in_cur_.swap(in_nxt_);
    out_cur_.swap(out_nxt_);
    t_ = tp;
}

HittingRecord FieldSim::take_hits() {
    HittingRecord rec;
    rec.r = r_;
    rec.horizon = horizon_;
    rec.cover_time = cover_time_;
    rec.extinct = extinct_ && cover_time_ < 0;
    rec.saturated = sat_;
    rec.approx = approx_ || sat_;
    rec.unhit = unhit_;
    rec.H = std::move(H_);
    for (int j = 0; j <= r_; ++j) {
        for (int32_t h : rec.H[j]) {
            if (h < 0) continue;
            if ((h - j) % 2 != 0) ++rec.parity_violations;
            if (h < j) ++rec.floor_violations;
        }
    }
    return rec;
}

std::vector<int64_t> nested_cover_times(const HittingRecord& rec) {
    std::vector<int64_t> out(rec.H.size(), -1);
    int64_t running = 0;
    bool censored = false;
    for (size_t j = 0; j < rec.H.size(); ++j) {
        for (int32_t h : rec.H[j]) {
            if (h < 0) censored = true;
            else running = std::max<int64_t>(running, h);
        }
        out[j] = censored ? -1 : running;
    }
    return out;
}

HittingRecord run_cover(int r, int horizon_slack, const OffspringDist& dist, int d,
                        Philox& rng, const FieldOpts& opts) {
    if (horizon_slack < 0) throw std::invalid_argument("run_cover: slack must be >= 0");
    FieldSim sim(r, r + horizon_slack, dist, d, rng, opts);
    while (sim.t() < sim.horizon() && !sim.done()) sim.step();
    return sim.take_hits();
}

CensusRecord census_run(const CensusTables& tables, const OffspringDist& dist,
                        int horizon_slack, Philox& rng, const FieldOpts& opts) {
    const int r = tables.r;
    if (horizon_slack < 2 * tables.k_max)
        throw std::invalid_argument("census_run: slack must cover the census window 2*k_max");
    FieldSim sim(r, r + horizon_slack, dist, tables.d, rng, opts, &tables);
    while (sim.t() < sim.horizon() && !sim.done()) sim.step();

    CensusRecord rec;
    const size_t nz = tables.shell.size();
    rec.zs.resize(nz);
    HittingRecord hits = sim.take_hits();
    for (size_t zi = 0; zi < nz; ++zi) {
        auto& zr = rec.zs[zi];
        const int32_t h = hits.H[size_t(r)][zi];
        zr.hit_time = h;
        zr.min_away = h < 0 ? -1 : (h - r) / 2;
        zr.f.resize(size_t(tables.k_max));
        zr.y_zero.resize(size_t(tables.k_max));
        for (int k = 1; k <= tables.k_max; ++k) {
            zr.f[k - 1] = sim.census_f(zi, k);
            // no arrival with fewer than k away-steps  <=>  H(z) >= r + 2k,
            // counting an unhit z (h < 0) as slow for every k
            zr.y_zero[k - 1] = (h < 0 || h >= r + 2 * k) ? 1 : 0;
        }
    }
    rec.hits = std::move(hits);
    return rec;
}

// -------------------------------------------------------------------------
// banded single-target hitting
// -------------------------------------------------------------------------

HitBandSample run_hitting_single(int L, int k_band, const OffspringDist& dist, int d,
                                 Philox& rng, uint64_t n_exact, bool strict) {
    if (L < 0 || k_band < 0) throw std::invalid_argument("hitting: L and k_band must be >= 0");
    if (d < 2) throw std::invalid_argument("hitting: d out of range");
    HitBandSample out;
    if (L == 0) {
        out.H = 0;
        return out;
    }
    const int horizon = L + 2 * k_band;
    const double inv_d = 1.0 / d;
    std::vector<u128> cur(size_t(k_band) + 1, 0), nxt(size_t(k_band) + 1, 0);
    cur[0] = 1;
    for (int t = 0; t < horizon; ++t) {
        std::fill(nxt.begin(), nxt.end(), u128(0));
        bool any = false;
        for (int a = 0; a <= k_band; ++a) {
            const u128 n = cur[a];
            if (n == 0) continue;
            const int m = L + 2 * a - t;  // distance to the target in band a
            SumResult br = dist.sample_sum(n, rng, n_exact, strict);
            out.approx |= br.approx;
            const u128 K = br.value;
            if (K == 0) continue;
            const u128 toward = binomial_u128(rng, K, inv_d, n_exact, out.approx, strict);
            if (toward > 0) {
                if (m == 1) {
                    out.H = t + 1;
                    return out;
                }
                nxt[a] = sat_add(nxt[a], toward, out.saturated);
                any = true;
            }
            if (a + 1 <= k_band && K > toward) {
                nxt[a + 1] = sat_add(nxt[a + 1], K - toward, out.saturated);
                any = true;
            }
        }
        if (!any) return out;  // extinct or everything left the band
        cur.swap(nxt);
    }
    return out;
}

// -------------------------------------------------------------------------
// per-particle genealogy runs
// -------------------------------------------------------------------------

GenealogyTables make_genealogy_tables(int d, int r, int k_max) {
    if (d < 2 || d > 16) throw std::invalid_argument("genealogy: d out of range");
    if (r < 1 || r > 6)
        throw std::invalid_argument("genealogy: per-particle distance tables are only kept for r <= 6");
    if (k_max < 1 || k_max > 8) throw std::invalid_argument("genealogy: k_max must be in [1,8]");
    GenealogyTables T;
    T.d = d;
    T.r = r;
    T.k_max = k_max;
    T.depth_cap = r + 2 * k_max;
    T.nz = shell_size(d, r);
    u128 cells = 0;
    bool sat = false;
    for (int j = 0; j <= T.depth_cap; ++j)
        cells = sat_add(cells, sat_mul(u128(shell_size(d, j)), T.nz, sat), sat);
    if (sat || cells > u128(200'000'000ull))
        throw std::runtime_error("genealogy: distance table too large for these (d, r, k_max)");
    T.shell.reserve(T.nz);
    for (uint64_t i = 0; i < T.nz; ++i) T.shell.push_back(vertex_at(d, r, i));
    T.dz.resize(size_t(T.depth_cap) + 1);
    for (int j = 0; j <= T.depth_cap; ++j) {
        const uint64_t n = shell_size(d, j);
        T.dz[j].resize(size_t(n) * T.nz);
        for (uint64_t i = 0; i < n; ++i)
            for (size_t zi = 0; zi < T.nz; ++zi)
                T.dz[j][size_t(i) * T.nz + zi] =
                    uint8_t(index_distance(d, j, i, r, uint64_t(zi)));
    }
    return T;
}

PerParticleResult per_particle_run(const GenealogyTables& T, u128 n0,
                                   const OffspringDist& dist, Philox& rng,
                                   const PerParticleOpts& opts) {
    const int d = T.d, r = T.r, k_max = T.k_max;
    const int horizon = T.depth_cap;
    const size_t nz = T.nz;
    const size_t wpk = (nz + 63) / 64;       // mask words per k
    const size_t wpp = wpk * size_t(k_max);  // mask words per particle

    if (n0 > opts.particle_cap)
        throw std::runtime_error("per-particle run: initial population exceeds the particle cap");

    PerParticleResult res;
    res.y.assign(nz, std::vector<u128>(size_t(k_max), 0));
    res.f.assign(nz, std::vector<u128>(size_t(k_max), 0));
    res.hits.r = r;
    res.hits.horizon = horizon;
    res.hits.H.resize(size_t(r) + 1);
    uint64_t unhit = 0;
    for (int j = 0; j <= r; ++j) {
        res.hits.H[j].assign(shell_size(d, j), -1);
        unhit += shell_size(d, j);
    }
    res.hits.H[0][0] = 0;
    unhit -= 1;

    std::vector<int32_t> depth, depth_nxt;
    std::vector<uint64_t> idx, idx_nxt;
    std::vector<uint64_t> masks, masks_nxt;
    const uint64_t n0u = to_u64_clamped(n0);
    depth.assign(n0u, 0);
    idx.assign(n0u, 0);
    masks.assign(size_t(n0u) * wpp, ~uint64_t(0));
    if (nz % 64 != 0) {
        // clear the unused tail bits of each k-mask
        const uint64_t tail = (uint64_t(1) << (nz % 64)) - 1;
        for (size_t p = 0; p < n0u; ++p)
            for (int kk = 0; kk < k_max; ++kk)
                masks[(p * size_t(k_max) + size_t(kk)) * wpk + (wpk - 1)] = tail;
    }

    bool sat = false;
    const uint64_t cap64 = to_u64_clamped(opts.particle_cap);
    int t = 0;
    while (!depth.empty()) {
        const int tp = t + 1;
        depth_nxt.clear();
        idx_nxt.clear();
        masks_nxt.clear();
        const size_t np = depth.size();
        for (size_t p = 0; p < np; ++p) {
            const uint64_t nchild = dist.sample_one(rng);
            const int j = depth[p];
            const uint64_t i = idx[p];
            const uint64_t* pm = masks.data() + p * wpp;
            for (uint64_t c = 0; c < nchild; ++c) {
                const uint32_t dir = rng.below(uint32_t(d));
                int jc;
                uint64_t ic;
                if (j == 0) {
                    jc = 1;
                    ic = dir;
                } else if (dir == 0) {
                    jc = j - 1;
                    ic = parent_index(d, j, i);
                } else {
                    jc = j + 1;
                    ic = child_index(d, i, int(dir) - 1);
                }
                if (jc <= r && res.hits.H[jc][ic] < 0) {
                    res.hits.H[jc][ic] = tp;
                    --unhit;
                }
                bool alive = false;
                const size_t base = masks_nxt.size();
                masks_nxt.insert(masks_nxt.end(), pm, pm + wpp);
                uint64_t* cm = masks_nxt.data() + base;
                const uint8_t* dzrow = T.dz[jc].data() + size_t(ic) * nz;
                for (int kk = 0; kk < k_max; ++kk) {
                    uint64_t* kw = cm + size_t(kk) * wpk;
                    for (size_t w = 0; w < wpk; ++w) {
                        uint64_t bits = kw[w];
                        while (bits) {
                            const unsigned b = unsigned(__builtin_ctzll(bits));
                            bits &= bits - 1;
                            const size_t zi = w * 64 + b;
                            const int D = dzrow[zi];
                            if (D == 0) {
                                // arrival while the lineage is unfrozen: its
                                // away-count is necessarily still below k+1
                                res.y[zi][kk] = sat_add(res.y[zi][kk], 1, sat);
                                kw[w] &= ~(uint64_t(1) << b);
                            } else if ((tp + D - r) / 2 == kk + 1) {
                                res.f[zi][kk] = sat_add(res.f[zi][kk], 1, sat);
                                kw[w] &= ~(uint64_t(1) << b);
                            }
                        }
                        alive |= kw[w] != 0;
                    }
                }
                if (alive || (opts.record_hits && tp < horizon)) {
                    depth_nxt.push_back(jc);
                    idx_nxt.push_back(ic);
                    if (depth_nxt.size() > cap64)
                        throw std::runtime_error(
                            "per-particle run: particle cap exceeded at t=" + std::to_string(tp));
                } else {
                    masks_nxt.resize(base);
                }
            }
        }
        depth.swap(depth_nxt);
        idx.swap(idx_nxt);
        masks.swap(masks_nxt);
        t = tp;
        if (t >= horizon) break;  // every freeze bit is structurally dead by now
    }

    res.hits.unhit = unhit;
    res.hits.saturated = sat;
    res.hits.approx = sat;
    if (unhit == 0) {
        int32_t cov = 0;
        for (auto& row : res.hits.H)
            for (int32_t h : row) cov = std::max(cov, h);
        res.hits.cover_time = cov;
    }
    for (int j = 0; j <= r; ++j) {
        for (int32_t h : res.hits.H[j]) {
            if (h < 0) continue;
            if ((h - j) % 2 != 0) ++res.hits.parity_violations;
            if (h < j) ++res.hits.floor_violations;
        }
    }
    return res;
}

} // namespace brw
