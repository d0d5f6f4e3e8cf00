#include "brw/freeze.hpp"

#include <map>
#include <stdexcept>

#include "brw/sampling.hpp"

namespace brw {

// thrown when a run generates more births than its cap; callers convert it
// into terminated=false so pathological laws surface as data, not hangs
struct CapHit {};

static void bump_events(u128& events, u128 add, u128 cap) {
    bool sat = false;
    events = sat_add(events, add, sat);
    if (sat || events > cap) throw CapHit{};
}

std::pair<FreezeOutcome, FrozenConfig>
freeze_tree(const std::vector<std::pair<VertexId, u128>>& initial,
            const VertexId& target, int k, const OffspringDist& dist, int d,
            Philox& rng, const FreezeOpts& opts) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (initial.empty()) throw std::invalid_argument("initial configuration is empty");

    FreezeOutcome out;
    std::map<std::pair<int, std::string>, u128> cur;  // (away, path) -> count
    std::map<std::pair<std::string, int>, u128> frozen_away;
    bool sat = false;

    for (const auto& [pos, n] : initial) {
        if (n == 0) continue;
        out.s = sat_add(out.s, n, sat);
        if (pos == target)
            out.y = sat_add(out.y, n, sat);  // frozen on arrival
        else
            cur[{0, pos.path}] += n;
    }

    u128 events = 0;
    std::vector<u128> parts;
    try {
    while (!cur.empty()) {
        std::map<std::pair<int, std::string>, u128> nxt;
        for (const auto& [key, n] : cur) {
            const auto& [away, path] = key;
            VertexId pos{path};
            SumResult children = dist.sample_sum(n, rng, opts.n_exact, opts.strict);
            out.approx = out.approx || children.approx;
            u128 K = children.value;
            if (K == 0) continue;
            bump_events(events, K, opts.event_cap);
            out.s = sat_add(out.s, K, sat);

            auto nbrs = neighbors(pos, d);
            parts.assign(nbrs.size(), 0);
            split_uniform(rng, K, int(nbrs.size()), parts.data(), opts.n_exact,
                          out.approx, opts.strict);
            int dist_here = tree_distance(pos, target);
            for (size_t c = 0; c < nbrs.size(); ++c) {
                if (parts[c] == 0) continue;
                const VertexId& nb = nbrs[c];
                bool stepped_away = tree_distance(nb, target) > dist_here;
                int a2 = away + (stepped_away ? 1 : 0);
                if (opts.watch && nb == *opts.watch && a2 <= opts.watch_max_away)
                    out.watch_hits = sat_add(out.watch_hits, parts[c], sat);
                if (nb == target) {
                    // arrivals are toward-steps, so a2 == away < k here
                    out.y = sat_add(out.y, parts[c], sat);
                } else if (a2 == k) {
                    out.f = sat_add(out.f, parts[c], sat);
                    frozen_away[{nb.path, a2}] += parts[c];
                } else {
                    nxt[{a2, nb.path}] += parts[c];
                }
            }
        }
        cur.swap(nxt);
    }
    } catch (const CapHit&) {
        out.terminated = false;  // counts below are the partial tallies
    }
    out.approx = out.approx || sat;

    FrozenConfig cfg;
    cfg.at_target = out.y;
    cfg.away_frozen.reserve(frozen_away.size());
    for (const auto& [key, n] : frozen_away)
        cfg.away_frozen.push_back({VertexId{key.first}, key.second, n});
    return {out, cfg};
}

FreezeOutcome freeze_1d(int L, int k, u128 n0, const OffspringDist& dist,
                        int d, Philox& rng, const FreezeOpts& opts) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (L < 0) throw std::invalid_argument("L must be >= 0");
    if (n0 == 0) throw std::invalid_argument("n0 must be >= 1");

    FreezeOutcome out;
    bool sat = false;
    out.s = n0;
    if (L == 0) {
        out.y = n0;
        return out;
    }

    // alive cells: m in 1..L+k-1 reachable, away in 0..k-1
    const int mmax = L + k;
    auto idx = [&](int a, int m) { return size_t(a) * size_t(mmax + 1) + size_t(m); };
    std::vector<u128> cur(size_t(k) * size_t(mmax + 1), 0), nxt(cur.size(), 0);
    cur[idx(0, L)] = n0;

    u128 events = 0;
    bool any = true;
    try {
    while (any) {
        any = false;
        std::fill(nxt.begin(), nxt.end(), u128(0));
        for (int a = 0; a < k; ++a) {
            for (int m = 1; m <= mmax; ++m) {
                u128 n = cur[idx(a, m)];
                if (n == 0) continue;
                SumResult children = dist.sample_sum(n, rng, opts.n_exact, opts.strict);
                out.approx = out.approx || children.approx;
                u128 K = children.value;
                if (K == 0) continue;
                bump_events(events, K, opts.event_cap);
                out.s = sat_add(out.s, K, sat);
                u128 toward = binomial_u128(rng, K, 1.0 / d, opts.n_exact,
                                            out.approx, opts.strict);
                u128 away = K - toward;
                if (m - 1 == 0) {
                    out.y = sat_add(out.y, toward, sat);
                } else if (toward > 0) {
                    nxt[idx(a, m - 1)] += toward;
                    any = true;
                }
                if (away > 0) {
                    if (a + 1 == k) {
                        out.f = sat_add(out.f, away, sat);
                    } else {
                        nxt[idx(a + 1, m + 1)] += away;
                        any = true;
                    }
                }
            }
        }
        cur.swap(nxt);
    }
    } catch (const CapHit&) {
        out.terminated = false;
    }
    out.approx = out.approx || sat;
    return out;
}

std::pair<FreezeOutcome, FrozenConfig>
freeze_chain(const FrozenConfig& frozen, const VertexId& new_target,
             const OffspringDist& dist, int d, Philox& rng,
             const FreezeOpts& opts) {
    if (frozen.at_target != 0)
        throw std::invalid_argument("freeze_chain requires a configuration whose "
                                    "target was never reached (Y-part must be zero)");
    if (frozen.away_frozen.empty())
        return {FreezeOutcome{}, FrozenConfig{}};

    std::vector<std::pair<VertexId, u128>> initial;
    initial.reserve(frozen.away_frozen.size());
    for (const auto& cell : frozen.away_frozen)
        initial.emplace_back(cell.pos, cell.count);  // away-counts reset
    return freeze_tree(initial, new_target, 1, dist, d, rng, opts);
}

} // namespace brw
