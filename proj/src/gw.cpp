#include "brw/gw.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace brw {

static void require_critical(const OffspringDist& dist) {
    if (!dist.is_critical())
        throw std::invalid_argument("offspring law must have mean 1 (got mean "
                                    + std::to_string(dist.mean()) + ")");
}

GWTrace simulate_gw(const OffspringDist& dist, int n_gen, u128 z0, Philox& rng,
                    uint64_t n_exact, bool strict) {
    require_critical(dist);
    if (n_gen < 0) throw std::invalid_argument("n_gen must be >= 0");
    if (z0 == 0) throw std::invalid_argument("z0 must be >= 1");
    GWTrace tr;
    tr.z.reserve(size_t(n_gen) + 1);
    tr.z.push_back(z0);
    bool sat = false;
    tr.total = z0;
    u128 cur = z0;
    for (int i = 0; i < n_gen; ++i) {
        if (cur == 0) {
            tr.z.push_back(0);
            continue;
        }
        SumResult s = dist.sample_sum(cur, rng, n_exact, strict);
        cur = s.value;
        tr.approx = tr.approx || s.approx;
        tr.z.push_back(cur);
        tr.total = sat_add(tr.total, cur, sat);
    }
    tr.approx = tr.approx || sat;
    tr.survived = tr.z.back() > 0;
    return tr;
}

bool gw_survives(const OffspringDist& dist, int n_gen, Philox& rng) {
    u128 cur = 1;
    for (int i = 0; i < n_gen && cur > 0; ++i)
        cur = dist.sample_sum(cur, rng).value;
    return cur > 0;
}

u128 gw_last_generation(const OffspringDist& dist, int n_gen, Philox& rng) {
    u128 cur = 1;
    for (int i = 0; i < n_gen && cur > 0; ++i)
        cur = dist.sample_sum(cur, rng).value;
    return cur;
}

long double pgf_survival_exact(const OffspringDist& dist, int64_t n) {
    require_critical(dist);
    long double q = 1.0L;
    for (int64_t i = 0; i < n; ++i) q = dist.survival_step(q);
    return q;
}

std::vector<long double> survival_curve(const OffspringDist& dist,
                                        const std::vector<int64_t>& ns) {
    require_critical(dist);
    std::vector<long double> out;
    out.reserve(ns.size());
    long double q = 1.0L;
    int64_t at = 0;
    for (int64_t n : ns) {
        if (n < at) throw std::invalid_argument("ns must be nondecreasing");
        for (; at < n; ++at) q = dist.survival_step(q);
        out.push_back(q);
    }
    return out;
}

TailMCResult total_progeny_tail_mc(const OffspringDist& dist, int64_t n,
                                   const std::vector<double>& gammas,
                                   uint64_t reps, Philox& rng) {
    require_critical(dist);
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");

    // integer thresholds so the per-trace compare is a u128 compare
    std::vector<u128> thresholds;
    thresholds.reserve(gammas.size());
    for (double g : gammas) {
        if (!(g > 0)) throw std::invalid_argument("gamma must be > 0");
        long double t = ceill((long double)g * (long double)n * (long double)n);
        bool sat = false;
        thresholds.push_back(from_ld(t, sat));
    }

    std::vector<uint64_t> cond_hits(gammas.size(), 0);
    std::vector<uint64_t> all_hits(gammas.size(), 0);
    uint64_t accepted = 0;

    for (uint64_t rep = 0; rep < reps; ++rep) {
        u128 cur = 1, total = 1;
        for (int64_t i = 0; i < n && cur > 0; ++i) {
            cur = dist.sample_sum(cur, rng).value;
            total += cur;
        }
        bool alive = cur > 0;
        if (alive) ++accepted;
        for (size_t gi = 0; gi < thresholds.size(); ++gi) {
            if (total >= thresholds[gi]) {
                ++all_hits[gi];
                if (alive) ++cond_hits[gi];
            }
        }
    }

    if (accepted < 100) {
        std::ostringstream msg;
        msg << "survival conditioning too thin: " << accepted << " of " << reps
            << " traces reached generation " << n << " (need >= 100)";
        throw std::runtime_error(msg.str());
    }

    TailMCResult res;
    res.reps = reps;
    res.accepted = accepted;
    for (size_t gi = 0; gi < gammas.size(); ++gi) {
        GammaTail gt;
        gt.gamma = gammas[gi];
        gt.estimate = double(cond_hits[gi]) / double(accepted);
        gt.se = std::sqrt(gt.estimate * (1.0 - gt.estimate) / double(accepted));
        gt.liminf_q = double(n) * double(all_hits[gi]) / double(reps);
        res.tails.push_back(gt);
    }
    return res;
}

} // namespace brw
