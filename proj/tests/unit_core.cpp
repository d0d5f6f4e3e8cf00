#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brw/counts.hpp"
#include "brw/offspring.hpp"
#include "brw/rng.hpp"
#include "brw/sampling.hpp"
#include "brw/tree.hpp"

#include <cmath>
#include <map>
#include <set>
#include <vector>

using namespace brw;

TEST_CASE("u128 helpers saturate and stick") {
    bool sat = false;
    CHECK(sat_add(u128(3), u128(4), sat) == u128(7));
    CHECK(!sat);
    CHECK(sat_add(U128_MAX, u128(1), sat) == U128_MAX);
    CHECK(sat);
    sat = false;
    CHECK(sat_mul(U128_MAX / 2, u128(3), sat) == U128_MAX);
    CHECK(sat);
    // sticky: a later exact op must not clear it
    sat_mul(u128(2), u128(2), sat);
    CHECK(sat);

    sat = false;
    u128 v = from_ld(1e30L, sat);
    CHECK(!sat);
    CHECK(std::fabs(double(to_ld(v)) - 1e30) / 1e30 < 1e-14);
    CHECK(from_ld(4e38L, sat) == U128_MAX);
    CHECK(sat);
    sat = false;
    CHECK(from_ld(-3.0L, sat) == 0);

    CHECK(to_u64_clamped(u128(1) << 80) == UINT64_MAX);
    CHECK(to_u64_clamped(u128(77)) == 77);
}

TEST_CASE("philox known answers (Random123 vectors)") {
    uint32_t out[4];
    const uint32_t z4[4] = {0, 0, 0, 0}, z2[2] = {0, 0};
    Philox::block4(z4, z2, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    const uint32_t f4[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
    const uint32_t f2[2] = {0xffffffffu, 0xffffffffu};
    Philox::block4(f4, f2, out);
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    const uint32_t pi4[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
    const uint32_t pi2[2] = {0xa4093822u, 0x299f31d0u};
    Philox::block4(pi4, pi2, out);
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("philox streams: reproducible, distinct, URBG-compatible") {
    Philox a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool same_ab = true, diff_c = false, diff_d = false;
    for (int i = 0; i < 64; ++i) {
        uint64_t va = a.next_u64();
        same_ab &= (va == b.next_u64());
        diff_c |= (va != c.next_u64());
        diff_d |= (va != d.next_u64());
    }
    CHECK(same_ab);
    CHECK(diff_c);
    CHECK(diff_d);

    CHECK(Philox::min() == 0);
    CHECK(Philox::max() == UINT64_MAX);
}

TEST_CASE("below() is uniform (chi-square at 7 bins)") {
    Philox rng(2024, 0);
    const int nb = 7;
    const int n = 70000;
    int cnt[nb] = {0};
    for (int i = 0; i < n; ++i) ++cnt[rng.below(nb)];
    double chi2 = 0, e = double(n) / nb;
    for (int j = 0; j < nb; ++j) chi2 += (cnt[j] - e) * (cnt[j] - e) / e;
    CHECK(chi2 < 22.46);  // df=6 at p=0.001
    CHECK(rng.below(1) == 0);
}

TEST_CASE("uniform() and normal() moments") {
    Philox rng(5, 5);
    const int n = 100000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        su += rng.uniform();
        double g = rng.normal();
        sn += g;
        sn2 += g * g;
    }
    CHECK(std::fabs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12 / n));
    CHECK(std::fabs(sn / n) < 4.0 / std::sqrt(double(n)));
    CHECK(std::fabs(sn2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("binomial_u128: edges, moments, fallback flag") {
    Philox rng(9, 1);
    bool approx = false;
    CHECK(binomial_u128(rng, 0, 0.5, 1000, approx, false) == 0);
    CHECK(binomial_u128(rng, 100, 0.0, 1000, approx, false) == 0);
    CHECK(binomial_u128(rng, 100, 1.0, 1000, approx, false) == 100);
    CHECK(!approx);

    const int reps = 3000;
    const uint64_t K = 30000;
    double s = 0;
    for (int i = 0; i < reps; ++i) s += double(to_u64_clamped(binomial_u128(rng, K, 1.0 / 3, 1u << 20, approx, false)));
    CHECK(!approx);
    double se = std::sqrt(double(K) * (1.0 / 3) * (2.0 / 3) / reps);
    CHECK(std::fabs(s / reps - double(K) / 3) < 4.5 * se);

    // above the exact window: flagged, and strict mode refuses
    binomial_u128(rng, u128(10'000'000), 0.5, 1'000'000, approx, false);
    CHECK(approx);
    CHECK_THROWS_AS(binomial_u128(rng, u128(10'000'000), 0.5, 1'000'000, approx, true),
                    StrictExactViolation);
}

TEST_CASE("split_uniform conserves mass and is fair") {
    Philox rng(11, 3);
    bool approx = false;
    const u128 K = 90000;
    u128 out[3];
    double acc[3] = {0, 0, 0};
    const int reps = 400;
    for (int i = 0; i < reps; ++i) {
        split_uniform(rng, K, 3, out, 1u << 20, approx, false);
        CHECK(out[0] + out[1] + out[2] == K);
        for (int j = 0; j < 3; ++j) acc[j] += double(to_u64_clamped(out[j]));
    }
    CHECK(!approx);
    double se = std::sqrt(30000.0 * (2.0 / 3) / reps);
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(acc[j] / reps - 30000.0) < 4.5 * se);
}

TEST_CASE("nb_half: mean z, variance 2z") {
    Philox rng(13, 0);
    const uint64_t z = 50;
    const int reps = 20000;
    double s = 0, s2 = 0;
    for (int i = 0; i < reps; ++i) {
        double v = double(rng.nb_half(z));
        s += v;
        s2 += v * v;
    }
    double mean = s / reps, var = s2 / reps - mean * mean;
    CHECK(std::fabs(mean - double(z)) < 4.0 * std::sqrt(2.0 * z / reps));
    CHECK(std::fabs(var - 2.0 * z) < 0.15 * 2.0 * z);
    CHECK(rng.nb_half(0) == 0);
}

TEST_CASE("tree: neighborhood structure on B(4)") {
    for (int d : {3, 4}) {
        std::vector<VertexId> ball{VertexId{}};
        for (int r = 1; r <= 4; ++r)
            for (auto& v : subtree_shell(VertexId{}, double(r), d)) ball.push_back(v);
        CHECK(ball.size() == size_t(to_u64_clamped(ball_size(d, 4))));
        for (const auto& v : ball) {
            auto nb = neighbors(v, d);
            CHECK(int(nb.size()) == d);
            std::set<std::string> uniq;
            for (auto& u : nb) {
                CHECK(tree_distance(u, v) == 1);
                uniq.insert(u.to_string());
            }
            CHECK(uniq.size() == nb.size());
            CHECK(tree_distance(VertexId{}, v) == v.depth());
            if (!v.is_root()) {
                // exactly one neighbor is closer to the root
                int closer = 0;
                for (auto& u : nb) closer += tree_distance(VertexId{}, u) < v.depth();
                CHECK(closer == 1);
                CHECK(neighbor_toward(v, VertexId{}) == v.parent());
            }
        }
    }
}

TEST_CASE("tree: toward-neighbor is unique for arbitrary targets") {
    for (int d : {3, 4}) {
        auto shell5 = subtree_shell(VertexId{}, 5.0, d);
        Philox rng(1, 1);
        for (int trial = 0; trial < 40; ++trial) {
            const VertexId& z = shell5[rng.below(shell5.size())];
            VertexId v = shell5[rng.below(shell5.size())];
            if (v == z) continue;
            int dv = tree_distance(v, z), closer = 0;
            for (auto& u : neighbors(v, d)) closer += tree_distance(u, z) == dv - 1;
            CHECK(closer == 1);
            CHECK(tree_distance(neighbor_toward(v, z), z) == dv - 1);
        }
    }
}

TEST_CASE("tree: depth-index round trips and index_distance") {
    for (int d : {3, 4}) {
        for (int j = 0; j <= 4; ++j) {
            const uint64_t sz = shell_size(d, j);
            for (uint64_t i = 0; i < sz; ++i) {
                VertexId v = vertex_at(d, j, i);
                CHECK(v.depth() == j);
                CHECK(index_of(d, v) == i);
            }
        }
        Philox rng(3, 3);
        for (int trial = 0; trial < 60; ++trial) {
            int j1 = int(rng.below(5)), j2 = int(rng.below(5));
            uint64_t i1 = rng.below(shell_size(d, j1));
            uint64_t i2 = rng.below(shell_size(d, j2));
            CHECK(index_distance(d, j1, i1, j2, i2) ==
                  tree_distance(vertex_at(d, j1, i1), vertex_at(d, j2, i2)));
        }
    }
}

TEST_CASE("tree: shell/ball counts, degenerate d=2, overflow guard") {
    CHECK(shell_size(3, 0) == 1);
    CHECK(shell_size(3, 1) == 3);
    CHECK(shell_size(3, 5) == 3 * 16);
    CHECK(to_u64_clamped(ball_size(3, 6)) == 1 + 3 * (1 + 2 + 4 + 8 + 16 + 32));
    // d=2 is the line: two shell vertices at every radius
    CHECK(shell_size(2, 1) == 2);
    CHECK(shell_size(2, 9) == 2);
    CHECK(to_u64_clamped(ball_size(2, 9)) == 19);
    CHECK_THROWS_AS(shell_size(16, 60), std::overflow_error);

    // subtree shells: fractional radius floors, non-root loses one branch
    VertexId x = VertexId{}.child(1);
    CHECK(subtree_shell(x, 2.0, 3).size() == 4);
    CHECK(subtree_shell(x, 2.9, 3).size() == 4);
    CHECK(subtree_shell(VertexId{}, 2.0, 3).size() == 6);
    CHECK(subtree_shell(x, 0.0, 3).size() == 1);
}

TEST_CASE("offspring laws: moments, pgf, parsing") {
    auto det = OffspringDist::parse("det:3");
    auto poi = OffspringDist::parse("poisson:3");
    auto geo = OffspringDist::parse("geom:3");
    auto tab = OffspringDist::parse("table:0=0.5,6=0.5");

    CHECK(det.mean() == doctest::Approx(3.0));
    CHECK(det.variance() == doctest::Approx(0.0));
    CHECK(poi.variance() == doctest::Approx(3.0));
    CHECK(geo.variance() == doctest::Approx(12.0));
    CHECK(tab.mean() == doctest::Approx(3.0));
    CHECK(tab.variance() == doctest::Approx(9.0));

    for (const auto* dist : {&det, &poi, &geo, &tab}) {
        CHECK(double(dist->pgf(1.0L)) == doctest::Approx(1.0));
        long double prev = dist->pgf(0.0L);
        for (int i = 1; i <= 10; ++i) {
            long double cur = dist->pgf(0.1L * i);
            CHECK(cur >= prev);
            prev = cur;
        }
        CHECK(double(dist->survival_step(0.0L)) == doctest::Approx(0.0));
        // round trip through the spec string
        auto back = OffspringDist::parse(dist->spec_string());
        CHECK(back.mean() == doctest::Approx(dist->mean()));
        CHECK(back.variance() == doctest::Approx(dist->variance()));
    }

    CHECK_THROWS(OffspringDist::parse("bogus:1"));
    CHECK_THROWS(OffspringDist::parse("det"));
    CHECK_THROWS(OffspringDist::parse("table:0=0.4,1=0.4"));  // not normalized
}

TEST_CASE("thinning: closed forms and criticality") {
    auto det3 = OffspringDist::parse("det:3");
    auto thin = det3.thin(1.0 / 3);
    CHECK(thin.mean() == doctest::Approx(1.0));
    CHECK(thin.variance() == doctest::Approx(2.0 / 3));
    CHECK(thin.is_critical());
    CHECK(thin.pmf(0) == doctest::Approx(8.0 / 27));
    CHECK(thin.pmf(1) == doctest::Approx(4.0 / 9));
    CHECK(thin.pmf(2) == doctest::Approx(2.0 / 9));
    CHECK(thin.pmf(3) == doctest::Approx(1.0 / 27));

    auto poi1 = OffspringDist::parse("poisson:3").thin(1.0 / 3);
    CHECK(poi1.kind() == OffKind::poisson);
    CHECK(poi1.mean() == doctest::Approx(1.0));
    CHECK(poi1.variance() == doctest::Approx(1.0));

    auto geo1 = OffspringDist::parse("geom:3").thin(1.0 / 3);
    CHECK(geo1.kind() == OffKind::geometric);
    CHECK(geo1.mean() == doctest::Approx(1.0));
    CHECK(geo1.variance() == doctest::Approx(2.0));

    // kappa = 1 - f(1/d)
    CHECK(det3.kappa(3) == doctest::Approx(1.0 - 1.0 / 27));
    CHECK(OffspringDist::parse("poisson:3").kappa(3) ==
          doctest::Approx(1.0 - std::exp(-2.0)));
}

TEST_CASE("sample_sum: exact paths match the laws") {
    Philox rng(77, 0);
    const u128 n = 1000;
    auto det = OffspringDist::parse("det:3");
    auto r = det.sample_sum(n, rng);
    CHECK(r.value == u128(3000));
    CHECK(!r.approx);

    struct Case { const char* spec; double var1; };
    for (const Case& cs : {Case{"poisson:3", 3.0}, Case{"geom:3", 12.0},
                           Case{"table:0=0.5,6=0.5", 9.0}}) {
        auto dist = OffspringDist::parse(cs.spec);
        const int reps = 2000;
        double s = 0;
        for (int i = 0; i < reps; ++i) {
            auto rr = dist.sample_sum(n, rng);
            CHECK(!rr.approx);
            s += double(to_u64_clamped(rr.value));
        }
        double se = std::sqrt(cs.var1 * double(uint64_t(n)) / reps);
        CHECK(std::fabs(s / reps - 3.0 * double(uint64_t(n))) < 4.5 * se);
    }
}

TEST_CASE("sample_sum: gaussian fallback flags, strict throws, det stays exact") {
    Philox rng(78, 0);
    auto poi = OffspringDist::parse("poisson:3");
    auto r = poi.sample_sum(u128(50), rng, /*n_exact=*/10, /*strict=*/false);
    CHECK(r.approx);
    CHECK_THROWS_AS(poi.sample_sum(u128(50), rng, 10, true), StrictExactViolation);
    auto geo = OffspringDist::parse("geom:3");
    CHECK(geo.sample_sum(u128(50), rng, 10, false).approx);
    auto det = OffspringDist::parse("det:3");
    auto rd = det.sample_sum(u128(1) << 90, rng, 10, true);  // additive, never approximate
    CHECK(!rd.approx);
    CHECK(rd.value == (u128(1) << 90) * 3);
}

TEST_CASE("sample_one: moments per kind") {
    Philox rng(99, 0);
    for (const char* spec : {"det:3", "poisson:3", "geom:3", "table:0=0.5,6=0.5"}) {
        auto dist = OffspringDist::parse(spec);
        const int reps = 40000;
        double s = 0, s2 = 0;
        for (int i = 0; i < reps; ++i) {
            double v = double(dist.sample_one(rng));
            s += v;
            s2 += v * v;
        }
        double mean = s / reps;
        CHECK(std::fabs(mean - 3.0) < 4.5 * std::sqrt(dist.variance() / reps) + 1e-12);
        double var = s2 / reps - mean * mean;
        CHECK(std::fabs(var - dist.variance()) < 0.1 * dist.variance() + 1e-12);
    }
}
