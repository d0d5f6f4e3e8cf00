#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brw/experiment.hpp"
#include "brw/rng.hpp"
#include "brw/scales.hpp"
#include "brw/stats.hpp"
#include "brw/svg.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

using namespace brw;
namespace fs = std::filesystem;
using nlohmann::json;

static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

static fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

TEST_CASE("lower scale ladder: anchors, shape, validation") {
    auto ls = lower_scales(2.0, 0.1, 5);
    CHECK(ls.n[0] == doctest::Approx(3.031433133).epsilon(1e-8));
    CHECK(ls.p[0] == doctest::Approx(0.9659363289).epsilon(1e-8));
    CHECK(ls.R[0] == doctest::Approx(1.515716567).epsilon(1e-8));
    CHECK(!ls.overflow);
    for (int k = 1; k < 5; ++k) {
        CHECK(ls.n[k] > ls.n[k - 1]);
        CHECK(ls.p[k] < ls.p[k - 1]);
        CHECK(ls.R[k] > ls.R[k - 1]);
        CHECK(ls.p[k] > 0.0);
    }
    CHECK_THROWS(lower_scales(1.0, 0.1, 3));
    CHECK_THROWS(lower_scales(2.0, 0.25, 3));
    CHECK_THROWS(lower_scales(2.0, 0.0, 3));
}

TEST_CASE("upper scale ladder: anchors, persistence invariant") {
    auto us = upper_scales(0.1, 1.0, 2);
    CHECK(us.N[0] == doctest::Approx(448.168907).epsilon(1e-8));
    CHECK(us.N[1] == doctest::Approx(948.7735836).epsilon(1e-8));
    CHECK(us.R[0] == doctest::Approx(0.0));
    CHECK(us.R[1] == doctest::Approx(0.1 * std::sqrt(448.168907)).epsilon(1e-8));
    // R_2 + 2 = 4.12 <= 2 a sqrt(N_1) = 4.23 at these constants...
    CHECK(us.invariant_ok);
    CHECK(!us.overflow);
    // ...but the slack is gone by k = 3 (the +k term dominates at desk scale),
    // which the ladder reports rather than hides
    CHECK(!upper_scales(0.1, 1.0, 3).invariant_ok);
    auto us5 = upper_scales(0.1, 1.0, 5);
    for (int k = 1; k < 5; ++k) CHECK(us5.N[k] > us5.N[k - 1]);
    CHECK_THROWS(upper_scales(0.0, 1.0, 3));
    CHECK_THROWS(upper_scales(0.1, 1.5, 3));
}

TEST_CASE("wilson intervals: anchors and basic shape") {
    // exact anchor at z = 1.96; the library constant kZ95 is the true
    // 97.5% quantile 1.95996..., a hair tighter, so compare loosely there
    auto ci196 = wilson(0, 100, 1.96);
    CHECK(ci196.lo == doctest::Approx(0.0));
    CHECK(ci196.hi == doctest::Approx(0.03699480748).epsilon(1e-8));
    auto ci = wilson(0, 100, kZ95);
    CHECK(ci.lo == doctest::Approx(0.0));
    CHECK(ci.hi == doctest::Approx(0.037).epsilon(1e-3));
    auto ci99 = wilson(0, 100, kZ99);
    CHECK(ci99.hi == doctest::Approx(0.06222068772).epsilon(1e-8));

    auto mid = wilson(50, 100, kZ95);
    CHECK(mid.lo == doctest::Approx(1.0 - mid.hi).epsilon(1e-12));
    CHECK(mid.lo < 0.5);
    CHECK(mid.hi > 0.5);

    auto full = wilson(100, 100, kZ95);
    CHECK(full.hi == doctest::Approx(1.0));
    CHECK(full.lo == doctest::Approx(1.0 - wilson(0, 100, kZ95).hi).epsilon(1e-9));

    auto none = wilson(0, 0, kZ95);
    CHECK(none.lo == 0.0);
    CHECK(none.hi == 1.0);
    CHECK_THROWS(wilson(5, 4, kZ95));
}

TEST_CASE("summarize: small exact case") {
    auto s = summarize({1.0, 2.0, 3.0, 6.0});
    CHECK(s.n == 4);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.var == doctest::Approx(14.0 / 3));
    CHECK(s.se == doctest::Approx(std::sqrt(14.0 / 3 / 4)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 6.0);
}

TEST_CASE("compare_samples: identical, same-law, and disjoint inputs") {
    std::vector<int64_t> a, b, c;
    Philox rng(41, 0);
    for (int i = 0; i < 20000; ++i) {
        a.push_back(int64_t(rng.below(6)) + int64_t(rng.below(6)));
        b.push_back(int64_t(rng.below(6)) + int64_t(rng.below(6)));
        c.push_back(100);
    }
    auto same = compare_samples(a, a);
    CHECK(same.tv == doctest::Approx(0.0));
    CHECK(same.p == doctest::Approx(1.0));

    auto law = compare_samples(a, b);
    CHECK(law.tv < 0.03);
    CHECK(law.p > 0.001);

    auto far = compare_samples(a, c);
    CHECK(far.tv > 0.9);
    CHECK(far.p < 1e-6);

    CHECK_THROWS(compare_samples({}, a));
}

TEST_CASE("experiment config: kv round trip, unknown keys rejected") {
    ExperimentConfig cfg;
    cfg.mode = "census";
    cfg.d = 4;
    cfg.dist = "poisson:4";
    cfg.seed = 987654321;
    cfg.replicas = 17;
    cfg.r = 5;
    cfg.gamma = 1.25;
    cfg.strict_exact = true;
    auto kv = to_kv(cfg);
    ExperimentConfig back = config_from_kv(kv);
    CHECK(to_kv(back) == kv);
    CHECK(back.mode == "census");
    CHECK(back.gamma == doctest::Approx(1.25));
    CHECK(back.strict_exact);
    CHECK_THROWS(config_from_kv({{"no_such_key", "1"}}));
}

TEST_CASE("svg chart writer emits well-formed, self-contained markup") {
    fs::path p = fs::temp_directory_path() / "brw_chart_test.svg";
    SvgSeries s1{"alpha", {{1, 2}, {2, 3}, {3, 2.5}}, ""};
    SvgSeries s2{"beta", {{1, 0.5}, {2, 5}, {3, 4}}, ""};
    write_line_chart(p.string(), "title text", "x label", "y label", {s1, s2});
    std::string svg = slurp(p);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("title text") != std::string::npos);
    CHECK(svg.find("alpha") != std::string::npos);
    // self-contained: the xmlns URI is just a namespace name, but there must
    // be no scripts or resource references
    CHECK(svg.find("<script") == std::string::npos);
    CHECK(svg.find("href=") == std::string::npos);
    CHECK(svg.find("url(") == std::string::npos);

    CHECK_THROWS(write_line_chart(p.string(), "t", "x", "y", {}));
}

TEST_CASE("cover runs are byte-identical across worker counts") {
    std::string csv1;
    for (int threads : {1, 4, 8}) {
        fs::path dir = fresh_dir("brw_det_t" + std::to_string(threads));
        ExperimentConfig cfg;
        cfg.mode = "cover";
        cfg.r = 2;
        cfg.replicas = 48;
        cfg.threads = threads;
        cfg.slack = 20;
        cfg.seed = 5150;
        cfg.out = dir.string();
        REQUIRE(run_experiment(cfg) == 0);
        std::string body = slurp(dir / "cover.csv");
        if (threads == 1) {
            csv1 = body;
            CHECK(!csv1.empty());
        } else {
            CHECK(body == csv1);
        }
    }
}

TEST_CASE("cover mode: artifacts, finite-size estimate within its bracket") {
    fs::path dir = fresh_dir("brw_cover_smoke");
    ExperimentConfig cfg;
    cfg.mode = "cover";
    cfg.r = 8;
    cfg.replicas = 60;
    cfg.slack = 60;
    cfg.out = dir.string();
    REQUIRE(run_experiment(cfg) == 0);

    json j = json::parse(slurp(dir / "summary.json"));
    CHECK(j["version"] == kArtifactVersion);
    CHECK(j["config"]["mode"] == "cover");
    auto& per_r = j["results"]["per_r"];
    REQUIRE(per_r.size() == 1);
    double c_hat = per_r[0]["c_hat"].get<double>();
    CHECK(c_hat > 0.8656);
    CHECK(c_hat < 19.74);
    CHECK(per_r[0]["parity_or_floor_violations"].get<uint64_t>() == 0);

    std::string svg = slurp(dir / "excess_vs_r.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);

    std::string csv = slurp(dir / "cover.csv");
    CHECK(csv.rfind("replica,r,cover_time,censored,extinct,approx_flag,seed", 0) == 0);
}

TEST_CASE("hit mode: one-step probability lands in its own interval") {
    fs::path dir = fresh_dir("brw_hit_smoke");
    ExperimentConfig cfg;
    cfg.mode = "hit";
    cfg.L = 1;
    cfg.k = 0;
    cfg.replicas = 3000;
    cfg.out = dir.string();
    REQUIRE(run_experiment(cfg) == 0);
    json j = json::parse(slurp(dir / "summary.json"));
    auto& body = j["results"];
    CHECK(body["parity_violations"].get<uint64_t>() == 0);
    auto& band0 = body["bands"][0]["p_hit_by_L_plus_2a"];
    CHECK(band0["lo"].get<double>() <= 19.0 / 27);
    CHECK(19.0 / 27 <= band0["hi"].get<double>());
}

TEST_CASE("freeze mode: martingale summary from the CLI surface") {
    fs::path dir = fresh_dir("brw_freeze_smoke");
    ExperimentConfig cfg;
    cfg.mode = "freeze";
    cfg.L = 3;
    cfg.k = 1;
    cfg.n0 = 2;
    cfg.replicas = 4000;
    cfg.out = dir.string();
    REQUIRE(run_experiment(cfg) == 0);
    json j = json::parse(slurp(dir / "summary.json"));
    auto& body = j["results"];
    CHECK(body["event_cap_hits"].get<uint64_t>() == 0);
    double err = body["martingale_identity_check"]["abs_error"].get<double>();
    double se3 = body["martingale_identity_check"]["three_se"].get<double>();
    CHECK(err < se3 + 0.05);
}

TEST_CASE("pakes mode: moment and retransform diagnostics from the CLI surface") {
    fs::path dir = fresh_dir("brw_pakes_smoke");
    ExperimentConfig cfg;
    cfg.mode = "pakes";
    cfg.gamma = 1.0;
    cfg.out = dir.string();
    REQUIRE(run_experiment(cfg) == 0);
    json j = json::parse(slurp(dir / "summary.json"));
    auto& body = j["results"];
    CHECK(body["sigma2"].get<double>() == doctest::Approx(2.0 / 3));
    CHECK(body["mean"]["abs_err"].get<double>() < 1e-5);
    CHECK(body["second_moment"]["abs_err"].get<double>() < 1e-4);
    for (auto& rt : body["retransform_checks"])
        CHECK(rt["abs_diff"].get<double>() < 1e-4);
    // 160-point grid (plus the requested gamma when off-grid)
    std::string csv = slurp(dir / "pakes.csv");
    size_t rows = 0;
    for (char ch : csv) rows += ch == '\n';
    CHECK(rows >= 161);  // header + grid
}

TEST_CASE("remaining modes produce valid summaries") {
    struct M { const char* mode; uint64_t reps; int r, k, L; };
    for (const M& m : {M{"scales", 1, -1, 4, -1}, M{"census", 200, 2, 1, -1},
                       M{"gw-diag", 20000, -1, -1, 30}, M{"lower", 200, 2, 1, -1},
                       M{"upper", 10, -1, -1, -1}}) {
        fs::path dir = fresh_dir(std::string("brw_mode_") + m.mode);
        ExperimentConfig cfg;
        cfg.mode = m.mode;
        cfg.replicas = m.reps;
        cfg.r = m.r;
        cfg.k = m.k;
        cfg.L = m.L;
        cfg.out = dir.string();
        REQUIRE(run_experiment(cfg) == 0);
        json j = json::parse(slurp(dir / "summary.json"));
        CHECK(j["version"] == kArtifactVersion);
        CHECK(j.contains("results"));
        CHECK(j["wall_seconds"].get<double>() >= 0.0);
    }
}

TEST_CASE("unknown mode and mismatched offspring mean are rejected") {
    ExperimentConfig cfg;
    cfg.mode = "nonsense";
    CHECK_THROWS(run_experiment(cfg));
    cfg.mode = "cover";
    cfg.d = 3;
    cfg.dist = "det:4";
    cfg.out = (fs::temp_directory_path() / "brw_reject").string();
    CHECK_THROWS(run_experiment(cfg));
}
