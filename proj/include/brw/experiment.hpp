#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brw {

inline constexpr const char* kArtifactVersion = "0.1.0";

// One flat config for every subcommand; -1 sentinels mean "mode default".
struct ExperimentConfig {
    std::string mode = "cover";  // cover|hit|freeze|census|gw-diag|pakes|scales|lower|upper
    int d = 3;
    std::string dist = "det:3";
    uint64_t seed = 1;
    uint64_t replicas = 100;
    int threads = 1;
    std::string out = "out";
    int r = -1;           // cover radius / census radius / lower radius
    int k = -1;           // freeze k / census k_max / hit band / scales rows
    int L = -1;           // hit & freeze start distance; gw-diag generations
    uint64_t n0 = 1;      // freeze initial particles
    double gamma = -1.0;  // pakes: extra highlighted point
    int slack = 60;       // horizon slack for field runs
    bool strict_exact = false;
    uint64_t n_exact = 1'000'000;
    uint64_t mem_budget = 4ull << 30;
};

std::vector<std::pair<std::string, std::string>> to_kv(const ExperimentConfig& cfg);
ExperimentConfig config_from_kv(const std::vector<std::pair<std::string, std::string>>& kv);

// Runs the configured experiment, writing CSV/JSON/SVG into cfg.out.
// Returns a process exit code (0 on success).
int run_experiment(const ExperimentConfig& cfg);

} // namespace brw
