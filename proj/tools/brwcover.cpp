// command-line front end: one positional mode + flat flags, so a key=value
// config file can drive everything and flags override it
#include "CLI11.hpp"
#include "brw/experiment.hpp"

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    brw::ExperimentConfig cfg;
    CLI::App app{"Monte Carlo laboratory for branching random walk on the d-regular tree"};

    const std::vector<std::string> modes = {"cover",  "hit",   "freeze", "census", "gw-diag",
                                            "pakes",  "scales", "lower",  "upper"};
    app.add_option("mode", cfg.mode,
                   "cover | hit | freeze | census | gw-diag | pakes | scales | lower | upper")
        ->required()
        ->check(CLI::IsMember(modes))
        ->configurable(true);

    app.add_option("--d", cfg.d, "tree degree (2..16)")->capture_default_str();
    app.add_option("--dist", cfg.dist,
                   "offspring law: det:D | poisson:D | geom:D | table:j=p,... (mean must be d)")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "base seed; replica i draws from stream i")
        ->capture_default_str();
    app.add_option("--replicas,--reps", cfg.replicas, "independent replicas")
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (outputs are thread-count invariant)")
        ->capture_default_str();
    app.add_option("--out", cfg.out, "output directory, created if missing")
        ->capture_default_str();
    app.add_option("--r", cfg.r, "ball radius (cover/census/lower); -1 picks the mode default");
    app.add_option("--k", cfg.k,
                   "freeze budget / band half-width / deepest k, by mode; -1 picks the default");
    app.add_option("--L", cfg.L,
                   "target distance (hit/freeze) or generation count (gw-diag); -1 = default");
    app.add_option("--n0", cfg.n0, "initial particle count at the start vertex (freeze)");
    app.add_option("--gamma", cfg.gamma, "extra tail evaluation point (pakes)");
    app.add_option("--slack", cfg.slack, "simulation horizon slack beyond r (cover/census/lower)");
    app.add_flag("--strict-exact", cfg.strict_exact,
                 "fail loudly instead of using Gaussian count approximations");
    app.add_option("--n-exact", cfg.n_exact,
                   "largest trial count sampled exactly before the Gaussian fallback");
    app.add_option("--mem-budget", cfg.mem_budget, "count-field memory budget in bytes");
    app.set_config("--config", "", "key=value file with the same keys as the flags");

    CLI11_PARSE(app, argc, argv);

    try {
        return brw::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
