#include "nemytskii/config.hpp"
#include "nemytskii/coefficients.hpp"
#include "nemytskii/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void apply_thread_cap() {
    const char* env = std::getenv("NEMYTSKII_THREADS");
    if (!env || !*env) {
        return;
    }
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) {
        std::cerr << "warning: ignoring NEMYTSKII_THREADS='" << env << "' (need a positive integer)\n";
        return;
    }
#ifdef _OPENMP
    omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_max_threads())));
#endif
}

int cmd_run(const std::string& path, const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
    nemytskii::Scenario sc;
    try {
        sc = nemytskii::load_config(path);
    } catch (const nemytskii::Error& e) {
        std::cerr << e.what() << '\n';
        return nemytskii::kExitError;
    }
    nemytskii::RunOptions opt;
    opt.output_dir = out_dir;
    opt.seed_override = seed;
    const auto outcome = nemytskii::run_scenario(sc, opt);
    for (const auto& p : outcome.artifacts) {
        std::cout << "wrote " << p.string() << '\n';
    }
    switch (outcome.exit_code) {
        case nemytskii::kExitOk:
            std::cout << sc.name << ": all checks passed\n";
            break;
        case nemytskii::kExitCheckFailed:
            std::cout << sc.name << ": some checks failed (see report.ndjson)\n";
            break;
        default:
            std::cerr << sc.name << ": error: " << outcome.error << '\n';
    }
    return outcome.exit_code;
}

int cmd_check_hypotheses(const std::string& path) {
    try {
        const auto sc = nemytskii::load_config(path);
        const auto report =
            nemytskii::check_hypotheses(nemytskii::make_nonlinearity(sc), nemytskii::make_drift(sc));
        for (const auto& c : report.clauses) {
            std::cout << (c.passed ? "PASS " : (c.advisory ? "WARN " : "FAIL ")) << c.id;
            if (!c.witness.empty()) {
                std::cout << "  (" << c.witness << ")";
            }
            std::cout << '\n';
        }
        return report.all_passed() ? nemytskii::kExitOk : nemytskii::kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return nemytskii::kExitError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"Numerical laboratory for degenerate nonlinear Fokker-Planck equations "
                 "and their McKean-Vlasov particle systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
    run->add_option("config", config_path, "Path to a key = value config file")->required();
    run->add_option("--output-dir", out_dir, "Directory for report and CSV artifacts");
    run->add_option("--seed", seed, "Override the config seed");

    app.add_subcommand("list-scenarios", "Print the available scenario names");

    std::string hyp_path;
    auto* hyp = app.add_subcommand("check-hypotheses", "Check the structural hypotheses of a config");
    hyp->add_option("config", hyp_path, "Path to a key = value config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : nemytskii::kExitError;
    }

    if (*run) {
        return cmd_run(config_path, out_dir, seed);
    }
    if (*hyp) {
        return cmd_check_hypotheses(hyp_path);
    }
    for (const auto& name : nemytskii::scenario_names()) {
        std::cout << name << '\n';
    }
    return 0;
}
