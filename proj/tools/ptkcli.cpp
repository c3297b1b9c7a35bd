#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ptk/experiment.hpp"

namespace {

int run_verb(const std::string& pipeline, const std::string& config_path,
             std::uint64_t seed, bool seed_given, const std::string& out_dir,
             long long samples, int depth) {
    ptk::ExperimentConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read " << config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = ptk::parse_config(ss.str());
    }
    cfg.pipeline = pipeline;
    if (seed_given) {
        cfg.seed = seed;
        cfg.seed_set = true;
    }
    if (!cfg.seed_set) {
        std::cerr << "seed required (config or --seed)\n";
        return 2;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (samples > 0) cfg.samples = samples;
    if (depth > 0) cfg.depth = depth;

    auto rec = ptk::run_pipeline(cfg);
    for (const auto& [name, value] : rec.metrics)
        std::cout << name << " = " << value << "\n";
    for (const auto& [name, ok] : rec.verdicts)
        std::cout << name << ": " << (ok ? "pass" : "FAIL") << "\n";
    return rec.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"potential-theory experiment harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, record_dir;
    std::uint64_t seed = 0;
    long long samples = 0;
    int depth = 0;

    std::string chosen;
    for (const char* verb :
         {"cantor", "champagne", "verify", "hausdorff", "full"}) {
        auto* sub = app.add_subcommand(verb, std::string("run the ") + verb +
                                                 " pipeline");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "RNG seed (overrides config)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--samples", samples, "MC sample count");
        sub->add_option("--depth", depth, "construction depth");
        sub->callback([&chosen, verb] { chosen = verb; });
    }
    auto* rep = app.add_subcommand("replay", "re-run a persisted record");
    rep->add_option("--record", record_dir, "record directory")->required();
    rep->callback([&chosen] { chosen = "replay"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (chosen == "replay") {
            auto rec = ptk::replay(record_dir);
            for (const auto& [name, ok] : rec.verdicts)
                std::cout << name << ": " << (ok ? "pass" : "FAIL") << "\n";
            return rec.passed() ? 0 : 1;
        }
        bool seed_given = false;
        for (int i = 1; i < argc; ++i)
            if (std::string(argv[i]).rfind("--seed", 0) == 0) seed_given = true;
        return run_verb(chosen, config_path, seed, seed_given, out_dir, samples,
                        depth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
