#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ideabench/analysis.hpp"
#include "ideabench/experiment.hpp"

using namespace ideabench;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<std::string> backend;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

ExperimentConfig load_config(const GlobalArgs& args) {
    ExperimentConfig cfg = ExperimentConfig::load(args.config_path);
    if (args.backend) {
        if (*args.backend == "sim") cfg.backend = BackendKind::sim;
        else if (*args.backend == "live") cfg.backend = BackendKind::live;
        else throw ConfigError("unknown backend: " + *args.backend);
    }
    if (args.seed) {
        cfg.seed = *args.seed;
        cfg.bootstrap.rng_seed = *args.seed;
    }
    if (args.out_dir) cfg.out_dir = *args.out_dir;
    cfg.validate();
    return cfg;
}

void add_global_flags(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--backend", args.backend, "Backend override: sim or live");
    cmd->add_option("--seed", args.seed, "Seed override");
    cmd->add_option("--out", args.out_dir, "Output directory override");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ideabench: generate ideation sessions, categorize them, and report "
                 "diversity / fixation / partitioning statistics"};
    app.require_subcommand(1);

    GlobalArgs args;
    bool resume = false;
    bool pipeline = false;
    std::string corpus_path;
    std::vector<double> temperatures;
    std::string cosine_a, cosine_b;

    auto* gen = app.add_subcommand("generate", "Run ideation sessions and write the corpus");
    add_global_flags(gen, args);
    gen->add_flag("--resume", resume, "Keep sessions already present in the output corpus");

    auto* cat = app.add_subcommand("categorize", "Label a corpus against the category scheme");
    add_global_flags(cat, args);
    cat->add_option("--corpus", corpus_path, "Corpus to label (JSONL)")->required();
    cat->add_flag("--pipeline", pipeline,
                  "Build the scheme from raw ideas (3-stage pipeline) instead of the fixed scheme");

    auto* ana = app.add_subcommand("analyze", "Compute diversity, fixation and partitioning reports");
    add_global_flags(ana, args);
    ana->add_option("--corpus", corpus_path, "Labeled corpus (JSONL)")->required();

    auto* sweep = app.add_subcommand("sweep", "Generate + analyze once per temperature value");
    add_global_flags(sweep, args);
    sweep->add_option("--temperature", temperatures, "Temperature values")->required();

    auto* cosine = app.add_subcommand("cosine", "Embed two texts and print their cosine similarity");
    add_global_flags(cosine, args);
    cosine->add_option("--a", cosine_a, "First text")->required();
    cosine->add_option("--b", cosine_b, "Second text")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto cfg = load_config(args);
            const auto result = cmd_generate(cfg, resume);
            std::cout << "wrote " << result.sessions << " sessions to " << result.corpus_path
                      << "\n";
            for (const auto& f : result.failures) std::cerr << "session failed: " << f << "\n";
        } else if (cat->parsed()) {
            const auto cfg = load_config(args);
            const auto result = cmd_categorize(cfg, corpus_path, pipeline);
            std::cout << "labeled " << result.labeled << " ideas -> " << result.corpus_path << "\n";
            for (const auto& f : result.flagged) std::cerr << "flagged: " << f << "\n";
        } else if (ana->parsed()) {
            const auto cfg = load_config(args);
            const auto result = cmd_analyze(cfg, corpus_path);
            for (const auto& p : result.report_paths) std::cout << "report: " << p << "\n";
        } else if (sweep->parsed()) {
            const auto cfg = load_config(args);
            const auto result = cmd_sweep_temperature(cfg, temperatures);
            std::cout << "report: " << result.report_path << "\n";
        } else if (cosine->parsed()) {
            const auto cfg = load_config(args);
            auto backend = make_backend(cfg);
            auto gateway = make_gateway(cfg, backend);
            const auto va = gateway->embed_text(cosine_a);
            const auto vb = gateway->embed_text(cosine_b);
            std::cout << "cosine similarity: " << cosine_similarity(va.values, vb.values) << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
