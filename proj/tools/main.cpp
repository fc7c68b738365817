// collegium: a deterministic collegial-panel engine for legal judgment
// prediction with an evolving dual-layer jurisprudential memory.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "collegium/demo.hpp"
#include "collegium/driver.hpp"
#include "collegium/errors.hpp"

using namespace collegium;

namespace {

struct CommonFlags {
    std::string config_path;
    bool no_memory = false;
    uint64_t seed = 0;
    bool seed_set = false;
    int concurrency = 0;
};

RunConfig load_with_overrides(const CommonFlags& flags) {
    RunConfig config = load_config(flags.config_path);
    if (flags.no_memory) config.panel.memory_enabled = false;
    if (flags.seed_set) config.seed = flags.seed;
    if (flags.concurrency > 0) config.concurrency = flags.concurrency;
    return config;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "run configuration file")->required();
    cmd->add_flag("--no-memory", flags.no_memory,
                  "disable memory injection (ablation mode)");
    cmd->add_option("--seed", flags.seed, "random seed override")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--concurrency", flags.concurrency, "concurrent case bound");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collegium judicial panel engine"};
    app.require_subcommand(1);

    CommonFlags infer_flags;
    auto* infer = app.add_subcommand("infer", "run the panel over a corpus");
    add_common(infer, infer_flags);

    CommonFlags evolve_flags;
    bool evolve_force = false;
    auto* evolve = app.add_subcommand("evolve", "run one memory evolution cycle");
    add_common(evolve, evolve_flags);
    evolve->add_flag("--force", evolve_force, "fire regardless of the batch threshold");

    CommonFlags align_flags;
    auto* align =
        app.add_subcommand("build-alignment-data", "distill SFT/fault/preference files");
    add_common(align, align_flags);

    CommonFlags eval_flags;
    std::string predictions_path;
    auto* evaluate = app.add_subcommand("evaluate", "score a predictions file");
    add_common(evaluate, eval_flags);
    evaluate->add_option("--predictions", predictions_path, "predictions.jsonl path")
        ->required();

    std::string trace_path;
    auto* replay = app.add_subcommand("replay", "verify a recorded case trace");
    replay->add_option("trace", trace_path, "trace file")->required();

    CommonFlags ingest_flags;
    auto* ingest = app.add_subcommand("ingest-statutes", "validate a statute file");
    add_common(ingest, ingest_flags);

    std::string demo_dir;
    auto* demo_init =
        app.add_subcommand("demo-init", "write the bundled synthetic demo corpus");
    demo_init->add_option("dir", demo_dir, "target directory")->required();

    std::string prompts_dir;
    auto* init_prompts =
        app.add_subcommand("init-prompts", "write the editable prompt templates");
    init_prompts->add_option("dir", prompts_dir, "target directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*infer) {
            const RunConfig config = load_with_overrides(infer_flags);
            auto world = load_world(config);
            const InferReport report = cmd_infer(config, *world);
            std::cout << "cases=" << report.cases << " evaluated=" << report.evaluated
                      << " skipped=" << report.skipped << " archived=" << report.archived
                      << " buffered=" << report.buffered
                      << " evolution_cycles=" << report.evolution_cycles << "\n";
            if (report.has_metrics) std::cout << report.metrics.to_table();
            return report.skipped == 0 ? 0 : 1;
        }
        if (*evolve) {
            const RunConfig config = load_with_overrides(evolve_flags);
            auto world = load_world(config);
            const EvolveOutcome outcome = cmd_evolve(config, *world, evolve_force);
            if (!outcome.ran) {
                std::cout << "below batch threshold; nothing to do\n";
                return 0;
            }
            std::cout << outcome.report.to_json().dump(2) << "\n";
            return 0;
        }
        if (*align) {
            const RunConfig config = load_with_overrides(align_flags);
            auto world = load_world(config);
            const AlignmentReport report = cmd_build_alignment_data(config, *world);
            std::cout << "sft=" << report.distill.sft_count
                      << " faults=" << report.distill.fault_count
                      << " skipped=" << report.distill.skipped
                      << " corrected=" << report.corrected << " pairs=" << report.pairs
                      << "\n";
            return 0;
        }
        if (*evaluate) {
            const RunConfig config = load_with_overrides(eval_flags);
            const MetricsReport report = cmd_evaluate(config, predictions_path);
            std::cout << report.to_table();
            return 0;
        }
        if (*replay) {
            const ReplayReport report = cmd_replay(trace_path);
            if (report.ok) {
                std::cout << "PASS: " << report.message << "\n";
                return 0;
            }
            std::cout << "DIVERGENCE at seq " << report.first_divergence_seq << ": "
                      << report.message << "\n";
            return 1;
        }
        if (*ingest) {
            const RunConfig config = load_with_overrides(ingest_flags);
            auto embedder = make_embedding_provider(config.embedding);
            const StatuteLibrary library =
                StatuteLibrary::load_file(config.paths.statutes, embedder);
            std::cout << "loaded " << library.size() << " statutes\n";
            return 0;
        }
        if (*demo_init) {
            demo::write_bundle(demo_dir);
            std::cout << "demo bundle written to " << demo_dir << "\n";
            return 0;
        }
        if (*init_prompts) {
            PromptLibrary::builtin().write_dir(prompts_dir);
            std::cout << "templates written to " << prompts_dir << "\n";
            return 0;
        }
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
