#include "collegium/driver.hpp"

#include <filesystem>
#include <fstream>
#include <future>

#include "collegium/errors.hpp"

namespace collegium {

namespace {

const char* kWorkflowRoles[] = {"clerk", "assistant", "case_judge", "supervisor",
                                "presiding", "meta", "reflector"};

std::string sanitize_id(const std::string& id) {
    std::string out;
    for (const char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
                   ? c
                   : '_';
    return out;
}

long load_cycles_run(const std::string& memory_dir) {
    std::ifstream in(memory_dir + "/evolution_meta.json");
    if (!in) return 0;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) return 0;
    return j.value("cycles_run", 0L);
}

void append_cycle_log(const RunConfig& config, const CycleReport& report) {
    if (config.paths.output_dir.empty()) return;
    std::filesystem::create_directories(config.paths.output_dir);
    std::ofstream out(config.paths.output_dir + "/evolution_log.jsonl", std::ios::app);
    out << report.to_json().dump() << "\n";
}

std::shared_ptr<AgentBackend> backend_for(const RunConfig& config, const std::string& key,
                                          AgentRole role) {
    const auto it = config.backends.find(key);
    if (it == config.backends.end()) return nullptr;
    return make_backend(it->second, role);
}

}  // namespace

PanelEnvironment World::panel_env(const RunConfig& config) const {
    PanelEnvironment env;
    env.prompts = &prompts;
    env.backends = const_cast<BackendSet*>(&backends);
    env.library = &library;
    env.archive = archive.get();
    env.directives = directives.get();
    env.embedder = embedder.get();
    env.panel = config.panel;
    env.seed_k = config.seed_k;
    env.hops = config.hops;
    env.scoring = config.scoring;
    return env;
}

void World::save_memory(const RunConfig& config) const {
    if (config.paths.memory_dir.empty()) return;
    archive->save(config.paths.memory_dir);
    directives->save(config.paths.memory_dir);
    std::ofstream out(config.paths.memory_dir + "/evolution_meta.json");
    out << nlohmann::json{{"cycles_run", evolution->cycles_run()}}.dump(2) << "\n";
}

std::unique_ptr<World> load_world(const RunConfig& config) {
    validate_config(config);
    auto world = std::make_unique<World>();
    world->embedder = make_embedding_provider(config.embedding);
    if (!config.paths.statutes.empty())
        world->library = StatuteLibrary::load_file(config.paths.statutes, world->embedder);
    world->prompts = config.paths.prompts_dir.empty()
                         ? PromptLibrary::builtin()
                         : PromptLibrary::from_dir(config.paths.prompts_dir);
    const std::string memory_dir = config.paths.memory_dir;
    world->archive = std::make_unique<StandardsArchive>(
        memory_dir.empty()
            ? StandardsArchive(world->embedder, config.archive, config.binning())
            : StandardsArchive::load(memory_dir, world->embedder, config.archive,
                                     config.binning()));
    world->directives = std::make_unique<DirectiveBase>(
        memory_dir.empty()
            ? DirectiveBase(world->embedder, config.directives)
            : DirectiveBase::load(memory_dir, world->embedder, config.directives));
    for (const char* role_key : kWorkflowRoles) {
        const auto it = config.backends.find(role_key);
        if (it != config.backends.end())
            world->backends[role_from_name(role_key)] =
                make_backend(it->second, role_from_name(role_key));
    }
    world->evolution = std::make_unique<EvolutionEngine>(
        config.evolution, &world->prompts, world->embedder);
    if (!memory_dir.empty())
        world->evolution->set_cycles_run(load_cycles_run(memory_dir));
    return world;
}

InferReport cmd_infer(const RunConfig& config, World& world) {
    const std::vector<CaseRecord> corpus = load_corpus(config.paths.corpus);
    InferReport report;
    report.cases = static_cast<int>(corpus.size());

    const std::string out_dir =
        config.paths.output_dir.empty() ? "." : config.paths.output_dir;
    const std::string trace_dir = out_dir + "/traces";
    std::filesystem::create_directories(trace_dir);

    std::ofstream predictions(out_dir + "/predictions.jsonl");
    if (!predictions)
        throw Error(ErrorKind::Io, "cannot write " + out_dir + "/predictions.jsonl");

    auto meta_it = world.backends.find(AgentRole::Meta);
    AgentBackend* meta =
        meta_it == world.backends.end() ? nullptr : meta_it->second.get();

    // Cases within a wave run concurrently over the memory state frozen at
    // the wave start; traces, archiving and evolution still land in corpus
    // order. Pop-order backends force sequential waves.
    size_t wave = std::max(1, config.concurrency);
    for (const auto& [role, backend] : world.backends)
        if (!backend->concurrent_safe()) wave = 1;

    struct CaseOutcome {
        std::optional<CaseResult> result;
        Trace abort_trace;
    };

    std::vector<std::pair<CaseResult, Verdict>> scored;
    const PanelEnvironment env = world.panel_env(config);
    auto execute = [&env](const CaseRecord& record) {
        CaseOutcome outcome;
        try {
            outcome.result = run_case(record, env);
        } catch (const CaseAbortError& abort) {
            outcome.abort_trace = abort.trace();
        }
        return outcome;
    };

    for (size_t begin = 0; begin < corpus.size(); begin += wave) {
        const size_t end = std::min(begin + wave, corpus.size());
        std::vector<CaseOutcome> outcomes(end - begin);
        if (wave == 1) {
            outcomes[0] = execute(corpus[begin]);
        } else {
            std::vector<std::future<CaseOutcome>> futures;
            for (size_t i = begin; i < end; ++i)
                futures.push_back(std::async(std::launch::async, execute,
                                             std::cref(corpus[i])));
            for (size_t i = 0; i < futures.size(); ++i) outcomes[i] = futures[i].get();
        }

        for (size_t i = begin; i < end; ++i) {
            const CaseRecord& record = corpus[i];
            CaseOutcome& outcome = outcomes[i - begin];
            const std::string trace_path =
                trace_dir + "/" + sanitize_id(record.id) + ".jsonl";
            if (!outcome.result) {
                write_trace(trace_path, outcome.abort_trace);
                ++report.skipped;
                continue;
            }
            const CaseResult& result = *outcome.result;
            write_trace(trace_path, result.trace);
            report.trace_files.push_back(trace_path);

            predictions << nlohmann::json{
                               {"case_id", result.case_id},
                               {"verdict", verdict_to_json(result.verdict)},
                               {"ranked_articles", result.ranked_articles},
                               {"turns_used", result.turns_used},
                               {"final_flag", final_flag_name(result.final_flag)}}
                               .dump()
                        << "\n";

            if (record.gold) {
                scored.emplace_back(result, *record.gold);
                if (config.archive_enabled) {
                    const ArchiveResult archived = world.archive->archive_trajectory(
                        record, reasoning_trace_text(result), result.verdict);
                    if (archived.outcome == ArchiveOutcome::Archived)
                        ++report.archived;
                    else
                        ++report.buffered;
                    if (meta && world.evolution->maybe_trigger(*world.archive)) {
                        const CycleReport cycle = world.evolution->run_cycle(
                            *world.archive, *world.directives, *meta);
                        append_cycle_log(config, cycle);
                        ++report.evolution_cycles;
                    }
                }
            }
        }
    }

    report.evaluated = static_cast<int>(scored.size());
    if (!scored.empty()) {
        EvalOptions options;
        options.binning = config.binning();
        report.metrics = evaluate(scored, report.skipped, options);
        report.has_metrics = true;
        std::ofstream metrics_out(out_dir + "/metrics.json");
        metrics_out << report.metrics.to_json().dump(2) << "\n";
    }
    world.save_memory(config);
    return report;
}

EvolveOutcome cmd_evolve(const RunConfig& config, World& world, bool force) {
    EvolveOutcome outcome;
    auto meta_it = world.backends.find(AgentRole::Meta);
    if (meta_it == world.backends.end())
        throw Error(ErrorKind::Config, "no meta backend configured");
    if (force)
        world.evolution->force_trigger(*world.archive);
    else if (!world.evolution->maybe_trigger(*world.archive))
        return outcome;
    outcome.ran = true;
    outcome.report =
        world.evolution->run_cycle(*world.archive, *world.directives, *meta_it->second);
    append_cycle_log(config, outcome.report);
    world.save_memory(config);
    return outcome;
}

AlignmentReport cmd_build_alignment_data(const RunConfig& config, World& world) {
    const std::vector<CaseRecord> corpus = load_corpus(config.paths.corpus);
    const std::string out_dir =
        config.paths.output_dir.empty() ? "." : config.paths.output_dir;
    std::filesystem::create_directories(out_dir);

    AlignmentReport report;
    report.sft_path = out_dir + "/sft.jsonl";
    report.faults_path = out_dir + "/faults.jsonl";
    report.pairs_path = out_dir + "/dpo_pairs.jsonl";

    auto teacher = backend_for(config, "teacher", AgentRole::CaseJudge);
    auto expert = backend_for(config, "expert", AgentRole::CaseJudge);
    auto reflector = backend_for(config, "reflector", AgentRole::Reflector);
    if (!teacher) {
        const auto it = world.backends.find(AgentRole::CaseJudge);
        if (it != world.backends.end()) teacher = it->second;
    }
    if (!expert) {
        const auto it = world.backends.find(AgentRole::CaseJudge);
        if (it != world.backends.end()) expert = it->second;
    }
    if (!reflector) {
        const auto it = world.backends.find(AgentRole::Reflector);
        if (it != world.backends.end()) reflector = it->second;
    }
    if (!teacher || !expert || !reflector)
        throw Error(ErrorKind::Config,
                    "alignment needs teacher, expert and reflector backends");

    std::ofstream sft_out(report.sft_path);
    std::ofstream fault_out(report.faults_path);
    std::vector<FaultRecord> faults;
    report.distill =
        distill_sft_set(corpus, *teacher, world.library, world.prompts,
                        config.alignment_candidates, sft_out, fault_out, &faults);

    std::vector<ReflectionTrajectory> trajectories;
    for (const FaultRecord& fault : faults) {
        try {
            trajectories.push_back(reflection_loop(fault, *reflector, *expert,
                                                   world.library, world.prompts,
                                                   config.max_reflections));
        } catch (const Error&) {
            continue;  // backend failure: trajectory excluded from pairs
        }
    }
    report.trajectories = static_cast<int>(trajectories.size());
    for (const ReflectionTrajectory& t : trajectories)
        if (t.corrected_at) ++report.corrected;

    const std::vector<PreferencePair> pairs =
        build_preference_pairs(trajectories, world.library, world.prompts);
    report.pairs = static_cast<int>(pairs.size());
    std::ofstream pairs_out(report.pairs_path);
    for (const PreferencePair& pair : pairs)
        pairs_out << pair_to_json(pair).dump() << "\n";
    return report;
}

ReplayReport cmd_replay(const std::string& trace_path) {
    return replay_trace_file(trace_path);
}

MetricsReport cmd_evaluate(const RunConfig& config, const std::string& predictions_path) {
    const std::vector<CaseRecord> corpus = load_corpus(config.paths.corpus);
    std::map<std::string, Verdict> gold;
    for (const CaseRecord& record : corpus)
        if (record.gold) gold[record.id] = *record.gold;

    std::ifstream in(predictions_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open predictions " + predictions_path);
    std::vector<std::pair<CaseResult, Verdict>> scored;
    std::string line;
    int skipped = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        const auto it = gold.find(j.at("case_id").get<std::string>());
        if (it == gold.end()) {
            ++skipped;
            continue;
        }
        CaseResult result;
        result.case_id = it->first;
        result.verdict = verdict_from_json(j.at("verdict"));
        for (const auto& a : j.at("ranked_articles"))
            result.ranked_articles.push_back(a.get<int>());
        scored.emplace_back(std::move(result), it->second);
    }
    EvalOptions options;
    options.binning = config.binning();
    return evaluate(scored, skipped, options);
}

}  // namespace collegium
