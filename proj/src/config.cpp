#include "collegium/config.hpp"

#include <filesystem>
#include <fstream>

#include "collegium/errors.hpp"

namespace collegium {

namespace {

nlohmann::json backend_to_json(const AgentBackendConfig& b) {
    nlohmann::json j{{"kind", b.kind},         {"endpoint", b.endpoint},
                     {"model", b.model},       {"temperature", b.temperature},
                     {"top_p", b.top_p},       {"api_key_env", b.api_key_env},
                     {"script", b.script}};
    return j;
}

AgentBackendConfig backend_from_json(const nlohmann::json& j) {
    AgentBackendConfig b;
    b.kind = j.value("kind", b.kind);
    b.endpoint = j.value("endpoint", b.endpoint);
    b.model = j.value("model", b.model);
    b.temperature = j.value("temperature", b.temperature);
    b.top_p = j.value("top_p", b.top_p);
    b.api_key_env = j.value("api_key_env", b.api_key_env);
    if (j.contains("script"))
        b.script = j.at("script").get<std::vector<std::string>>();
    return b;
}

}  // namespace

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json backends = nlohmann::json::object();
    for (const auto& [role, b] : c.backends) backends[role] = backend_to_json(b);
    return {
        {"paths",
         {{"statutes", c.paths.statutes},
          {"corpus", c.paths.corpus},
          {"memory_dir", c.paths.memory_dir},
          {"output_dir", c.paths.output_dir},
          {"prompts_dir", c.paths.prompts_dir}}},
        {"panel",
         {{"t_max", c.panel.t_max},
          {"coarse_k", c.panel.coarse_k},
          {"retrieve_n", c.panel.retrieve_n},
          {"memory_enabled", c.panel.memory_enabled}}},
        {"retrieval",
         {{"alpha", c.scoring.weights.alpha},
          {"beta", c.scoring.weights.beta},
          {"gamma", c.scoring.weights.gamma},
          {"normalize_topo", c.scoring.normalize_topo},
          {"seed_k", c.seed_k},
          {"hops", c.hops}}},
        {"evolution",
         {{"batch_threshold", c.evolution.batch_threshold},
          {"min_cluster_size", c.evolution.min_cluster_size},
          {"consolidation_period", c.evolution.consolidation_period},
          {"similarity_merge_threshold", c.evolution.similarity_merge_threshold}}},
        {"directives",
         {{"prune_threshold", c.directives.prune_threshold},
          {"tau_max", c.directives.tau_max},
          {"support_increment", c.directives.support_increment},
          {"decay_factor", c.directives.decay_factor},
          {"initial_confidence", c.directives.initial_confidence}}},
        {"archive", {{"tau", c.archive.tau}, {"buffer_capacity", c.archive.buffer_capacity}}},
        {"embedding",
         {{"kind", c.embedding.kind},
          {"dim", c.embedding.dim},
          {"seed", c.embedding.seed},
          {"endpoint", c.embedding.endpoint},
          {"model", c.embedding.model},
          {"api_key_env", c.embedding.api_key_env}}},
        {"backends", backends},
        {"term_bins", c.term_bins},
        {"seed", c.seed},
        {"concurrency", c.concurrency},
        {"archive_enabled", c.archive_enabled},
        {"alignment_candidates", c.alignment_candidates},
        {"max_reflections", c.max_reflections},
    };
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        c.paths.statutes = p.value("statutes", "");
        c.paths.corpus = p.value("corpus", "");
        c.paths.memory_dir = p.value("memory_dir", "");
        c.paths.output_dir = p.value("output_dir", "");
        c.paths.prompts_dir = p.value("prompts_dir", "");
    }
    if (j.contains("panel")) {
        const auto& p = j.at("panel");
        c.panel.t_max = p.value("t_max", c.panel.t_max);
        c.panel.coarse_k = p.value("coarse_k", c.panel.coarse_k);
        c.panel.retrieve_n = p.value("retrieve_n", c.panel.retrieve_n);
        c.panel.memory_enabled = p.value("memory_enabled", c.panel.memory_enabled);
    }
    if (j.contains("retrieval")) {
        const auto& r = j.at("retrieval");
        c.scoring.weights.alpha = r.value("alpha", c.scoring.weights.alpha);
        c.scoring.weights.beta = r.value("beta", c.scoring.weights.beta);
        c.scoring.weights.gamma = r.value("gamma", c.scoring.weights.gamma);
        c.scoring.normalize_topo = r.value("normalize_topo", c.scoring.normalize_topo);
        c.seed_k = r.value("seed_k", c.seed_k);
        c.hops = r.value("hops", c.hops);
    }
    if (j.contains("evolution")) {
        const auto& e = j.at("evolution");
        c.evolution.batch_threshold = e.value("batch_threshold", c.evolution.batch_threshold);
        c.evolution.min_cluster_size =
            e.value("min_cluster_size", c.evolution.min_cluster_size);
        c.evolution.consolidation_period =
            e.value("consolidation_period", c.evolution.consolidation_period);
        c.evolution.similarity_merge_threshold = e.value(
            "similarity_merge_threshold", c.evolution.similarity_merge_threshold);
    }
    if (j.contains("directives")) {
        const auto& d = j.at("directives");
        c.directives.prune_threshold = d.value("prune_threshold", c.directives.prune_threshold);
        c.directives.tau_max = d.value("tau_max", c.directives.tau_max);
        c.directives.support_increment =
            d.value("support_increment", c.directives.support_increment);
        c.directives.decay_factor = d.value("decay_factor", c.directives.decay_factor);
        c.directives.initial_confidence =
            d.value("initial_confidence", c.directives.initial_confidence);
    }
    if (j.contains("archive")) {
        const auto& a = j.at("archive");
        c.archive.tau = a.value("tau", c.archive.tau);
        c.archive.buffer_capacity = a.value("buffer_capacity", c.archive.buffer_capacity);
    }
    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        c.embedding.kind = e.value("kind", c.embedding.kind);
        c.embedding.dim = e.value("dim", c.embedding.dim);
        c.embedding.seed = e.value("seed", c.embedding.seed);
        c.embedding.endpoint = e.value("endpoint", c.embedding.endpoint);
        c.embedding.model = e.value("model", c.embedding.model);
        c.embedding.api_key_env = e.value("api_key_env", c.embedding.api_key_env);
    }
    if (j.contains("backends"))
        for (const auto& [role, b] : j.at("backends").items())
            c.backends[role] = backend_from_json(b);
    if (j.contains("term_bins"))
        c.term_bins = j.at("term_bins").get<std::vector<int>>();
    c.seed = j.value("seed", c.seed);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.archive_enabled = j.value("archive_enabled", c.archive_enabled);
    c.alignment_candidates = j.value("alignment_candidates", c.alignment_candidates);
    c.max_reflections = j.value("max_reflections", c.max_reflections);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::Parse, "config " + path + " is not JSON");
    return config_from_json(j);
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write config " + path);
    out << config_to_json(config).dump(2) << "\n";
}

void validate_config(const RunConfig& c, bool check_paths) {
    if (c.panel.t_max < 1) throw Error(ErrorKind::Config, "panel.t_max must be >= 1");
    if (c.panel.retrieve_n < 1)
        throw Error(ErrorKind::Config, "panel.retrieve_n must be >= 1");
    const auto& w = c.scoring.weights;
    if (w.alpha < 0 || w.beta < 0 || w.gamma < 0 || w.alpha + w.beta + w.gamma <= 0)
        throw Error(ErrorKind::Config, "retrieval weights must be non-negative, sum > 0");
    if (c.seed_k < 1) throw Error(ErrorKind::Config, "retrieval.seed_k must be >= 1");
    if (c.hops < 0) throw Error(ErrorKind::Config, "retrieval.hops must be >= 0");
    if (c.evolution.batch_threshold < 2)
        throw Error(ErrorKind::Config, "evolution.batch_threshold must be >= 2");
    if (!(c.directives.prune_threshold > 0 &&
          c.directives.prune_threshold < c.directives.tau_max))
        throw Error(ErrorKind::Config, "need 0 < prune_threshold < tau_max");
    if (c.archive.tau <= 0.0 || c.archive.tau >= 1.0)
        throw Error(ErrorKind::Config, "archive.tau must lie in (0,1)");
    if (c.embedding.dim < 8) throw Error(ErrorKind::Config, "embedding.dim must be >= 8");
    if (!c.term_bins.empty()) TermBinning(c.term_bins);  // throws when malformed
    if (check_paths) {
        for (const auto& [label, path] :
             {std::pair<const char*, const std::string&>{"statutes", c.paths.statutes},
              {"corpus", c.paths.corpus}})
            if (!path.empty() && !std::filesystem::exists(path))
                throw Error(ErrorKind::Config,
                            std::string(label) + " path does not exist: " + path);
        if (!c.paths.prompts_dir.empty() &&
            !std::filesystem::exists(c.paths.prompts_dir))
            throw Error(ErrorKind::Config,
                        "prompts_dir does not exist: " + c.paths.prompts_dir);
    }
}

}  // namespace collegium
