#include "collegium/alignment.hpp"

#include "collegium/errors.hpp"
#include "collegium/workflow.hpp"

namespace collegium {

namespace {

std::map<std::string, std::string> judge_vars(const std::string& fact,
                                              const std::vector<int>& candidates,
                                              const StatuteLibrary& library,
                                              const std::string& opinion) {
    return {{"CASE_FACT", fact},
            {"EVENT_POINTS", "(none)"},
            {"CANDIDATES_FOR_JUDGE", render_statutes(candidates, library)},
            {"VERIFICATION_OPINION", opinion}};
}

}  // namespace

std::string alignment_prompt(const std::string& fact, const std::vector<int>& candidates,
                             const StatuteLibrary& library,
                             const PromptLibrary& prompts) {
    return prompts
        .assemble(TemplateId::CaseJudge, judge_vars(fact, candidates, library, "(none)"))
        .user_text;
}

DistillReport distill_sft_set(const std::vector<CaseRecord>& corpus,
                              AgentBackend& teacher, const StatuteLibrary& library,
                              const PromptLibrary& prompts, int candidates_k,
                              std::ostream& sft_out, std::ostream& fault_out,
                              std::vector<FaultRecord>* faults) {
    DistillReport report;
    for (const CaseRecord& record : corpus) {
        if (!record.gold)
            throw Error(ErrorKind::Validation,
                        "distillation needs gold labels (" + record.id + ")");
        std::vector<int> candidates;
        for (const auto& [id, score] : library.search(record.fact_text, candidates_k))
            candidates.push_back(id);

        Draft draft;
        try {
            const PromptBundle bundle = prompts.assemble(
                TemplateId::CaseJudge,
                judge_vars(record.fact_text, candidates, library, "(none)"));
            draft = parse_judge(invoke(teacher, bundle));
        } catch (const Error&) {
            ++report.skipped;
            continue;
        }

        const int gold_article = record.gold->articles.front();
        if (draft.predicted_article == gold_article) {
            SftSample sample{record.id, record.fact_text, candidates, draft};
            sft_out << sft_to_json(sample).dump() << "\n";
            ++report.sft_count;
        } else {
            FaultRecord fault{record.id, record.fact_text, candidates, draft,
                              gold_article};
            fault_out << fault_to_json(fault).dump() << "\n";
            if (faults) faults->push_back(fault);
            ++report.fault_count;
        }
    }
    return report;
}

ReflectionTrajectory reflection_loop(const FaultRecord& fault, AgentBackend& reflector,
                                     AgentBackend& expert, const StatuteLibrary& library,
                                     const PromptLibrary& prompts, int max_iters) {
    if (max_iters < 1) throw Error(ErrorKind::Validation, "max_iters must be >= 1");
    if (fault.predicted.predicted_article == fault.gold_article)
        throw Error(ErrorKind::Validation,
                    "reflection starts from an incorrect prediction");

    ReflectionTrajectory trajectory;
    trajectory.fault = fault;
    std::vector<std::string> reflections;
    Draft last = fault.predicted;
    for (int i = 1; i <= max_iters; ++i) {
        const PromptBundle reflect_bundle = prompts.assemble(
            TemplateId::Reflector,
            {{"CASE_FACT", fault.fact},
             {"CANDIDATES", render_statutes(fault.candidates, library)},
             {"PREV_PREDICTION", format_judge(last)},
             {"GOLD_ARTICLE", std::to_string(fault.gold_article)}});
        const std::string advice = invoke(reflector, reflect_bundle);
        reflections.push_back(advice);

        const PromptBundle expert_bundle = prompts.assemble(
            TemplateId::CaseJudge,
            judge_vars(fault.fact, fault.candidates, library,
                       render_feedback(reflections)));
        const Draft attempt = parse_judge(invoke(expert, expert_bundle));
        trajectory.attempts.push_back({attempt, advice});
        last = attempt;
        if (attempt.predicted_article == fault.gold_article) {
            trajectory.corrected_at = i;
            break;
        }
    }
    return trajectory;
}

std::vector<PreferencePair> build_preference_pairs(
    const std::vector<ReflectionTrajectory>& trajectories, const StatuteLibrary& library,
    const PromptLibrary& prompts) {
    std::vector<PreferencePair> pairs;
    for (const ReflectionTrajectory& t : trajectories) {
        if (!t.corrected_at) continue;
        const Draft& winner = t.attempts.at(*t.corrected_at - 1).prediction;
        PreferencePair pair;
        pair.prompt =
            alignment_prompt(t.fault.fact, t.fault.candidates, library, prompts);
        pair.chosen = format_judge(winner);
        pair.rejected = format_judge(t.fault.predicted);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

nlohmann::json sft_to_json(const SftSample& sample) {
    return {{"case_id", sample.case_id},
            {"input", {{"fact", sample.fact}, {"candidates", sample.candidates}}},
            {"target", format_judge(sample.target)}};
}

nlohmann::json fault_to_json(const FaultRecord& fault) {
    return {{"case_id", fault.case_id},
            {"fact", fault.fact},
            {"candidates", fault.candidates},
            {"predicted", format_judge(fault.predicted)},
            {"gold_article", fault.gold_article}};
}

FaultRecord fault_from_json(const nlohmann::json& j) {
    FaultRecord fault;
    fault.case_id = j.at("case_id").get<std::string>();
    fault.fact = j.at("fact").get<std::string>();
    for (const auto& c : j.at("candidates")) fault.candidates.push_back(c.get<int>());
    fault.predicted = parse_judge(j.at("predicted").get<std::string>());
    fault.gold_article = j.at("gold_article").get<int>();
    return fault;
}

nlohmann::json pair_to_json(const PreferencePair& pair) {
    return {{"prompt", pair.prompt}, {"chosen", pair.chosen}, {"rejected", pair.rejected}};
}

}  // namespace collegium
