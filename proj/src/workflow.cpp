#include "collegium/workflow.hpp"

#include <algorithm>

#include "collegium/errors.hpp"

namespace collegium {

const char* final_flag_name(FinalFlag flag) {
    return flag == FinalFlag::Pass ? "pass" : "forced_by_tmax";
}

BranchOutcome branch(const ReviewDecision& decision, int turn, int t_max) {
    if (turn < 1) throw Error(ErrorKind::Validation, "branch needs turn >= 1");
    if (!decision.need_rejudge || turn >= t_max) return BranchOutcome::ToVerdict;
    return BranchOutcome::Redraft;
}

void accumulate_feedback(std::vector<std::string>& history, const std::string& fdbk) {
    history.push_back(fdbk);
}

std::string render_feedback(const std::vector<std::string>& history) {
    if (history.empty()) return "(none)";
    std::string out;
    for (size_t i = 0; i < history.size(); ++i) {
        if (i) out += "\n";
        out += std::to_string(i + 1) + ". " + history[i];
    }
    return out;
}

std::string render_statutes(const std::vector<int>& ids, const StatuteLibrary& library) {
    if (ids.empty()) return "(none)";
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += "\n";
        const Statute* statute = library.find(ids[i]);
        if (statute) {
            out += "Article " + std::to_string(ids[i]);
            if (!statute->title.empty()) out += " (" + statute->title + ")";
            out += ": " + statute->text;
        } else {
            out += "Article " + std::to_string(ids[i]);
        }
    }
    return out;
}

namespace {

constexpr const char* kFormatReminder =
    "\n\nReminder: reply strictly in the required output format.";

std::string render_injected(const std::vector<ScoredStandard>& standards,
                            const std::vector<ScoredDirective>& directives,
                            const StandardsArchive* archive, const DirectiveBase* base) {
    if (standards.empty() && directives.empty()) return "(none)";
    std::string out;
    if (!standards.empty()) {
        out += "Precedents:";
        for (size_t i = 0; i < standards.size(); ++i)
            out += "\n" + std::to_string(i + 1) + ". " +
                   archive->node(standards[i].node_id).txt;
    }
    if (!directives.empty()) {
        if (!out.empty()) out += "\n";
        out += "Directives:";
        for (size_t i = 0; i < directives.size(); ++i)
            out += "\n" + std::to_string(i + 1) + ". " +
                   base->directive(directives[i].directive_id).text;
    }
    return out;
}

// Runs one agent call: assemble, invoke, parse, trace. Remote backends get
// one retry with a format reminder before the parse error surfaces.
template <typename Parser>
auto call_agent(const PanelEnvironment& env, TemplateId id,
                const std::map<std::string, std::string>& vars, int turn, Trace& trace,
                int& seq, Parser parse) {
    const AgentRole role = template_role(id);
    auto backend_it = env.backends->find(role);
    if (backend_it == env.backends->end() || !backend_it->second)
        throw Error(ErrorKind::Config,
                    std::string("no backend configured for ") + role_name(role));
    AgentBackend& backend = *backend_it->second;

    PromptBundle bundle = env.prompts->assemble(id, vars);
    for (int attempt = 0;; ++attempt) {
        const std::string raw = invoke(backend, bundle);
        nlohmann::json event{{"seq", seq}, {"kind", "agent"},
                             {"role", role_name(role)}, {"turn", turn},
                             {"system", bundle.system_text}, {"user", bundle.user_text},
                             {"prompt_hash", prompt_hash(bundle.system_text, bundle.user_text)},
                             {"raw", raw}};
        try {
            auto parsed = parse(raw);
            event["parsed"] = [&] {
                if constexpr (std::is_same_v<decltype(parsed), std::vector<std::string>>)
                    return nlohmann::json(parsed);
                else if constexpr (std::is_same_v<decltype(parsed), std::vector<int>>)
                    return nlohmann::json(parsed);
                else if constexpr (std::is_same_v<decltype(parsed), Draft>)
                    return draft_to_json(parsed);
                else if constexpr (std::is_same_v<decltype(parsed), ReviewDecision>)
                    return review_to_json(parsed);
                else
                    return presiding_to_json(parsed);
            }();
            trace.push_back(std::move(event));
            ++seq;
            return parsed;
        } catch (const Error& err) {
            event["parsed"] = nullptr;
            event["parse_error"] = err.what();
            trace.push_back(std::move(event));
            ++seq;
            if (attempt == 0 && backend.retry_on_parse_error()) {
                bundle.user_text += kFormatReminder;
                continue;
            }
            throw;
        }
    }
}

}  // namespace

std::string reasoning_trace_text(const CaseResult& result) {
    std::string out = "Key points: ";
    for (size_t i = 0; i < result.fact_points.size(); ++i) {
        if (i) out += "; ";
        out += result.fact_points[i];
    }
    for (size_t t = 0; t < result.drafts.size(); ++t) {
        out += "\nDraft " + std::to_string(t + 1) + ": article " +
               std::to_string(result.drafts[t].predicted_article) + " - " +
               result.drafts[t].explanation;
        if (t < result.feedback_history.size())
            out += "\nReview " + std::to_string(t + 1) + ": " + result.feedback_history[t];
    }
    return out;
}

CaseResult run_case(const CaseRecord& case_record, const PanelEnvironment& env) {
    if (!env.prompts || !env.backends || !env.library || !env.embedder)
        throw Error(ErrorKind::Config, "panel environment is incomplete");
    if (env.panel.t_max < 1) throw Error(ErrorKind::Config, "t_max must be >= 1");

    CaseResult result;
    result.case_id = case_record.id;
    int seq = 0;
    Trace& trace = result.trace;
    trace.push_back({{"seq", seq++},
                     {"kind", "case"},
                     {"case_id", case_record.id},
                     {"t_max", env.panel.t_max},
                     {"coarse_k", env.panel.coarse_k},
                     {"retrieve_n", env.panel.retrieve_n},
                     {"memory_enabled", env.panel.memory_enabled}});

    try {
        // Preparation: fact extraction, then the two-stage statute retrieval.
        result.fact_points = call_agent(env, TemplateId::Clerk,
                                        {{"CASE_FACT", case_record.fact_text}}, 0, trace,
                                        seq, [](const std::string& raw) {
                                            return parse_clerk(raw);
                                        });

        std::string points_text;
        for (size_t i = 0; i < result.fact_points.size(); ++i) {
            if (i) points_text += "; ";
            points_text += result.fact_points[i];
        }
        if (points_text.empty()) points_text = "(none)";

        const std::string query =
            result.fact_points.empty() ? case_record.fact_text : points_text;
        const auto coarse = env.library->search(query, env.panel.coarse_k);
        std::vector<int> coarse_ids;
        nlohmann::json coarse_json = nlohmann::json::array();
        for (const auto& [id, score] : coarse) {
            coarse_ids.push_back(id);
            coarse_json.push_back({id, score});
        }
        trace.push_back({{"seq", seq++},
                         {"kind", "statute_search"},
                         {"query", query},
                         {"k", env.panel.coarse_k},
                         {"results", coarse_json}});

        result.candidate_statutes = call_agent(
            env, TemplateId::Assistant,
            {{"CASE_FACT", case_record.fact_text},
             {"EVENT_POINTS", points_text},
             {"EXTRA_CONTEXT", render_statutes(coarse_ids, *env.library)}},
            0, trace, seq, [](const std::string& raw) { return parse_assistant(raw); });
        if (result.candidate_statutes.empty()) {
            // Degenerate assistant reply: fall back to the coarse head.
            const size_t take = std::min<size_t>(5, coarse_ids.size());
            result.candidate_statutes.assign(coarse_ids.begin(),
                                             coarse_ids.begin() + take);
            trace.push_back({{"seq", seq++},
                             {"kind", "candidate_fallback"},
                             {"candidates", result.candidate_statutes}});
        }

        // Memory injection for the reviewing roles.
        if (env.panel.memory_enabled && env.archive) {
            RetrievalContext ctx;
            ctx.case_vector = env.embedder->embed(case_record.fact_text);
            ctx.candidate_articles.insert(result.candidate_statutes.begin(),
                                          result.candidate_statutes.end());
            ctx.seed_k = env.seed_k;
            ctx.hops = env.hops;
            result.injected_standards = retrieve_standards(
                ctx, *env.archive, env.panel.retrieve_n, env.scoring);
            if (env.directives)
                result.injected_directives = retrieve_directives(
                    ctx, *env.directives, *env.archive, env.panel.retrieve_n, env.scoring);
            nlohmann::json standards_json = nlohmann::json::array();
            for (const auto& s : result.injected_standards)
                standards_json.push_back({{"node_id", s.node_id},
                                          {"score", s.score},
                                          {"iou", s.iou_term},
                                          {"topo", s.topo_term},
                                          {"sem", s.sem_term},
                                          {"text", env.archive->node(s.node_id).txt}});
            nlohmann::json directives_json = nlohmann::json::array();
            for (const auto& d : result.injected_directives)
                directives_json.push_back(
                    {{"directive_id", d.directive_id},
                     {"score", d.score},
                     {"iou", d.iou_term},
                     {"topo", d.topo_term},
                     {"sem", d.sem_term},
                     {"text", env.directives->directive(d.directive_id).text}});
            trace.push_back({{"seq", seq++},
                             {"kind", "retrieval"},
                             {"standards", standards_json},
                             {"directives", directives_json}});
        }

        const std::string law_ctx =
            render_statutes(result.candidate_statutes, *env.library);
        const std::string precedents_text =
            env.panel.memory_enabled
                ? render_injected(result.injected_standards, result.injected_directives,
                                  env.archive, env.directives)
                : "(none)";

        // Draft-review loop. The drafting judge sees facts, statutes and
        // accumulated feedback only; memory context is reserved for review.
        FinalFlag flag = FinalFlag::Pass;
        for (int turn = 1; turn <= env.panel.t_max; ++turn) {
            const Draft draft = call_agent(
                env, TemplateId::CaseJudge,
                {{"CASE_FACT", case_record.fact_text},
                 {"EVENT_POINTS", points_text},
                 {"CANDIDATES_FOR_JUDGE", law_ctx},
                 {"VERIFICATION_OPINION", render_feedback(result.feedback_history)}},
                turn, trace, seq, [](const std::string& raw) { return parse_judge(raw); });
            result.drafts.push_back(draft);
            result.turns_used = turn;

            const ReviewDecision decision = call_agent(
                env, TemplateId::Supervisor,
                {{"CASE_FACT", case_record.fact_text},
                 {"JUDGMENT_OUT", format_judge(draft)},
                 {"LAW_CTX", law_ctx},
                 {"PRECEDENTS_TEXT", precedents_text}},
                turn, trace, seq,
                [](const std::string& raw) { return parse_supervisor(raw); });
            if (decision.need_rejudge)
                accumulate_feedback(result.feedback_history, decision.suggestions);

            const BranchOutcome outcome = branch(decision, turn, env.panel.t_max);
            trace.push_back({{"seq", seq++},
                             {"kind", "branch"},
                             {"turn", turn},
                             {"flag", decision.need_rejudge ? "reject" : "pass"},
                             {"decision", outcome == BranchOutcome::ToVerdict
                                              ? "to_verdict"
                                              : "redraft"}});
            if (outcome == BranchOutcome::ToVerdict) {
                flag = decision.need_rejudge ? FinalFlag::ForcedByTmax : FinalFlag::Pass;
                break;
            }
        }
        result.final_flag = flag;

        const PresidingOutput presiding = call_agent(
            env, TemplateId::Presiding,
            {{"CASE_FACT", case_record.fact_text},
             {"LAW_CTX", law_ctx},
             {"PRECEDENTS_TEXT", precedents_text},
             {"JUDGMENT_OUT", format_judge(result.drafts.back())}},
            0, trace, seq,
            [](const std::string& raw) { return parse_presiding(raw); });
        result.verdict = presiding.verdict;

        // Ranking for hit@2: the verdict's articles, then the backend's own
        // ranking if it gave one, then the refined draft, then the assistant
        // ordering; deduplicated.
        result.ranked_articles = result.verdict.articles;
        auto push_unique = [&](int article) {
            if (std::find(result.ranked_articles.begin(), result.ranked_articles.end(),
                          article) == result.ranked_articles.end())
                result.ranked_articles.push_back(article);
        };
        for (int a : presiding.ranked_articles) push_unique(a);
        if (result.ranked_articles.size() < 2 && !result.drafts.empty())
            push_unique(result.drafts.back().predicted_article);
        if (result.ranked_articles.size() < 2)
            for (int a : result.candidate_statutes) {
                if (result.ranked_articles.size() >= 2) break;
                push_unique(a);
            }

        const int draft_article = result.drafts.back().predicted_article;
        const bool overrode_draft =
            result.verdict.articles.empty() ||
            result.verdict.articles.front() != draft_article;
        trace.push_back({{"seq", seq++},
                         {"kind", "result"},
                         {"verdict", verdict_to_json(result.verdict)},
                         {"ranked_articles", result.ranked_articles},
                         {"turns_used", result.turns_used},
                         {"final_flag", final_flag_name(result.final_flag)},
                         {"draft_article", draft_article},
                         {"overrode_draft", overrode_draft}});
        return result;
    } catch (const CaseAbortError&) {
        throw;
    } catch (const Error& err) {
        throw CaseAbortError(err, std::move(result.trace));
    }
}

}  // namespace collegium
