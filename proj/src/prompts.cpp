#include "collegium/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "collegium/errors.hpp"

namespace collegium {

const char* role_name(AgentRole role) {
    switch (role) {
    case AgentRole::Clerk: return "clerk";
    case AgentRole::Assistant: return "assistant";
    case AgentRole::CaseJudge: return "case_judge";
    case AgentRole::Supervisor: return "supervisor";
    case AgentRole::Presiding: return "presiding";
    case AgentRole::Meta: return "meta";
    case AgentRole::Reflector: return "reflector";
    }
    return "unknown";
}

AgentRole role_from_name(const std::string& name) {
    for (AgentRole role : {AgentRole::Clerk, AgentRole::Assistant, AgentRole::CaseJudge,
                           AgentRole::Supervisor, AgentRole::Presiding, AgentRole::Meta,
                           AgentRole::Reflector})
        if (name == role_name(role)) return role;
    throw Error(ErrorKind::Config, "unknown agent role " + name);
}

AgentRole template_role(TemplateId id) {
    switch (id) {
    case TemplateId::Clerk: return AgentRole::Clerk;
    case TemplateId::Assistant: return AgentRole::Assistant;
    case TemplateId::CaseJudge: return AgentRole::CaseJudge;
    case TemplateId::Supervisor: return AgentRole::Supervisor;
    case TemplateId::Presiding: return AgentRole::Presiding;
    case TemplateId::MetaInduce:
    case TemplateId::MetaDiff:
    case TemplateId::MetaMerge: return AgentRole::Meta;
    case TemplateId::Reflector: return AgentRole::Reflector;
    }
    return AgentRole::Clerk;
}

const char* template_file_name(TemplateId id) {
    switch (id) {
    case TemplateId::Clerk: return "clerk.txt";
    case TemplateId::Assistant: return "assistant.txt";
    case TemplateId::CaseJudge: return "case_judge.txt";
    case TemplateId::Supervisor: return "supervisor.txt";
    case TemplateId::Presiding: return "presiding.txt";
    case TemplateId::MetaInduce: return "meta_induce.txt";
    case TemplateId::MetaDiff: return "meta_diff.txt";
    case TemplateId::MetaMerge: return "meta_merge.txt";
    case TemplateId::Reflector: return "reflector.txt";
    }
    return "unknown.txt";
}

namespace {

constexpr TemplateId kAllTemplates[] = {
    TemplateId::Clerk,      TemplateId::Assistant, TemplateId::CaseJudge,
    TemplateId::Supervisor, TemplateId::Presiding, TemplateId::MetaInduce,
    TemplateId::MetaDiff,   TemplateId::MetaMerge, TemplateId::Reflector,
};

PromptTemplate builtin_template(TemplateId id) {
    switch (id) {
    case TemplateId::Clerk:
        return {
            "You are a legal fact extraction agent (Court Clerk). Your duty is to "
            "extract core points from the raw legal facts, focusing on key dimensions "
            "such as the perpetrator's subjective intent, specific criminal acts, "
            "consequences caused, and the severity of the circumstances. Do not make "
            "any conviction or sentencing judgments, and do not output article numbers "
            "or charges.",
            "Input Case:\n{{CASE_FACT}}\n\n"
            "Output Format:\nFinish[1. Point 1; 2. Point 2; ...]"};
    case TemplateId::Assistant:
        return {
            "You are a legal assistant with extensive criminal law knowledge (Judicial "
            "Assistant). Your duty is to filter and re-rank candidate law articles "
            "(retrieved via vector similarity) based on the case facts and event "
            "points. Articles with higher reference value for ruling this case should "
            "be ranked earlier. Try not to omit relevant ones (select about 5). If "
            "existing candidates are insufficient, use your own knowledge to suggest "
            "more reasonable articles. Compare each article's description of criminal "
            "acts with the defendant's intent, means, object, and results. Only output "
            "the final result, no analysis required.",
            "Facts:\n{{CASE_FACT}}\n\n"
            "Event Points:\n{{EVENT_POINTS}}\n\n"
            "Candidate Articles:\n{{EXTRA_CONTEXT}}\n\n"
            "Output Format:\nFinish[[Article_ID_1, Article_ID_2, ...]]\n"
            "(e.g., Finish[[272, 384, 185]])"};
    case TemplateId::CaseJudge:
        return {
            "You are a judge with extensive criminal law knowledge (Case-handling "
            "Judge). Carefully analyze the legal facts and event points. Based on "
            "dimensions like subjective intent, core criminal acts, results, and "
            "severity, and combining knowledge from candidate articles (for reference "
            "only), recommend the most relevant criminal law article for this case. "
            "If the Supervisor thinks your previous recommendation was inaccurate, "
            "re-recommend the most relevant article based on the Supervisor's "
            "feedback.",
            "Facts:\n{{CASE_FACT}}\n\n"
            "Event Points:\n{{EVENT_POINTS}}\n\n"
            "Candidates:\n{{CANDIDATES_FOR_JUDGE}}\n\n"
            "Supervisor Opinion:\n{{VERIFICATION_OPINION}}\n\n"
            "Output Format:\n"
            "{'predicted_article': <int>, 'explanation': '<Brief basis matching facts "
            "to elements>'}"};
    case TemplateId::Supervisor:
        return {
            "You are a verification agent with extensive legal knowledge (Adjudication "
            "Supervisor). Your task is to check if the article recommended by the "
            "Case-handling Judge is suitable as a reference for the final ruling. "
            "Check for reasonableness or obvious errors (e.g., confusing "
            "primary/secondary issues, sequence, or missing deep semantics) from "
            "dimensions like intent, acts, and results. Combine knowledge from "
            "reference articles, insights, and precedents (if any) to give an opinion "
            "on whether a re-judgment is needed.",
            "Facts:\n{{CASE_FACT}}\n\n"
            "Judgment Output:\n{{JUDGMENT_OUT}}\n\n"
            "Reference Law:\n{{LAW_CTX}}\n\n"
            "Precedents and Directives:\n{{PRECEDENTS_TEXT}}\n\n"
            "Output Format:\nNo analysis process needed, just the result:\n"
            "Finish[{\"need_rejudge\": <bool>, \"suggestions\": \"<Supplement "
            "suggestions for re-judgment>\"}]"};
    case TemplateId::Presiding:
        return {
            "You are the final decision-making agent (Presiding Judge) with "
            "professional judging capability. Your duty is to synthesize outputs from "
            "all agents and auxiliary info to make the final decision: Article, "
            "Charge, and Penalty Term. Unit for imprisonment is \"months\". Determine "
            "reasonable values based on the sentencing range of the selected article "
            "and case circumstances (e.g., severity). Synthesize opinions from the "
            "Case Judge and Supervisor.",
            "Facts:\n{{CASE_FACT}}\n\n"
            "Reference Law:\n{{LAW_CTX}}\n\n"
            "Precedents and Directives:\n{{PRECEDENTS_TEXT}}\n\n"
            "Verified Draft:\n{{JUDGMENT_OUT}}\n\n"
            "Output Format:\n"
            "Finish[{\"relevant_articles\": [int], \"accusation\": [str], "
            "\"term_of_imprisonment\": {\"death_penalty\": bool, \"life_imprisonment\": "
            "bool, \"imprisonment\": int}}]"};
    case TemplateId::MetaInduce:
        return {
            "You are a senior jurist distilling adjudication experience. You are given "
            "several fully-verified case trajectories that were adjudicated under the "
            "same statutes. Identify the common adjudication pattern and state it as "
            "one precise, reusable directive: a single sentence giving the condition "
            "and the conclusion. Do not restate the cases.",
            "Anchor Articles:\n{{ANCHOR_ARTICLES}}\n\n"
            "Verified Trajectories:\n{{MEMBER_TRAJECTORIES}}\n\n"
            "Output Format:\nFinish[{\"action\": \"ADD\", \"text\": \"<directive>\"}]"};
    case TemplateId::MetaDiff:
        return {
            "You are a senior jurist sharpening an adjudication directive. You are "
            "given a success trajectory and a failure trajectory that share the same "
            "applicable law but diverged in outcome, plus the current directive. "
            "Identify the critical branching feature. Reply REFINE with an improved "
            "directive text adding the missing condition or exception, PRUNE if the "
            "directive is misleading, or KEEP if it already covers the distinction.",
            "Current Directive:\n{{DIRECTIVE_TEXT}}\n\n"
            "Success Trajectory:\n{{POSITIVE_TRAJECTORY}}\n\n"
            "Failure Trajectory:\n{{NEGATIVE_TRAJECTORY}}\n\n"
            "Output Format:\nFinish[{\"action\": \"REFINE\"|\"PRUNE\"|\"KEEP\", "
            "\"text\": \"<directive when REFINE>\"}]"};
    case TemplateId::MetaMerge:
        return {
            "You are a senior jurist consolidating adjudication directives. You are "
            "given several directives anchored on the same statutes that say nearly "
            "the same thing. Rewrite them as one robust directive preserving every "
            "condition and exception.",
            "Anchor Articles:\n{{ANCHOR_ARTICLES}}\n\n"
            "Directives:\n{{MEMBER_DIRECTIVES}}\n\n"
            "Output Format:\nFinish[{\"action\": \"ADD\", \"text\": \"<merged "
            "directive>\"}]"};
    case TemplateId::Reflector:
        return {
            "You are a legal reasoning reviewer. A previous prediction of the "
            "applicable law article was wrong. Using the ground-truth article as "
            "reference, analyze the logical loopholes in the previous reasoning, such "
            "as omitted constitutive elements, confusion of primary and secondary "
            "factors, disordered logic, or reliance on surface features. Give concise "
            "reflection advice that would guide a re-prediction toward the correct "
            "article without quoting the answer verbatim.",
            "Facts:\n{{CASE_FACT}}\n\n"
            "Candidate Articles:\n{{CANDIDATES}}\n\n"
            "Previous Prediction:\n{{PREV_PREDICTION}}\n\n"
            "Ground Truth Article:\n{{GOLD_ARTICLE}}\n\n"
            "Output: reflection advice as plain text."};
    }
    throw Error(ErrorKind::Config, "unknown template id");
}

// Replaces every {{KEY}} present in `vars`; leaves unknown markers in place
// so the caller can report them.
std::string substitute(const std::string& text,
                       const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    while (pos < text.size()) {
        const size_t open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        const size_t close = text.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        const std::string key = text.substr(open + 2, close - open - 2);
        const auto it = vars.find(key);
        if (it == vars.end())
            throw Error(ErrorKind::MissingPlaceholder, "no value for placeholder " + key);
        out += it->second;
        pos = close + 2;
    }
    return out;
}

}  // namespace

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    for (TemplateId id : kAllTemplates) lib.templates_[id] = builtin_template(id);
    return lib;
}

PromptLibrary PromptLibrary::from_dir(const std::string& dir) {
    PromptLibrary lib = builtin();
    for (TemplateId id : kAllTemplates) {
        const std::filesystem::path path =
            std::filesystem::path(dir) / template_file_name(id);
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
        std::string line;
        std::string system_text;
        std::string user_text;
        bool in_user = false;
        bool first = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line == "---" && !in_user) {
                in_user = true;
                first = true;
                continue;
            }
            std::string& target = in_user ? user_text : system_text;
            if (!first) target += "\n";
            target += line;
            first = false;
        }
        if (!in_user)
            throw Error(ErrorKind::Parse,
                        "template " + path.string() + " lacks the --- separator");
        lib.templates_[id] = PromptTemplate{system_text, user_text};
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const {
    return templates_.at(id);
}

PromptBundle PromptLibrary::assemble(TemplateId id,
                                     const std::map<std::string, std::string>& vars) const {
    const PromptTemplate& tpl = templates_.at(id);
    PromptBundle bundle;
    bundle.role = template_role(id);
    bundle.system_text = substitute(tpl.system_text, vars);
    bundle.user_text = substitute(tpl.user_text, vars);
    return bundle;
}

void PromptLibrary::write_dir(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [id, tpl] : templates_) {
        const std::filesystem::path path =
            std::filesystem::path(dir) / template_file_name(id);
        std::ofstream out(path);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
        out << tpl.system_text << "\n---\n" << tpl.user_text << "\n";
    }
}

}  // namespace collegium
