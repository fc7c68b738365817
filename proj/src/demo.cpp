#include "collegium/demo.hpp"

#include <filesystem>
#include <fstream>

#include "collegium/config.hpp"
#include "collegium/errors.hpp"
#include "collegium/protocol.hpp"

namespace collegium {

namespace {

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// Section values in the builtin templates sit between "<Header>\n" and the
// next blank line.
std::string section(const std::string& text, const std::string& header) {
    const std::string marker = header + "\n";
    const size_t pos = text.find(marker);
    if (pos == std::string::npos)
        throw Error(ErrorKind::Protocol, "demo backend misses section " + header);
    const size_t begin = pos + marker.size();
    const size_t end = text.find("\n\n", begin);
    return text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

std::vector<std::string> sentences(const std::string& text) {
    std::vector<std::string> out;
    size_t begin = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '.') {
            std::string s = text.substr(begin, i - begin);
            while (!s.empty() && s.front() == ' ') s.erase(s.begin());
            if (!s.empty()) out.push_back(s);
            begin = i + 1;
        }
    }
    return out;
}

// The directive the relay cluster induces; its "operating license" phrasing
// is what unlocks the supervisor's correction.
const char* kRelayDirective =
    "When the operator holds an operating license and the interference runs "
    "through a relay station, apply article 202 even when a broadcast rig is "
    "present.";
const char* kBroadcastDirective =
    "Operating a pirate transmitter without any permit constitutes article 201 "
    "regardless of broadcast content.";
const char* kBeaconDirective =
    "Forging navigation beacon frames that misdirect traffic constitutes "
    "article 203 regardless of the transmission power.";

std::string demo_clerk(const PromptBundle& prompt) {
    const std::string fact = section(prompt.user_text, "Input Case:");
    std::vector<std::string> points = sentences(fact);
    if (points.size() > 4) points.resize(4);
    return format_clerk(points);
}

std::string demo_assistant(const PromptBundle& prompt) {
    const std::string fact = section(prompt.user_text, "Facts:");
    const std::string candidates = section(prompt.user_text, "Candidate Articles:");
    std::vector<int> picked;
    auto consider = [&](int article, const char* cue) {
        if (contains(candidates, "Article " + std::to_string(article)) &&
            contains(fact, cue))
            picked.push_back(article);
    };
    consider(demo::kArticleBroadcast, "broadcast");
    consider(demo::kArticleRelay, "relay");
    consider(demo::kArticleBeacon, "beacon");
    return format_assistant(picked);
}

int article_from_fact(const std::string& fact, const std::string& opinion) {
    if (contains(opinion, "article 202")) return demo::kArticleRelay;
    if (contains(fact, "broadcast rig")) return demo::kArticleBroadcast;  // keyword trap
    if (contains(fact, "pirate transmitter")) return demo::kArticleBroadcast;
    if (contains(fact, "forged beacon")) return demo::kArticleBeacon;
    if (contains(fact, "relay station")) return demo::kArticleRelay;
    return demo::kArticleBroadcast;
}

std::string demo_case_judge(const PromptBundle& prompt) {
    const std::string fact = section(prompt.user_text, "Facts:");
    const std::string opinion = section(prompt.user_text, "Supervisor Opinion:");
    const int article = article_from_fact(fact, opinion);
    Draft draft;
    draft.predicted_article = article;
    draft.explanation = "facts match the elements of article " + std::to_string(article);
    return format_judge(draft);
}

std::string demo_supervisor(const PromptBundle& prompt) {
    const std::string fact = section(prompt.user_text, "Facts:");
    const std::string judgment = section(prompt.user_text, "Judgment Output:");
    const std::string precedents =
        section(prompt.user_text, "Precedents and Directives:");
    ReviewDecision decision;
    const bool drafted_broadcast =
        contains(judgment, "\"predicted_article\":" +
                               std::to_string(demo::kArticleBroadcast));
    // Without the relay directive in context the confusion goes unnoticed;
    // the cue phrase appears in directive text only, never in case facts or
    // archived trajectories.
    if (drafted_broadcast && contains(fact, "relay station") &&
        contains(precedents, "even when a broadcast rig is present")) {
        decision.need_rejudge = true;
        decision.suggestions =
            "The operator holds an operating license and interfered through a "
            "relay station; apply article 202.";
    }
    return format_supervisor(decision);
}

std::string demo_presiding(const PromptBundle& prompt) {
    const std::string fact = section(prompt.user_text, "Facts:");
    const std::string judgment = section(prompt.user_text, "Verified Draft:");
    const Draft draft = parse_judge(judgment);
    const bool severe = contains(fact, "major outage");
    Verdict verdict;
    verdict.articles = {draft.predicted_article};
    verdict.charges = {demo::charge_for(draft.predicted_article)};
    verdict.term.imprisonment_months =
        demo::term_months_for(draft.predicted_article, severe);
    return format_presiding(verdict);
}

std::string demo_meta(const PromptBundle& prompt) {
    MetaAction action;
    if (contains(prompt.user_text, "Success Trajectory:")) {
        // Difference analysis: refine the relay directive, keep the rest.
        const std::string directive = section(prompt.user_text, "Current Directive:");
        if (contains(directive, "relay station")) {
            action.kind = MetaAction::Kind::Refine;
            action.text = kRelayDirective;
        } else {
            action.kind = MetaAction::Kind::Keep;
        }
        return format_meta(action);
    }
    // Induction and consolidation both emit the canonical per-anchor text.
    const std::string anchors = section(prompt.user_text, "Anchor Articles:");
    action.kind = MetaAction::Kind::Add;
    if (contains(anchors, std::to_string(demo::kArticleRelay)))
        action.text = kRelayDirective;
    else if (contains(anchors, std::to_string(demo::kArticleBeacon)))
        action.text = kBeaconDirective;
    else
        action.text = kBroadcastDirective;
    return format_meta(action);
}

std::string demo_reflector(const PromptBundle& prompt) {
    const std::string gold = section(prompt.user_text, "Ground Truth Article:");
    return "The previous reasoning weighed surface keywords over the operator's "
           "status; apply article " +
           gold + ".";
}

}  // namespace

std::string DemoOracleBackend::complete(const PromptBundle& prompt) {
    switch (prompt.role) {
    case AgentRole::Clerk: return demo_clerk(prompt);
    case AgentRole::Assistant: return demo_assistant(prompt);
    case AgentRole::CaseJudge: return demo_case_judge(prompt);
    case AgentRole::Supervisor: return demo_supervisor(prompt);
    case AgentRole::Presiding: return demo_presiding(prompt);
    case AgentRole::Meta: return demo_meta(prompt);
    case AgentRole::Reflector: return demo_reflector(prompt);
    }
    throw Error(ErrorKind::Config, "demo backend got an unknown role");
}

std::string DemoOracleBackend::name() const {
    return std::string("demo:") + role_name(role_);
}

namespace demo {

const char* charge_for(int article) {
    switch (article) {
    case kArticleBroadcast: return "unlicensed broadcast operation";
    case kArticleRelay: return "licensed relay interference";
    case kArticleBeacon: return "navigation signal tampering";
    }
    return "unknown offense";
}

int term_months_for(int article, bool severe) {
    switch (article) {
    case kArticleBroadcast: return severe ? 40 : 14;
    case kArticleRelay: return severe ? 26 : 8;
    case kArticleBeacon: return severe ? 70 : 20;
    }
    return 6;
}

namespace {

const char* kNames[] = {"Ardo", "Belen", "Ciro", "Dara", "Edda", "Fenn",
                        "Galo", "Hessa", "Iris", "Jorn", "Kael", "Lumi"};
const char* kPlaces[] = {"Northgate", "Eastport", "Harrow Hill", "Millbrae",
                         "Saltmarsh", "Westfen", "Oakmoor", "Quarry Row"};

enum class Kind { BroadcastX, RelayEasy, RelayConfusable, Beacon };

CaseRecord make_case(int index, Kind kind) {
    const std::string name = kNames[index % 12];
    const std::string place = kPlaces[index % 8];
    const bool severe = index % 2 == 1;
    const std::string outage =
        severe ? "a major outage across three municipalities"
               : "a brief local outage";
    const std::string year = std::to_string(2014 + index % 9);

    CaseRecord record;
    record.id = "demo-" + std::to_string(index);
    int article = 0;
    switch (kind) {
    case Kind::BroadcastX:
        article = kArticleBroadcast;
        record.fact_text =
            "Defendant " + name + " assembled a pirate transmitter in a rented flat at " +
            place + " and ran an unlicensed broadcast over licensed spectrum. " +
            "Investigators seized the broadcast rig and two antenna masts. " +
            "The unlicensed signal caused " + outage + ".";
        break;
    case Kind::RelayEasy:
        article = kArticleRelay;
        record.fact_text =
            "Defendant " + name + ", holder of an operating license issued in " + year +
            ", re-tuned the relay station at " + place +
            " and interfered with the public emergency channel. " +
            "The interference caused " + outage + ".";
        break;
    case Kind::RelayConfusable:
        article = kArticleRelay;
        record.fact_text =
            "Defendant " + name + ", holder of an operating license issued in " + year +
            ", wheeled a portable broadcast rig into the relay station at " + place +
            " and interfered with the public emergency channel. " +
            "The interference caused " + outage + ".";
        break;
    case Kind::Beacon:
        article = kArticleBeacon;
        record.fact_text =
            "Defendant " + name + " transmitted forged beacon frames near the " + place +
            " harbor and misdirected vessel traffic. " +
            "A forged beacon transmitter was recovered from a service van. " +
            "The tampering caused " + outage + ".";
        break;
    }

    Verdict gold;
    gold.articles = {article};
    gold.charges = {charge_for(article)};
    gold.term.imprisonment_months = term_months_for(article, severe);
    record.gold = gold;
    return record;
}

}  // namespace

std::vector<CaseRecord> make_cases() {
    // 48 cases cycling confusable-relay, easy-relay, broadcast, beacon, then
    // 12 more broadcast/beacon cases: 20 X, 12+12 Y, 16 Z.
    std::vector<CaseRecord> cases;
    for (int i = 0; i < 48; ++i) {
        const Kind kind = i % 4 == 0   ? Kind::RelayConfusable
                          : i % 4 == 1 ? Kind::RelayEasy
                          : i % 4 == 2 ? Kind::BroadcastX
                                       : Kind::Beacon;
        cases.push_back(make_case(i, kind));
    }
    for (int i = 48; i < 60; ++i)
        cases.push_back(make_case(i, i % 3 == 2 ? Kind::Beacon : Kind::BroadcastX));
    return cases;
}

std::string statutes_jsonl() {
    nlohmann::json a{
        {"article_id", kArticleBroadcast},
        {"title", "Unlicensed broadcasting"},
        {"text",
         "Whoever assembles or operates a broadcast transmitter without an operating "
         "permit, including any portable broadcast rig, and thereby occupies licensed "
         "spectrum, commits unlicensed broadcast operation."}};
    nlohmann::json b{
        {"article_id", kArticleRelay},
        {"title", "Relay interference"},
        {"text",
         "A licensed relay operator who re-tunes or misuses a relay station and "
         "thereby interferes with a public emergency channel commits licensed relay "
         "interference."}};
    nlohmann::json c{
        {"article_id", kArticleBeacon},
        {"title", "Beacon tampering"},
        {"text",
         "Whoever transmits forged beacon frames or falsifies navigation signals and "
         "thereby misdirects traffic commits navigation signal tampering."}};
    return a.dump() + "\n" + b.dump() + "\n" + c.dump() + "\n";
}

void write_bundle(const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/cases.jsonl");
        if (!out) throw Error(ErrorKind::Io, "cannot write " + dir + "/cases.jsonl");
        for (const CaseRecord& record : make_cases())
            out << case_to_json(record).dump() << "\n";
    }
    {
        std::ofstream out(dir + "/statutes.jsonl");
        out << statutes_jsonl();
    }

    AgentBackendConfig demo_backend;
    demo_backend.kind = "demo";

    RunConfig config;
    config.paths.statutes = dir + "/statutes.jsonl";
    config.paths.corpus = dir + "/cases.jsonl";
    config.paths.memory_dir = dir + "/memory";
    config.paths.output_dir = dir + "/out";
    config.evolution.batch_threshold = 20;
    for (const char* role : {"clerk", "assistant", "case_judge", "supervisor",
                             "presiding", "meta", "reflector"})
        config.backends[role] = demo_backend;
    save_config(config, dir + "/config.json");

    RunConfig nomem = config;
    nomem.panel.memory_enabled = false;
    nomem.paths.memory_dir = dir + "/memory_nomem";
    nomem.paths.output_dir = dir + "/out_nomem";
    save_config(nomem, dir + "/config_nomem.json");
}

}  // namespace demo

}  // namespace collegium
