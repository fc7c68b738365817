#include "collegium/trace.hpp"

#include <fstream>

#include "collegium/errors.hpp"
#include "collegium/protocol.hpp"
#include "collegium/workflow.hpp"

namespace collegium {

std::string trace_to_text(const Trace& trace) {
    std::string out;
    for (const nlohmann::json& event : trace) {
        out += event.dump();
        out += "\n";
    }
    return out;
}

void write_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write trace " + path);
    out << trace_to_text(trace);
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open trace " + path);
    Trace trace;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json event = nlohmann::json::parse(line, nullptr, false);
        if (event.is_discarded())
            throw Error(ErrorKind::Parse,
                        "trace line " + std::to_string(line_no) + " is not valid JSON");
        trace.push_back(std::move(event));
    }
    if (trace.empty()) throw Error(ErrorKind::Parse, "trace " + path + " is empty");
    return trace;
}

std::string prompt_hash(const std::string& system_text, const std::string& user_text) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](const std::string& s) {
        for (const char c : s) {
            hash ^= static_cast<unsigned char>(c);
            hash *= 0x100000001b3ULL;
        }
        hash ^= 0;
        hash *= 0x100000001b3ULL;
    };
    mix(system_text);
    mix(user_text);
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

// Re-parse one raw reply with the recorded role's parser; null when the
// role has no wire protocol.
std::optional<nlohmann::json> reparse(const std::string& role, const std::string& raw) {
    if (role == "clerk") return nlohmann::json(parse_clerk(raw));
    if (role == "assistant") return nlohmann::json(parse_assistant(raw));
    if (role == "case_judge") return draft_to_json(parse_judge(raw));
    if (role == "supervisor") return review_to_json(parse_supervisor(raw));
    if (role == "presiding") return presiding_to_json(parse_presiding(raw));
    if (role == "meta") return meta_to_json(parse_meta(raw));
    return std::nullopt;  // reflector and friends: free text
}

ReplayReport diverge(long seq, const std::string& message) {
    ReplayReport report;
    report.ok = false;
    report.first_divergence_seq = seq;
    report.message = message;
    return report;
}

}  // namespace

ReplayReport replay_trace(const Trace& trace) {
    ReplayReport report;
    if (trace.empty() || trace.front().value("kind", "") != "case") {
        return diverge(-1, "trace does not start with a case event");
    }
    const int t_max = trace.front().value("t_max", 0);
    std::optional<bool> last_need_rejudge;
    std::optional<nlohmann::json> last_presiding;
    bool saw_result = false;

    for (const nlohmann::json& event : trace) {
        const long seq = event.value("seq", -1L);
        const std::string kind = event.value("kind", "");
        if (kind == "agent") {
            const std::string role = event.value("role", "");
            const std::string raw = event.value("raw", "");
            std::optional<nlohmann::json> parsed;
            std::string parse_error;
            try {
                parsed = reparse(role, raw);
            } catch (const Error& err) {
                parse_error = err.what();
            }
            const bool recorded_failed =
                event.contains("parse_error") && !event.at("parse_error").is_null();
            if (recorded_failed) {
                if (parse_error.empty())
                    return diverge(seq, "recorded parse failure now parses for " + role);
                if (parse_error != event.at("parse_error").get<std::string>())
                    return diverge(seq, "parse error text changed for " + role);
            } else {
                if (!parse_error.empty())
                    return diverge(seq, "recorded parse now fails for " + role + ": " +
                                            parse_error);
                if (parsed && event.at("parsed") != *parsed)
                    return diverge(seq, "parsed value diverges for " + role);
                if (role == "supervisor" && parsed)
                    last_need_rejudge = parsed->at("need_rejudge").get<bool>();
                if (role == "presiding" && parsed) last_presiding = *parsed;
            }
            ++report.events_checked;
        } else if (kind == "branch") {
            if (!last_need_rejudge)
                return diverge(seq, "branch event without a supervisor decision");
            const int turn = event.value("turn", 0);
            ReviewDecision decision;
            decision.need_rejudge = *last_need_rejudge;
            decision.suggestions = decision.need_rejudge ? "(recorded)" : "";
            const BranchOutcome outcome = branch(decision, turn, t_max);
            const std::string expected_flag = decision.need_rejudge ? "reject" : "pass";
            const std::string expected_decision =
                outcome == BranchOutcome::ToVerdict ? "to_verdict" : "redraft";
            if (event.value("flag", "") != expected_flag)
                return diverge(seq, "branch flag diverges");
            if (event.value("decision", "") != expected_decision)
                return diverge(seq, "branch decision diverges");
            ++report.events_checked;
        } else if (kind == "result") {
            if (!last_presiding)
                return diverge(seq, "result event without a presiding reply");
            if (event.at("verdict") != last_presiding->at("verdict"))
                return diverge(seq, "result verdict diverges from presiding reply");
            saw_result = true;
            ++report.events_checked;
        }
    }
    if (!saw_result)
        return diverge(trace.back().value("seq", -1L), "trace ends without a result");
    report.ok = true;
    report.message = "replay matched " + std::to_string(report.events_checked) + " events";
    return report;
}

ReplayReport replay_trace_file(const std::string& path) {
    return replay_trace(load_trace(path));
}

}  // namespace collegium
