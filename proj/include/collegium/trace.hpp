#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace collegium {

// A case trace is an ordered list of JSON events, one per line on disk:
//   {"seq":0,"kind":"case","case_id":...,"t_max":...,"memory_enabled":...}
//   {"seq":n,"kind":"agent","role":...,"turn":...,"system":...,"user":...,
//    "prompt_hash":...,"raw":...,"parsed":...|null,"parse_error":...?}
//   {"seq":n,"kind":"statute_search","query":...,"k":...,"results":[[id,score]...]}
//   {"seq":n,"kind":"retrieval","standards":[...],"directives":[...]}
//   {"seq":n,"kind":"branch","turn":...,"flag":"pass"|"reject",
//    "decision":"to_verdict"|"redraft"}
//   {"seq":n,"kind":"result","verdict":...,"ranked_articles":...,
//    "turns_used":...,"final_flag":...}
using Trace = std::vector<nlohmann::json>;

std::string trace_to_text(const Trace& trace);
void write_trace(const std::string& path, const Trace& trace);
Trace load_trace(const std::string& path);

// FNV-1a over system + '\0' + user, hex-encoded; identifies prompts in traces.
std::string prompt_hash(const std::string& system_text, const std::string& user_text);

struct ReplayReport {
    bool ok = false;
    int events_checked = 0;
    long first_divergence_seq = -1;
    std::string message;
};

// Re-parses every recorded raw agent reply with the role's parser and
// re-executes the branch rule, asserting byte-identical outcomes.
ReplayReport replay_trace(const Trace& trace);
ReplayReport replay_trace_file(const std::string& path);

}  // namespace collegium
