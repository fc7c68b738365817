#pragma once

#include <string>

#include "collegium/backend.hpp"
#include "collegium/domain.hpp"
#include "collegium/prompts.hpp"

namespace collegium {

// Deterministic rule-driven backend for the bundled synthetic corpus. Replies
// are pure functions of the prompt text, which lets the full closed loop run
// offline while still reacting to injected memory context: the drafting rule
// falls into a keyword trap on one charge pair that only a retrieved
// directive lets the supervisor catch. Relies on the builtin templates'
// section headers.
class DemoOracleBackend : public AgentBackend {
public:
    explicit DemoOracleBackend(AgentRole role) : role_(role) {}

    std::string complete(const PromptBundle& prompt) override;
    bool concurrent_safe() const override { return true; }
    std::string name() const override;

private:
    AgentRole role_;
};

namespace demo {

// Synthetic radio-offense statutes: 201 unlicensed broadcasting (X),
// 202 licensed relay interference (Y), 203 beacon tampering (Z).
// Half of the Y cases carry the misleading X surface cue.
constexpr int kArticleBroadcast = 201;
constexpr int kArticleRelay = 202;
constexpr int kArticleBeacon = 203;

const char* charge_for(int article);
int term_months_for(int article, bool severe);

std::vector<CaseRecord> make_cases();
std::string statutes_jsonl();

// Writes cases.jsonl, statutes.jsonl, config.json and config_nomem.json.
void write_bundle(const std::string& dir);

}  // namespace demo

}  // namespace collegium
