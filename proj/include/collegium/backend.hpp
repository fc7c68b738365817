#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "collegium/prompts.hpp"

namespace collegium {

struct AgentBackendConfig {
    std::string kind = "scripted";  // remote | scripted | demo
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    double top_p = 0.9;
    std::string api_key_env;
    std::vector<std::string> script;  // scripted only, popped in order

    bool operator==(const AgentBackendConfig&) const = default;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;

    // One completion round trip; the raw reply text is returned unmodified.
    virtual std::string complete(const PromptBundle& prompt) = 0;

    // Remote backends get one retry with a format reminder on parse failure;
    // deterministic backends never retry.
    virtual bool retry_on_parse_error() const { return false; }

    // True when concurrent complete() calls cannot change any reply. Pop-order
    // backends are not; the batch driver falls back to sequential runs.
    virtual bool concurrent_safe() const { return false; }

    virtual std::string name() const = 0;
};

// Pops a fixed response list; deterministic, for golden-trace tests.
class ScriptedBackend : public AgentBackend {
public:
    ScriptedBackend(std::string label, std::vector<std::string> script)
        : label_(std::move(label)), script_(std::move(script)) {}

    std::string complete(const PromptBundle& prompt) override;
    std::string name() const override { return "scripted:" + label_; }
    size_t consumed() const;
    size_t remaining() const;

private:
    std::string label_;
    std::vector<std::string> script_;
    size_t next_ = 0;
    mutable std::mutex mutex_;
};

// Remote chat endpoint (defined in remote.cpp):
//   POST {endpoint}  {"model": ..., "messages": [{"role": "system"|"user",
//   "content": ...}], "temperature": ..., "top_p": ...}
// Reply text is read from the first choice's message content. Transient
// failures are retried a bounded number of times.
std::shared_ptr<AgentBackend> make_remote_chat_backend(const AgentBackendConfig& config);

std::shared_ptr<AgentBackend> make_backend(const AgentBackendConfig& config,
                                           AgentRole role);

using BackendSet = std::map<AgentRole, std::shared_ptr<AgentBackend>>;

// One completion for the bundle's role; exists as the seam every workflow
// step goes through.
std::string invoke(AgentBackend& backend, const PromptBundle& prompt);

}  // namespace collegium
