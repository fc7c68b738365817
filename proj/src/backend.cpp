#include "collegium/backend.hpp"

#include "collegium/demo.hpp"
#include "collegium/errors.hpp"

namespace collegium {

std::string ScriptedBackend::complete(const PromptBundle&) {
    std::lock_guard lock(mutex_);
    if (next_ >= script_.size())
        throw Error(ErrorKind::ScriptExhausted,
                    label_ + " exhausted after " + std::to_string(script_.size()) +
                        " responses (turn " + std::to_string(next_ + 1) + ")");
    return script_[next_++];
}

size_t ScriptedBackend::consumed() const {
    std::lock_guard lock(mutex_);
    return next_;
}

size_t ScriptedBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return script_.size() - next_;
}

std::shared_ptr<AgentBackend> make_backend(const AgentBackendConfig& config,
                                           AgentRole role) {
    if (config.kind == "scripted")
        return std::make_shared<ScriptedBackend>(role_name(role), config.script);
    if (config.kind == "remote") return make_remote_chat_backend(config);
    if (config.kind == "demo") return std::make_shared<DemoOracleBackend>(role);
    throw Error(ErrorKind::Config, "unknown backend kind " + config.kind);
}

std::string invoke(AgentBackend& backend, const PromptBundle& prompt) {
    return backend.complete(prompt);
}

}  // namespace collegium
