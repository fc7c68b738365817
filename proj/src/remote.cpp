// Remote HTTP providers: chat completions and embeddings. Kept in one
// translation unit so httplib is compiled exactly once.

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "collegium/backend.hpp"
#include "collegium/embedding.hpp"
#include "collegium/errors.hpp"

namespace collegium {

namespace {

constexpr int kMaxAttempts = 3;

struct Endpoint {
    std::string host;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw Error(ErrorKind::Config, "endpoint needs a scheme: " + url);
    const size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::string api_key(const std::string& env_name) {
    if (env_name.empty()) return {};
    const char* value = std::getenv(env_name.c_str());
    return value ? value : std::string{};
}

nlohmann::json post_json(const std::string& url, const std::string& key_env,
                         const nlohmann::json& payload) {
    const Endpoint endpoint = split_endpoint(url);
    std::string last_error;
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        httplib::Client client(endpoint.host);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        const std::string key = api_key(key_env);
        if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
        auto result =
            client.Post(endpoint.path, headers, payload.dump(), "application/json");
        if (!result) {
            last_error = "connection failed: " + httplib::to_string(result.error());
        } else if (result->status >= 500) {
            last_error = "server status " + std::to_string(result->status);
        } else if (result->status != 200) {
            throw Error(ErrorKind::Transport, "endpoint " + url + " returned status " +
                                                  std::to_string(result->status));
        } else {
            nlohmann::json body = nlohmann::json::parse(result->body, nullptr, false);
            if (body.is_discarded())
                throw Error(ErrorKind::Transport, "endpoint " + url + " sent invalid JSON");
            return body;
        }
        if (attempt < kMaxAttempts)
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    }
    throw Error(ErrorKind::Transport, url + " failed after " +
                                          std::to_string(kMaxAttempts) +
                                          " attempts: " + last_error);
}

class RemoteChatBackend final : public AgentBackend {
public:
    explicit RemoteChatBackend(AgentBackendConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty())
            throw Error(ErrorKind::Config, "remote backend needs an endpoint");
    }

    std::string complete(const PromptBundle& prompt) override {
        const nlohmann::json payload{
            {"model", config_.model},
            {"messages",
             {{{"role", "system"}, {"content", prompt.system_text}},
              {{"role", "user"}, {"content", prompt.user_text}}}},
            {"temperature", config_.temperature},
            {"top_p", config_.top_p},
        };
        const nlohmann::json body =
            post_json(config_.endpoint, config_.api_key_env, payload);
        if (!body.contains("choices") || !body.at("choices").is_array() ||
            body.at("choices").empty())
            throw Error(ErrorKind::Transport, "chat reply carries no choices");
        const auto& message = body.at("choices").at(0).at("message");
        if (!message.contains("content") || !message.at("content").is_string())
            throw Error(ErrorKind::Transport, "chat reply carries no text content");
        return message.at("content").get<std::string>();
    }

    bool retry_on_parse_error() const override { return true; }
    bool concurrent_safe() const override { return true; }
    std::string name() const override { return "remote:" + config_.model; }

private:
    AgentBackendConfig config_;
};

class RemoteEmbedder final : public EmbeddingProvider {
public:
    explicit RemoteEmbedder(EmbeddingProviderConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty())
            throw Error(ErrorKind::Config, "remote embedder needs an endpoint");
    }

    UnitVector embed(std::string_view text) const override {
        if (text.empty()) throw Error(ErrorKind::Validation, "cannot embed empty text");
        const nlohmann::json payload{{"model", config_.model},
                                     {"input", {std::string(text)}}};
        const nlohmann::json body =
            post_json(config_.endpoint, config_.api_key_env, payload);
        if (!body.contains("data") || !body.at("data").is_array() ||
            body.at("data").empty())
            throw Error(ErrorKind::Transport, "embedding reply carries no data");
        const auto& vector = body.at("data").at(0).at("embedding");
        if (!vector.is_array())
            throw Error(ErrorKind::Transport, "embedding is not an array");
        std::vector<double> values = vector.get<std::vector<double>>();
        if (values.size() != config_.dim)
            throw Error(ErrorKind::Transport,
                        "embedding dim " + std::to_string(values.size()) +
                            " does not match configured " + std::to_string(config_.dim));
        return UnitVector::normalized(std::move(values));
    }

    size_t dim() const override { return config_.dim; }

private:
    EmbeddingProviderConfig config_;
};

}  // namespace

std::shared_ptr<AgentBackend> make_remote_chat_backend(const AgentBackendConfig& config) {
    return std::make_shared<RemoteChatBackend>(config);
}

std::shared_ptr<EmbeddingProvider> make_remote_embedder(
    const EmbeddingProviderConfig& config) {
    return std::make_shared<RemoteEmbedder>(config);
}

}  // namespace collegium
