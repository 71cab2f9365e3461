#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ideabench/errors.hpp"

namespace ideabench {

enum class ChatRole { system, user, assistant };

std::string to_string(ChatRole r);

struct ChatMessage {
    ChatRole role = ChatRole::user;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 1.0;
    // Per-participant sampling seed. Part of the cache key; backends that
    // support it (the simulator, services with a seed parameter) use it,
    // others ignore it.
    std::optional<std::uint64_t> sampling_seed;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string model_id;
};

// Auth/quota rejections are surfaced verbatim and never retried.
struct AuthQuotaError : BackendError {
    using BackendError::BackendError;
};

// One backend serves both chat completions and embeddings; the simulator,
// the scripted test double, and the HTTP client all implement this.
class Backend {
public:
    virtual ~Backend() = default;

    // Identifier that participates in cache keys. Must change whenever the
    // backend would answer differently (e.g. simulator parameters).
    virtual std::string id() const = 0;

    virtual std::string complete_chat(const ChatRequest& request) = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual std::size_t embedding_dimension() const = 0;
    virtual std::string embedding_model_id() const = 0;
};

// Append-only, content-addressed response cache: one JSON file per request
// hash, written atomically (temp file + rename). An existing entry is never
// overwritten, so any cached (request, response) pair replays bit-identically
// with the network disabled.
class CacheStore {
public:
    explicit CacheStore(std::string directory);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& request_json,
             const std::string& response_text);

    const std::string& directory() const { return dir_; }

private:
    std::string dir_;
};

std::string sha256_hex(const std::string& data);

struct RetryPolicy {
    int attempts = 3;
    double base_delay_ms = 250;  // doubled per attempt, +/- jitter
    double jitter_fraction = 0.25;
};

struct GatewayOptions {
    std::optional<std::string> cache_dir;  // nullopt disables caching
    RetryPolicy retry;
    int max_in_flight = 4;
};

// Uniform access to chat + embedding with caching, bounded retries and an
// in-flight limiter. Safe to call concurrently.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewayOptions options);

    std::string complete_chat(const ChatRequest& request);
    EmbeddingVector embed_text(const std::string& text);

    Backend& backend() { return *backend_; }
    std::size_t cache_hits() const { return cache_hits_; }
    std::size_t backend_calls() const { return backend_calls_; }

    static std::string chat_cache_key(const std::string& backend_id, const ChatRequest& request);
    static std::string embed_cache_key(const std::string& backend_id, const std::string& model_id,
                                       const std::string& text);
    static std::string chat_request_json(const std::string& backend_id, const ChatRequest& request);

private:
    template <typename Fn>
    std::string with_retries(Fn&& call);
    void acquire_slot();
    void release_slot();

    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::unique_ptr<CacheStore> cache_;
    std::mutex mutex_;
    std::condition_variable limiter_cv_;
    std::size_t in_flight_ = 0;
    std::size_t cache_hits_ = 0;
    std::size_t backend_calls_ = 0;
};

// Test double: replays a fixed queue of canned responses.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses, std::size_t embedding_dim = 8);

    std::string id() const override { return "scripted"; }
    std::string complete_chat(const ChatRequest& request) override;
    std::vector<double> embed(const std::string& text) override;
    std::size_t embedding_dimension() const override { return embedding_dim_; }
    std::string embedding_model_id() const override { return "scripted-embed"; }

    const std::vector<ChatRequest>& requests() const { return requests_; }

private:
    std::deque<std::string> responses_;
    std::vector<ChatRequest> requests_;
    std::size_t embedding_dim_;
    std::mutex mutex_;
};

struct HttpBackendConfig {
    std::string base_url;       // e.g. https://api.openai.com
    std::string chat_path = "/v1/chat/completions";
    std::string embeddings_path = "/v1/embeddings";
    std::string api_key;        // resolved from env by the caller
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dim = 1536;
    int timeout_seconds = 120;
};

// Chat-completion service speaking the messages-array JSON schema.
std::shared_ptr<Backend> make_http_backend(HttpBackendConfig config);

}  // namespace ideabench
