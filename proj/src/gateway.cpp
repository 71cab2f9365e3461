#include "ideabench/gateway.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "ideabench/rng.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace ideabench {

std::string to_string(ChatRole r) {
    switch (r) {
        case ChatRole::system: return "system";
        case ChatRole::user: return "user";
        case ChatRole::assistant: return "assistant";
    }
    throw BackendError("unknown chat role");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        if (ctx) EVP_MD_CTX_free(ctx);
        throw BackendError("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

CacheStore::CacheStore(std::string directory) : dir_(std::move(directory)) {
    fs::create_directories(dir_);
}

std::optional<std::string> CacheStore::get(const std::string& key) const {
    const fs::path path = fs::path(dir_) / (key + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str()).at("response").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError("corrupt cache entry " + path.string() + ": " + e.what());
    }
}

void CacheStore::put(const std::string& key, const std::string& request_json,
                     const std::string& response_text) {
    const fs::path path = fs::path(dir_) / (key + ".json");
    if (fs::exists(path)) return;  // append-only

    json entry;
    entry["key"] = key;
    entry["request"] = json::parse(request_json);
    entry["response"] = response_text;

    // Unique temp name per writer, then atomic rename.
    static std::atomic<std::uint64_t> counter{0};
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::this_thread::get_id() << "." << counter.fetch_add(1);
    const fs::path tmp = fs::path(dir_) / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DataError("cache write failed: " + tmp.string());
        out << entry.dump(2) << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        if (!fs::exists(path)) throw DataError("cache rename failed: " + path.string());
    }
}

namespace {

json messages_json(const std::vector<ChatMessage>& messages) {
    json arr = json::array();
    for (const auto& m : messages) arr.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return arr;
}

}  // namespace

std::string Gateway::chat_request_json(const std::string& backend_id, const ChatRequest& request) {
    json j;
    j["backend"] = backend_id;
    j["kind"] = "chat";
    j["model_id"] = request.model_id;
    j["messages"] = messages_json(request.messages);
    j["temperature"] = request.temperature;
    if (request.sampling_seed) j["sampling_seed"] = *request.sampling_seed;
    return j.dump();
}

std::string Gateway::chat_cache_key(const std::string& backend_id, const ChatRequest& request) {
    return sha256_hex(chat_request_json(backend_id, request));
}

std::string Gateway::embed_cache_key(const std::string& backend_id, const std::string& model_id,
                                     const std::string& text) {
    json j;
    j["backend"] = backend_id;
    j["kind"] = "embedding";
    j["model_id"] = model_id;
    j["text"] = text;
    return sha256_hex(j.dump());
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
    if (!backend_) throw ConfigError("gateway requires a backend");
    if (options_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (options_.cache_dir) cache_ = std::make_unique<CacheStore>(*options_.cache_dir);
}

void Gateway::acquire_slot() {
    std::unique_lock lock(mutex_);
    limiter_cv_.wait(lock,
                     [&] { return in_flight_ < static_cast<std::size_t>(options_.max_in_flight); });
    ++in_flight_;
}

void Gateway::release_slot() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    limiter_cv_.notify_one();
}

namespace {
struct SlotGuard {
    explicit SlotGuard(Gateway& gw, void (Gateway::*rel)()) : gw_(gw), rel_(rel) {}
    ~SlotGuard() { (gw_.*rel_)(); }
    Gateway& gw_;
    void (Gateway::*rel_)();
};
}  // namespace

template <typename Fn>
std::string Gateway::with_retries(Fn&& call) {
    const RetryPolicy& policy = options_.retry;
    std::string last_error;
    Rng jitter(std::chrono::steady_clock::now().time_since_epoch().count());
    for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
        try {
            acquire_slot();
            SlotGuard guard(*this, &Gateway::release_slot);
            return call();
        } catch (const AuthQuotaError&) {
            throw;  // verbatim, no retry
        } catch (const BackendError& e) {
            last_error = e.what();
            if (attempt == policy.attempts) break;
            double delay = policy.base_delay_ms * std::pow(2.0, attempt - 1);
            delay *= 1.0 + policy.jitter_fraction * (2.0 * jitter.unit_real() - 1.0);
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
        }
    }
    throw BackendError("transport failure after " + std::to_string(policy.attempts) +
                       " attempts: " + last_error);
}

std::string Gateway::complete_chat(const ChatRequest& request) {
    if (request.messages.empty()) throw ConfigError("chat request has no messages");
    for (const auto& m : request.messages)
        if (m.content.empty()) throw ConfigError("chat message content is empty");

    const std::string key = chat_cache_key(backend_->id(), request);
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            std::lock_guard lock(mutex_);
            ++cache_hits_;
            return *hit;
        }
    }
    const std::string response = with_retries([&] {
        {
            std::lock_guard lock(mutex_);
            ++backend_calls_;
        }
        return backend_->complete_chat(request);
    });
    if (cache_) cache_->put(key, chat_request_json(backend_->id(), request), response);
    return response;
}

EmbeddingVector Gateway::embed_text(const std::string& text) {
    if (text.empty()) throw ConfigError("embed_text: text is empty");

    const std::string model_id = backend_->embedding_model_id();
    const std::string key = embed_cache_key(backend_->id(), model_id, text);
    std::string payload;
    bool from_cache = false;
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            payload = *hit;
            from_cache = true;
            std::lock_guard lock(mutex_);
            ++cache_hits_;
        }
    }
    if (!from_cache) {
        payload = with_retries([&]() -> std::string {
            {
                std::lock_guard lock(mutex_);
                ++backend_calls_;
            }
            const auto values = backend_->embed(text);
            return json(values).dump();
        });
        if (cache_) {
            json req;
            req["backend"] = backend_->id();
            req["kind"] = "embedding";
            req["model_id"] = model_id;
            req["text"] = text;
            cache_->put(key, req.dump(), payload);
        }
    }

    EmbeddingVector vec;
    vec.model_id = model_id;
    try {
        vec.values = json::parse(payload).get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed embedding payload: ") + e.what());
    }
    if (vec.values.size() != backend_->embedding_dimension())
        throw BackendError("embedding dimension mismatch: got " +
                           std::to_string(vec.values.size()) + ", backend declares " +
                           std::to_string(backend_->embedding_dimension()));
    for (double v : vec.values)
        if (!std::isfinite(v)) throw BackendError("embedding contains non-finite entries");
    return vec;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, std::size_t embedding_dim)
    : responses_(responses.begin(), responses.end()), embedding_dim_(embedding_dim) {}

std::string ScriptedBackend::complete_chat(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    if (responses_.empty()) throw BackendError("scripted backend exhausted");
    std::string r = std::move(responses_.front());
    responses_.pop_front();
    return r;
}

std::vector<double> ScriptedBackend::embed(const std::string& text) {
    std::vector<double> v(embedding_dim_);
    for (std::size_t i = 0; i < embedding_dim_; ++i)
        v[i] = 2.0 * unit_real_at(hash_str(0x656d62ULL, text), {i}) - 1.0;
    return v;
}

}  // namespace ideabench
