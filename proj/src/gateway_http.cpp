#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include "ideabench/gateway.hpp"

using nlohmann::json;

namespace ideabench {

namespace {

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
        if (config_.base_url.empty()) throw ConfigError("http backend requires base_url");
    }

    std::string id() const override { return "http:" + config_.base_url; }

    std::string complete_chat(const ChatRequest& request) override {
        json body;
        body["model"] = request.model_id;
        body["temperature"] = request.temperature;
        if (request.sampling_seed)
            body["seed"] = static_cast<std::int64_t>(*request.sampling_seed & 0x7fffffffULL);
        body["messages"] = json::array();
        for (const auto& m : request.messages)
            body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});

        const json reply = post(config_.chat_path, body);
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw BackendError(std::string("unexpected chat response shape: ") + e.what());
        }
    }

    std::vector<double> embed(const std::string& text) override {
        json body;
        body["model"] = config_.embedding_model;
        body["input"] = text;
        const json reply = post(config_.embeddings_path, body);
        try {
            return reply.at("data").at(0).at("embedding").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw BackendError(std::string("unexpected embedding response shape: ") + e.what());
        }
    }

    std::size_t embedding_dimension() const override { return config_.embedding_dim; }
    std::string embedding_model_id() const override { return config_.embedding_model; }

private:
    json post(const std::string& path, const json& body) {
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res)
            throw BackendError("transport error: " + httplib::to_string(res.error()) + " (" +
                               config_.base_url + path + ")");
        if (res->status == 401 || res->status == 403 || res->status == 429)
            throw AuthQuotaError("HTTP " + std::to_string(res->status) + ": " + res->body);
        if (res->status < 200 || res->status >= 300)
            throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body);
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw BackendError(std::string("response is not JSON: ") + e.what());
        }
    }

    HttpBackendConfig config_;
};

}  // namespace

std::shared_ptr<Backend> make_http_backend(HttpBackendConfig config) {
    return std::make_shared<HttpBackend>(std::move(config));
}

}  // namespace ideabench
