#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ideabench/analysis.hpp"
#include "ideabench/corpus.hpp"
#include "ideabench/gateway.hpp"
#include "ideabench/simident.hpp"

namespace ideabench {

extern const char* kCodeVersion;

enum class BackendKind { sim, live };

struct ConditionConfig {
    ConditionKind kind = ConditionKind::default_sequential;
    int count = 1;
    double temperature = 1.0;
    PersonaPoolId persona_pool = PersonaPoolId::none;
    std::optional<std::string> seed_corpus;        // seeded kind: corpus of donor sessions
    std::vector<std::string> seed_texts;           // seeded kind: explicit alternative
    std::optional<std::string> label;              // overrides the derived group label
};

struct LiveConfig {
    std::string base_url = "https://api.openai.com";
    std::string chat_path = "/v1/chat/completions";
    std::string embeddings_path = "/v1/embeddings";
    std::string api_key_env = "IDEABENCH_API_KEY";
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dim = 1536;
};

struct SimConfig {
    double rho = 0.5;
    double phi = 0.3;
    std::size_t embedding_dim = 32;
};

struct ExperimentConfig {
    BackendKind backend = BackendKind::sim;
    std::uint64_t seed = 0;
    std::string model_id = "gpt-4o-2024-11-20";
    std::string out_dir = "out";
    std::optional<std::string> cache_dir;    // defaults to <out_dir>/cache
    std::optional<std::string> scheme_path;  // builtin scheme when absent
    std::string persona_dir = "data";
    int num_ideas = 10;
    int jobs = 4;
    bool embeddings = false;
    bool include_incomplete = false;
    double offtask_threshold = 0.1;
    std::vector<ConditionConfig> conditions;
    BootstrapConfig bootstrap;
    SimConfig sim;
    LiveConfig live;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;  // fully resolved; hashed for provenance
    std::string config_hash() const;

    CategoryScheme scheme() const;
    void validate() const;
};

// Backend + gateway wired per config (cache under cache_dir).
std::shared_ptr<Backend> make_backend(const ExperimentConfig& config);
std::unique_ptr<Gateway> make_gateway(const ExperimentConfig& config,
                                      std::shared_ptr<Backend> backend);

struct GenerateResult {
    std::string corpus_path;
    std::size_t sessions = 0;
    std::vector<std::string> failures;  // "participant: error", session isolated
};

// One session per (condition, participant), written as JSONL. A failed
// session is recorded and skipped, it does not abort the run. With resume,
// sessions already present in the output corpus are kept.
GenerateResult cmd_generate(const ExperimentConfig& config, bool resume = false);

struct CategorizeResult {
    std::string corpus_path;
    std::size_t labeled = 0;
    std::vector<std::string> flagged;
};

CategorizeResult cmd_categorize(const ExperimentConfig& config, const std::string& corpus_in,
                                bool pipeline_mode = false);

struct AnalyzeResult {
    std::map<std::string, DiversityScores> full_sample;  // per condition group
    std::vector<std::string> report_paths;
};

AnalyzeResult cmd_analyze(const ExperimentConfig& config, const std::string& corpus_path);

struct SweepResult {
    std::vector<double> temperatures;
    // temperature -> (group -> scores)
    std::vector<std::map<std::string, DiversityScores>> tables;
    std::string report_path;
};

SweepResult cmd_sweep_temperature(const ExperimentConfig& config,
                                  const std::vector<double>& values);

}  // namespace ideabench
