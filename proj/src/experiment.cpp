#include "ideabench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ideabench/categorizer.hpp"
#include "ideabench/metrics.hpp"
#include "ideabench/strategies.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace ideabench {

const char* kCodeVersion = "0.1.0";

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "sim") return BackendKind::sim;
    if (s == "live") return BackendKind::live;
    throw ConfigError("unknown backend: " + s + " (expected sim or live)");
}

std::string backend_kind_to_string(BackendKind k) { return k == BackendKind::sim ? "sim" : "live"; }

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return from_json_text(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("backend")) cfg.backend = backend_kind_from_string(j["backend"].get<std::string>());
    cfg.seed = j.value("seed", cfg.seed);
    cfg.model_id = j.value("model_id", cfg.model_id);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("cache_dir") && !j["cache_dir"].is_null())
        cfg.cache_dir = j["cache_dir"].get<std::string>();
    if (j.contains("scheme_path") && !j["scheme_path"].is_null())
        cfg.scheme_path = j["scheme_path"].get<std::string>();
    cfg.persona_dir = j.value("persona_dir", cfg.persona_dir);
    cfg.num_ideas = j.value("num_ideas", cfg.num_ideas);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.embeddings = j.value("embeddings", cfg.embeddings);
    cfg.include_incomplete = j.value("include_incomplete", cfg.include_incomplete);
    cfg.offtask_threshold = j.value("offtask_threshold", cfg.offtask_threshold);

    if (j.contains("conditions")) {
        for (const auto& cj : j["conditions"]) {
            ConditionConfig cc;
            cc.kind = condition_kind_from_string(cj.at("kind").get<std::string>());
            cc.count = cj.value("count", 1);
            cc.temperature = cj.value("temperature", 1.0);
            if (cj.contains("persona_pool"))
                cc.persona_pool = persona_pool_from_string(cj["persona_pool"].get<std::string>());
            if (cj.contains("seed_corpus") && !cj["seed_corpus"].is_null())
                cc.seed_corpus = cj["seed_corpus"].get<std::string>();
            if (cj.contains("seed_texts"))
                for (const auto& t : cj["seed_texts"]) cc.seed_texts.push_back(t.get<std::string>());
            if (cj.contains("label") && !cj["label"].is_null())
                cc.label = cj["label"].get<std::string>();
            cfg.conditions.push_back(std::move(cc));
        }
    }

    if (j.contains("bootstrap")) {
        const auto& bj = j["bootstrap"];
        cfg.bootstrap.group_size = bj.value("group_size", cfg.bootstrap.group_size);
        cfg.bootstrap.iterations = bj.value("iterations", cfg.bootstrap.iterations);
        cfg.bootstrap.rng_seed = bj.value("seed", cfg.seed);
        cfg.bootstrap.replacement = bj.value("replacement", cfg.bootstrap.replacement);
    } else {
        cfg.bootstrap.rng_seed = cfg.seed;
    }

    if (j.contains("sim")) {
        const auto& sj = j["sim"];
        cfg.sim.rho = sj.value("rho", cfg.sim.rho);
        cfg.sim.phi = sj.value("phi", cfg.sim.phi);
        cfg.sim.embedding_dim = sj.value("embedding_dim", cfg.sim.embedding_dim);
    }
    if (j.contains("live")) {
        const auto& lj = j["live"];
        cfg.live.base_url = lj.value("base_url", cfg.live.base_url);
        cfg.live.chat_path = lj.value("chat_path", cfg.live.chat_path);
        cfg.live.embeddings_path = lj.value("embeddings_path", cfg.live.embeddings_path);
        cfg.live.api_key_env = lj.value("api_key_env", cfg.live.api_key_env);
        cfg.live.embedding_model = lj.value("embedding_model", cfg.live.embedding_model);
        cfg.live.embedding_dim = lj.value("embedding_dim", cfg.live.embedding_dim);
    }
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["backend"] = backend_kind_to_string(backend);
    j["seed"] = seed;
    j["model_id"] = model_id;
    j["out_dir"] = out_dir;
    if (cache_dir) j["cache_dir"] = *cache_dir;
    if (scheme_path) j["scheme_path"] = *scheme_path;
    j["persona_dir"] = persona_dir;
    j["num_ideas"] = num_ideas;
    j["jobs"] = jobs;
    j["embeddings"] = embeddings;
    j["include_incomplete"] = include_incomplete;
    j["offtask_threshold"] = offtask_threshold;
    j["conditions"] = json::array();
    for (const auto& cc : conditions) {
        json cj;
        cj["kind"] = ideabench::to_string(cc.kind);
        cj["count"] = cc.count;
        cj["temperature"] = cc.temperature;
        cj["persona_pool"] = ideabench::to_string(cc.persona_pool);
        if (cc.seed_corpus) cj["seed_corpus"] = *cc.seed_corpus;
        if (!cc.seed_texts.empty()) cj["seed_texts"] = cc.seed_texts;
        if (cc.label) cj["label"] = *cc.label;
        j["conditions"].push_back(std::move(cj));
    }
    j["bootstrap"] = {{"group_size", bootstrap.group_size},
                      {"iterations", bootstrap.iterations},
                      {"seed", bootstrap.rng_seed},
                      {"replacement", bootstrap.replacement}};
    j["sim"] = {{"rho", sim.rho}, {"phi", sim.phi}, {"embedding_dim", sim.embedding_dim}};
    j["live"] = {{"base_url", live.base_url},
                 {"chat_path", live.chat_path},
                 {"embeddings_path", live.embeddings_path},
                 {"api_key_env", live.api_key_env},
                 {"embedding_model", live.embedding_model},
                 {"embedding_dim", live.embedding_dim}};
    return j.dump(2);
}

std::string ExperimentConfig::config_hash() const { return sha256_hex(to_json_text()); }

CategoryScheme ExperimentConfig::scheme() const {
    return scheme_path ? CategoryScheme::load(*scheme_path) : CategoryScheme::builtin();
}

void ExperimentConfig::validate() const {
    if (num_ideas < 1) throw ConfigError("num_ideas must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    for (const auto& cc : conditions) {
        if (cc.count < 1) throw ConfigError("condition count must be >= 1");
        const bool persona_kind = cc.kind == ConditionKind::persona_sequential ||
                                  cc.kind == ConditionKind::persona_cot_batch;
        if (persona_kind && cc.persona_pool == PersonaPoolId::none)
            throw ConfigError("condition " + ideabench::to_string(cc.kind) +
                              " requires persona_pool ordinary or entrepreneur");
        if (cc.kind == ConditionKind::seeded && !cc.seed_corpus && cc.seed_texts.empty())
            throw ConfigError("seeded condition requires seed_corpus or seed_texts");
    }
}

std::shared_ptr<Backend> make_backend(const ExperimentConfig& config) {
    if (config.backend == BackendKind::sim) {
        PopulationParams params;
        params.rho = config.sim.rho;
        params.phi = config.sim.phi;
        params.rng_seed = config.seed;
        params.scheme = config.scheme();
        SimBackendOptions options;
        options.embedding_dim = config.sim.embedding_dim;
        return make_sim_backend(std::move(params), options);
    }
    HttpBackendConfig http;
    http.base_url = config.live.base_url;
    http.chat_path = config.live.chat_path;
    http.embeddings_path = config.live.embeddings_path;
    http.embedding_model = config.live.embedding_model;
    http.embedding_dim = config.live.embedding_dim;
    const char* key = std::getenv(config.live.api_key_env.c_str());
    if (!key || !*key)
        throw ConfigError("live backend requires API key in env var " + config.live.api_key_env);
    http.api_key = key;
    return make_http_backend(std::move(http));
}

std::unique_ptr<Gateway> make_gateway(const ExperimentConfig& config,
                                      std::shared_ptr<Backend> backend) {
    GatewayOptions options;
    options.cache_dir = config.cache_dir ? *config.cache_dir
                                         : (fs::path(config.out_dir) / "cache").string();
    options.max_in_flight = std::max(config.jobs, 4);
    return std::make_unique<Gateway>(std::move(backend), std::move(options));
}

namespace {

struct PlannedSession {
    SessionPlan plan;
    std::string group;
};

std::string condition_group_label(const ConditionConfig& cc) {
    if (cc.label) return *cc.label;
    ConditionSpec spec;
    spec.kind = cc.kind;
    spec.persona_pool = cc.persona_pool;
    if (cc.persona_pool != PersonaPoolId::none) spec.persona = "x";
    return spec.group_label();
}

std::vector<PlannedSession> plan_sessions(const ExperimentConfig& config) {
    if (config.conditions.empty()) throw ConfigError("no conditions configured");
    std::vector<PlannedSession> plans;
    for (const auto& cc : config.conditions) {
        const std::string group = condition_group_label(cc);

        std::optional<PersonaPool> pool;
        const bool persona_kind = cc.kind == ConditionKind::persona_sequential ||
                                  cc.kind == ConditionKind::persona_cot_batch;
        const bool wants_personas = persona_kind || (cc.persona_pool != PersonaPoolId::none &&
                                                     cc.kind == ConditionKind::cot_revision_sequential);
        if (wants_personas) {
            const std::string file = cc.persona_pool == PersonaPoolId::ordinary
                                         ? "personas_ordinary.txt"
                                         : "personas_entrepreneur.txt";
            pool = PersonaPool::load(cc.persona_pool,
                                     (fs::path(config.persona_dir) / file).string());
            if (cc.count > static_cast<int>(pool->personas.size()))
                throw ConfigError("condition " + group + " needs " + std::to_string(cc.count) +
                                  " personas but pool has " +
                                  std::to_string(pool->personas.size()));
        }

        std::vector<std::string> seeds;
        if (cc.kind == ConditionKind::seeded) {
            if (!cc.seed_texts.empty()) {
                seeds = cc.seed_texts;
            } else {
                const auto donors = read_corpus(*cc.seed_corpus, CorpusFormat::jsonl);
                for (const auto& s : donors)
                    if (!s.ideas.empty()) seeds.push_back(s.ideas.front().text);
            }
            if (static_cast<int>(seeds.size()) < cc.count)
                throw ConfigError("seeded condition needs " + std::to_string(cc.count) +
                                  " seed texts, found " + std::to_string(seeds.size()));
        }

        for (int i = 0; i < cc.count; ++i) {
            SessionPlan plan;
            plan.num_ideas = config.num_ideas;
            std::ostringstream id;
            id << group << "_p" << std::setw(3) << std::setfill('0') << (i + 1);
            plan.participant_id = id.str();
            plan.condition.kind = cc.kind;
            plan.condition.temperature = cc.temperature;
            plan.condition.model_id = config.model_id;
            plan.condition.persona_pool = cc.persona_pool;
            if (pool) plan.condition.persona = pool->personas[static_cast<std::size_t>(i)];
            if (cc.kind == ConditionKind::seeded)
                plan.condition.seed_text = seeds[static_cast<std::size_t>(i)];
            plan.validate();
            plans.push_back({std::move(plan), group});
        }
    }
    return plans;
}

void write_meta(json& j, const ExperimentConfig& config, const CategoryScheme& scheme) {
    j["meta"] = {{"config_hash", config.config_hash()},
                 {"scheme_version", scheme.version()},
                 {"code_version", kCodeVersion},
                 {"generated_at", timestamp_utc()}};
}

// Provenance comment line for CSV reports (no timestamp: CSV bytes stay
// deterministic).
std::string csv_meta_line(const ExperimentConfig& config, const CategoryScheme& scheme) {
    return "# config_hash=" + config.config_hash() + " scheme_version=" + scheme.version() +
           " code_version=" + kCodeVersion;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

GenerateResult cmd_generate(const ExperimentConfig& config, bool resume) {
    const auto plans = plan_sessions(config);
    fs::create_directories(config.out_dir);
    const std::string corpus_path = (fs::path(config.out_dir) / "corpus.jsonl").string();

    std::vector<Session> existing;
    std::set<std::string> have;
    if (resume && fs::exists(corpus_path)) {
        existing = read_corpus(corpus_path, CorpusFormat::jsonl);
        for (const auto& s : existing) have.insert(s.id);
    }

    auto backend = make_backend(config);
    auto gateway = make_gateway(config, backend);

    std::vector<std::optional<Session>> produced(plans.size());
    std::vector<std::string> failures;
    std::mutex failures_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plans.size()) return;
            if (have.count(plans[i].plan.participant_id)) continue;
            try {
                produced[i] = run_session(plans[i].plan, *gateway);
            } catch (const std::exception& e) {
                std::lock_guard lock(failures_mutex);
                failures.push_back(plans[i].plan.participant_id + ": " + e.what());
            }
        }
    };
    if (config.jobs > 1) {
        std::vector<std::thread> threads;
        const int n = std::min<int>(config.jobs, static_cast<int>(plans.size()));
        for (int t = 0; t < n; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    } else {
        worker();
    }

    std::vector<Session> sessions = std::move(existing);
    for (auto& s : produced)
        if (s) sessions.push_back(std::move(*s));
    std::sort(sessions.begin(), sessions.end(),
              [](const Session& a, const Session& b) { return a.id < b.id; });

    write_corpus(sessions, corpus_path, CorpusFormat::jsonl);

    GenerateResult result;
    result.corpus_path = corpus_path;
    result.sessions = sessions.size();
    result.failures = std::move(failures);
    return result;
}

CategorizeResult cmd_categorize(const ExperimentConfig& config, const std::string& corpus_in,
                                bool pipeline_mode) {
    auto sessions = read_corpus(corpus_in, CorpusFormat::jsonl);
    auto backend = make_backend(config);
    auto gateway = make_gateway(config, backend);
    fs::create_directories(config.out_dir);

    CategorizeResult result;
    if (pipeline_mode) {
        std::vector<Idea> ideas;
        for (const auto& s : sessions)
            for (const auto& idea : s.ideas) ideas.push_back(idea);
        auto initial = initial_label(ideas, *gateway, config.model_id);
        for (auto& f : initial.failures) result.flagged.push_back(std::move(f));
        const auto map =
            abstract_hierarchy(initial.labels, {9, 9, 10}, *gateway, config.model_id);
        sessions = relabel_corpus(sessions, initial.labels, map);
        result.labeled = ideas.size();

        auto map_out = open_out((fs::path(config.out_dir) / "abstraction_map.json").string());
        map_out << map.to_json_text() << "\n";
    } else {
        const auto scheme = config.scheme();
        auto labeled = label_corpus_fixed(sessions, scheme, *gateway, config.model_id);
        sessions = std::move(labeled.sessions);
        result.labeled = labeled.labeled;
        result.flagged = std::move(labeled.flagged);
    }

    result.corpus_path = (fs::path(config.out_dir) / "corpus_labeled.jsonl").string();
    write_corpus(sessions, result.corpus_path, CorpusFormat::jsonl);
    return result;
}

namespace {

std::map<std::string, std::vector<Session>> group_sessions(const ExperimentConfig& config,
                                                           const std::vector<Session>& all) {
    const auto filtered = filter_offtask(all, config.offtask_threshold);
    const auto usable = analysis_view(filtered.kept, config.include_incomplete);
    const auto scheme = config.scheme();
    std::map<std::string, std::vector<Session>> groups;
    for (const auto& s : usable) {
        if (!s.fully_labeled())
            throw DataError("session " + s.id + " is not fully labeled; run categorize first");
        for (const auto& idea : s.ideas) {
            if (idea.label->scheme_version != scheme.version())
                throw DataError("session " + s.id + " is labeled under scheme '" +
                                idea.label->scheme_version + "', active scheme is '" +
                                scheme.version() + "'");
            // Re-validates every stored label against the active scheme.
            static_cast<void>(IdeaLabel::checked(scheme, idea.label->industry_context,
                                                 idea.label->psychological_need,
                                                 idea.label->product_form));
        }
        groups[s.group_label()].push_back(s);
    }
    if (groups.empty()) throw DataError("no usable sessions to analyze");
    return groups;
}

json comparison_to_json(const BootstrapComparison& cmp) {
    json j;
    j["metric"] = to_string(cmp.metric);
    j["first_ideas_only"] = cmp.first_ideas_only;
    j["method"] = {{"group_size", cmp.config.group_size},
                   {"iterations", cmp.config.iterations},
                   {"seed", cmp.config.rng_seed},
                   {"replacement", cmp.config.replacement},
                   {"se", "stddev of iteration statistics / sqrt(iterations)"},
                   {"p_value", "two-sided z-test on iteration means; percentile overlap emitted"}};
    j["conditions"] = json::object();
    for (const auto& [name, stats] : cmp.conditions)
        j["conditions"][name] = {{"mean", stats.mean}, {"se", stats.se}};
    j["pairs"] = json::array();
    for (const auto& p : cmp.pairs)
        j["pairs"].push_back({{"a", p.a},
                              {"b", p.b},
                              {"diff", p.diff},
                              {"z", std::isfinite(p.z) ? json(p.z) : json("inf")},
                              {"p_z", p.p_z},
                              {"p_percentile", p.p_percentile}});
    return j;
}

}  // namespace

AnalyzeResult cmd_analyze(const ExperimentConfig& config, const std::string& corpus_path) {
    const auto all = read_corpus(corpus_path, CorpusFormat::jsonl);
    const auto groups = group_sessions(config, all);
    const auto scheme = config.scheme();
    fs::create_directories(config.out_dir);

    AnalyzeResult result;
    auto emit = [&](const std::string& name) {
        const std::string path = (fs::path(config.out_dir) / name).string();
        result.report_paths.push_back(path);
        return path;
    };

    // Full-sample table: condition, total categories, unique combinations,
    // total ideas.
    {
        auto out = open_out(emit("full_sample.csv"));
        out << csv_meta_line(config, scheme) << "\n";
        out << "condition,total_categories,unique_combinations,total_ideas\n";
        for (const auto& [name, sessions] : groups) {
            std::vector<const Session*> ptrs;
            for (const auto& s : sessions) ptrs.push_back(&s);
            const auto scores = diversity_scores(pooled_labels(ptrs));
            result.full_sample[name] = scores;
            out << name << "," << scores.t_cat << "," << scores.t_comb << "," << scores.n_ideas
                << "\n";
        }
    }

    // Per-session metric rows for plotting.
    {
        auto out = open_out(emit("sessions.csv"));
        out << csv_meta_line(config, scheme) << "\n";
        out << "condition,session_id,t_cat,t_comb,d_mean,n_ideas\n";
        for (const auto& [name, sessions] : groups) {
            for (const auto& s : sessions) {
                const auto scores = diversity_scores(pooled_labels({&s}));
                out << name << "," << s.id << "," << scores.t_cat << "," << scores.t_comb << ","
                    << (scores.d_mean ? fmt(*scores.d_mean) : "") << "," << scores.n_ideas << "\n";
            }
        }
    }

    // Bootstrap comparison for all three metrics.
    {
        json j;
        write_meta(j, config, scheme);
        j["comparisons"] = json::array();
        auto csv = open_out(emit("bootstrap.csv"));
        csv << csv_meta_line(config, scheme) << "\n";
        csv << "metric,condition,mean,se\n";
        for (MetricId metric : {MetricId::t_cat, MetricId::t_comb, MetricId::d_mean}) {
            const auto cmp = bootstrap_compare(groups, metric, config.bootstrap);
            j["comparisons"].push_back(comparison_to_json(cmp));
            for (const auto& [name, stats] : cmp.conditions)
                csv << to_string(metric) << "," << name << "," << fmt(stats.mean) << ","
                    << fmt(stats.se) << "\n";
        }
        auto out = open_out(emit("bootstrap.json"));
        out << j.dump(2) << "\n";
    }

    // Fixation fit per condition.
    {
        json j;
        write_meta(j, config, scheme);
        j["conditions"] = json::object();
        auto csv = open_out(emit("fixation.csv"));
        csv << csv_meta_line(config, scheme) << "\n";
        csv << "condition,session_id,slope,intercept\n";
        for (const auto& [name, sessions] : groups) {
            const auto fit = fit_fixation(sessions);
            j["conditions"][name] = {{"mean_slope", fit.mean_slope},
                                     {"se_slope", fit.se_slope},
                                     {"sessions", fit.sessions.size()}};
            for (const auto& ps : fit.sessions)
                csv << name << "," << ps.session_id << "," << fmt(ps.slope) << ","
                    << fmt(ps.intercept) << "\n";
        }
        auto out = open_out(emit("fixation.json"));
        out << j.dump(2) << "\n";
    }

    // First-idea diversity (knowledge partitioning), all three metrics.
    {
        json j;
        write_meta(j, config, scheme);
        j["comparisons"] = json::array();
        for (MetricId metric : {MetricId::t_cat, MetricId::t_comb, MetricId::d_mean}) {
            if (metric == MetricId::d_mean && config.bootstrap.group_size < 2)
                continue;  // one first idea has no pairs
            j["comparisons"].push_back(
                comparison_to_json(first_idea_diversity(groups, config.bootstrap, metric)));
        }
        auto out = open_out(emit("first_ideas.json"));
        out << j.dump(2) << "\n";
    }

    // Embedding analysis: centroids + dispersion, exported for external
    // projection; statistics stay in the full embedding dimension.
    if (config.embeddings) {
        auto backend = make_backend(config);
        auto gateway = make_gateway(config, backend);

        auto emb_csv = open_out(emit("embeddings.csv"));
        emb_csv << csv_meta_line(config, scheme) << "\n";
        emb_csv << "condition,session_id,idea_index,values...\n";
        auto cent_csv = open_out(emit("centroids.csv"));
        cent_csv << csv_meta_line(config, scheme) << "\n";
        cent_csv << "condition,session_id,values...\n";

        json j;
        write_meta(j, config, scheme);
        j["conditions"] = json::object();
        for (const auto& [name, sessions] : groups) {
            std::vector<std::vector<std::vector<double>>> vectors;
            for (const auto& s : sessions) {
                std::vector<std::vector<double>> per_session;
                for (const auto& idea : s.ideas) {
                    auto v = gateway->embed_text(idea.text);
                    emb_csv << name << "," << s.id << "," << idea.index;
                    for (double x : v.values) emb_csv << "," << fmt(x);
                    emb_csv << "\n";
                    per_session.push_back(std::move(v.values));
                }
                vectors.push_back(std::move(per_session));
            }
            if (sessions.size() < 2) continue;
            const auto report = partitioning_report(sessions, vectors);
            for (std::size_t i = 0; i < report.centroids.size(); ++i) {
                cent_csv << name << "," << report.participant_ids[i];
                for (double x : report.centroids[i]) cent_csv << "," << fmt(x);
                cent_csv << "\n";
            }
            BootstrapConfig bcfg = config.bootstrap;
            bcfg.group_size = std::min<int>(bcfg.group_size, static_cast<int>(report.m));
            if (bcfg.group_size < 2) bcfg.group_size = 2;
            const auto boot = s_between_bootstrap(report.centroids, bcfg);
            j["conditions"][name] = {{"s_between", report.s_between},
                                     {"m", report.m},
                                     {"n", report.n},
                                     {"bootstrap_mean", boot.mean},
                                     {"bootstrap_se", boot.se},
                                     {"bootstrap_group_size", bcfg.group_size}};
        }
        auto out = open_out(emit("partitioning.json"));
        out << j.dump(2) << "\n";
    }

    return result;
}

SweepResult cmd_sweep_temperature(const ExperimentConfig& config,
                                  const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("temperature sweep requires at least one value");
    SweepResult result;
    result.temperatures = values;

    const auto scheme = config.scheme();
    for (double temp : values) {
        ExperimentConfig run = config;
        std::ostringstream dir;
        dir << config.out_dir << "/temp_" << temp;
        run.out_dir = dir.str();
        run.cache_dir = config.cache_dir ? *config.cache_dir
                                         : (fs::path(config.out_dir) / "cache").string();
        for (auto& cc : run.conditions) cc.temperature = temp;

        const auto gen = cmd_generate(run);
        const auto cat = cmd_categorize(run, gen.corpus_path);
        const auto ana = cmd_analyze(run, cat.corpus_path);
        result.tables.push_back(ana.full_sample);
    }

    fs::create_directories(config.out_dir);
    result.report_path = (fs::path(config.out_dir) / "sweep.csv").string();
    auto out = open_out(result.report_path);
    out << csv_meta_line(config, scheme) << "\n";
    out << "temperature,condition,total_categories,unique_combinations,total_ideas\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        for (const auto& [name, scores] : result.tables[i])
            out << fmt(values[i]) << "," << name << "," << scores.t_cat << "," << scores.t_comb
                << "," << scores.n_ideas << "\n";
    return result;
}

}  // namespace ideabench
