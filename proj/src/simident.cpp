#include "ideabench/simident.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ideabench/categorizer.hpp"
#include "ideabench/rng.hpp"

using nlohmann::json;

namespace ideabench {

namespace {

// Purpose tags keep the counter-based streams disjoint. The copy stream is
// the only one phi touches, so idea #1 is bit-identical across phi values.
constexpr std::uint64_t kHomeTag = 1;
constexpr std::uint64_t kMixTag = 2;
constexpr std::uint64_t kCopyTag = 3;
constexpr std::uint64_t kPoolTag = 4;
constexpr std::uint64_t kEmbedTag = 5;
constexpr std::uint64_t kFallbackTag = 6;

std::size_t uniform_category(std::uint64_t key, std::size_t k) {
    return static_cast<std::size_t>(to_unit_real(splitmix64(key)) * static_cast<double>(k));
}

}  // namespace

void PopulationParams::validate() const {
    if (rho < 0.0 || rho > 1.0) throw ConfigError("rho must be in [0,1]");
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must be in [0,1]");
    if (scheme.dimension_count() != 3) throw ConfigError("sim scheme must have 3 dimensions");
}

double AgentProfile::category_probability(std::size_t dim, std::size_t cat) const {
    const double k = static_cast<double>(scheme.category_count(dim));
    return (1.0 - rho) / k + (cat == home[dim] ? rho : 0.0);
}

AgentProfile sample_agent(const PopulationParams& params, std::uint64_t agent_index) {
    params.validate();
    AgentProfile profile;
    profile.population_seed = params.rng_seed;
    profile.agent_index = agent_index;
    profile.rho = params.rho;
    profile.scheme = params.scheme;
    for (std::size_t d = 0; d < 3; ++d)
        profile.home[d] = uniform_category(hash_key(params.rng_seed, {kHomeTag, agent_index, d}),
                                           params.scheme.category_count(d));
    return profile;
}

std::size_t shared_pool_category(const PopulationParams& params, int idea_index, std::size_t dim) {
    return uniform_category(
        hash_key(params.rng_seed, {kPoolTag, static_cast<std::uint64_t>(idea_index), dim}),
        params.scheme.category_count(dim));
}

std::vector<IdeaLabel> generate_session_labels(const AgentProfile& profile, double phi, int n) {
    if (n < 1) throw ConfigError("generate_session_labels: n must be >= 1");
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must be in [0,1]");
    const CategoryScheme& scheme = profile.scheme;

    std::vector<std::array<std::size_t, 3>> cats(static_cast<std::size_t>(n));
    for (int t = 1; t <= n; ++t) {
        for (std::size_t d = 0; d < 3; ++d) {
            const std::uint64_t tu = static_cast<std::uint64_t>(t);
            if (t > 1) {
                const double copy_coin = unit_real_at(
                    profile.population_seed, {kCopyTag, profile.agent_index, tu, d});
                if (copy_coin < phi) {
                    cats[t - 1][d] = cats[t - 2][d];
                    continue;
                }
            }
            const double mix_coin =
                unit_real_at(profile.population_seed, {kMixTag, profile.agent_index, tu, d});
            if (mix_coin < profile.rho) {
                cats[t - 1][d] = profile.home[d];
            } else {
                // Population-shared pool draw: identical for every agent.
                cats[t - 1][d] = uniform_category(
                    hash_key(profile.population_seed, {kPoolTag, tu, d}),
                    scheme.category_count(d));
            }
        }
    }

    std::vector<IdeaLabel> labels;
    labels.reserve(cats.size());
    for (const auto& c : cats) {
        labels.push_back(IdeaLabel{scheme.dimensions()[0].categories[c[0]],
                                   scheme.dimensions()[1].categories[c[1]],
                                   scheme.dimensions()[2].categories[c[2]],
                                   scheme.version()});
    }
    return labels;
}

std::string render_idea_text(const IdeaLabel& label, std::uint64_t seed) {
    // Three phrasings; all embed the category names verbatim and avoid words
    // that could collide with category names during scanning.
    const std::uint64_t pick =
        hash_str(hash_str(hash_str(hash_key(seed, {0x72656e64ULL}), label.industry_context),
                          label.psychological_need),
                 label.product_form) %
        3;
    switch (pick) {
        case 0:
            return "A fitness product rooted in " + label.industry_context +
                   ", built to deliver " + label.psychological_need + ", taking the shape of " +
                   label.product_form + ".";
        case 1:
            return "Concept: a " + label.product_form + " offering centered on " +
                   label.industry_context + ", serving " + label.psychological_need + ".";
        default:
            return "This one pairs " + label.industry_context + " with " +
                   label.psychological_need + ", packaged as " + label.product_form + ".";
    }
}

std::optional<IdeaLabel> scan_label(const CategoryScheme& scheme, const std::string& text) {
    const std::string haystack = " " + normalize_category(text) + " ";
    std::array<std::string, 3> found;
    for (std::size_t d = 0; d < 3; ++d) {
        bool hit = false;
        for (const auto& cat : scheme.dimensions()[d].categories) {
            const std::string needle = " " + normalize_category(cat) + " ";
            if (haystack.find(needle) != std::string::npos) {
                found[d] = cat;
                hit = true;
                break;
            }
        }
        if (!hit) return std::nullopt;
    }
    return IdeaLabel{found[0], found[1], found[2], scheme.version()};
}

namespace {

class SimBackend : public Backend {
public:
    SimBackend(PopulationParams params, SimBackendOptions options)
        : params_(std::move(params)), options_(options) {
        params_.validate();
    }

    std::string id() const override {
        std::ostringstream os;
        os << "sim:" << params_.rng_seed << ":rho=" << params_.rho << ":phi=" << params_.phi
           << ":dim=" << options_.embedding_dim << ":" << params_.scheme.version();
        return os.str();
    }

    std::string complete_chat(const ChatRequest& request) override {
        if (request.messages.empty()) throw BackendError("sim backend: empty message list");
        const std::string& prompt = request.messages.back().content;
        const std::uint64_t agent = request.sampling_seed.value_or(0);

        if (prompt.find(categorizer_prompts::kIdeaFenceOpen) != std::string::npos) {
            if (prompt.find("Assign exactly one category per dimension") != std::string::npos)
                return categorize_reply(prompt, /*free_text=*/false);
            if (prompt.find("one short free-text label per dimension") != std::string::npos)
                return categorize_reply(prompt, /*free_text=*/true);
        }
        if (prompt.rfind("Consolidate the raw labels", 0) == 0) return consolidation_reply(prompt);
        if (prompt.find("fitness product ideas below") != std::string::npos &&
            prompt.find("Please review the") != std::string::npos)
            return revision_reply(prompt);
        if (prompt.find("Return ONLY a JSON array") != std::string::npos ||
            prompt.find("Return ONLY the JSON array") != std::string::npos)
            return batch_reply(agent, prompt);
        if (prompt.find("Give me 1 new idea") != std::string::npos)
            return sequential_reply(agent, request);

        throw BackendError("sim backend: unrecognized prompt");
    }

    std::vector<double> embed(const std::string& text) override {
        const std::uint64_t key = hash_str(hash_key(params_.rng_seed, {kEmbedTag}), text);
        std::vector<double> v(options_.embedding_dim);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = 2.0 * unit_real_at(key, {i}) - 1.0;
        return v;
    }

    std::size_t embedding_dimension() const override { return options_.embedding_dim; }
    std::string embedding_model_id() const override { return "sim-embed"; }

private:
    std::vector<IdeaLabel> agent_labels(std::uint64_t agent, int n) const {
        return generate_session_labels(sample_agent(params_, agent), params_.phi, n);
    }

    std::string sequential_reply(std::uint64_t agent, const ChatRequest& request) const {
        int assistant_count = 0;
        for (const auto& m : request.messages)
            if (m.role == ChatRole::assistant) ++assistant_count;
        const int t = assistant_count + 1;
        const auto labels = agent_labels(agent, t);
        const std::string& prompt = request.messages.back().content;
        const bool capitalized = prompt.find("labeled 'Idea #") != std::string::npos;
        const std::string tag = capitalized ? "Idea" : "idea";
        return "**" + tag + " #" + std::to_string(t) + ":** " +
               render_idea_text(labels.back(), params_.rng_seed);
    }

    std::string batch_reply(std::uint64_t agent, const std::string& prompt) const {
        const int n = parse_count_after(prompt, "JSON array with ").value_or(10);
        const auto labels = agent_labels(agent, n);
        json arr = json::array();
        for (int k = 1; k <= n; ++k)
            arr.push_back({{"idea_number", k},
                           {"idea_content",
                            render_idea_text(labels[static_cast<std::size_t>(k - 1)],
                                             params_.rng_seed)}});
        return arr.dump();
    }

    std::string revision_reply(const std::string& prompt) const {
        json arr = json::array();
        int k = 0;
        std::istringstream lines(prompt);
        std::string line;
        while (std::getline(lines, line)) {
            const std::string prefix = "Idea #" + std::to_string(k + 1) + ": ";
            if (line.rfind(prefix, 0) != 0) continue;
            ++k;
            std::string text = line.substr(prefix.size());
            // "Bolder" rewrite: new phrasing, same underlying categories.
            if (auto label = scan_label(params_.scheme, text))
                text = render_idea_text(*label, hash_key(params_.rng_seed, {0xb01dULL}));
            arr.push_back({{"idea_number", k}, {"idea_content", "Reimagined: " + text}});
        }
        if (k == 0) throw BackendError("sim backend: revision prompt without idea lines");
        return arr.dump();
    }

    std::string categorize_reply(const std::string& prompt, bool free_text) const {
        const std::string idea = fenced_idea(prompt);
        std::array<std::string, 3> cats;
        if (auto label = scan_label(params_.scheme, idea)) {
            for (std::size_t d = 0; d < 3; ++d) cats[d] = label->dimension(d);
        } else {
            // Arbitrary text (human corpora, seeds): deterministic assignment
            // keyed by the text itself.
            const std::uint64_t key =
                hash_str(hash_key(params_.rng_seed, {kFallbackTag}), normalize_category(idea));
            for (std::size_t d = 0; d < 3; ++d) {
                auto partial = scan_dimension(d, idea);
                cats[d] = partial.value_or(params_.scheme.dimensions()[d].categories[uniform_category(
                    hash_key(key, {d}), params_.scheme.category_count(d))]);
            }
        }
        if (free_text)
            for (auto& c : cats) c = normalize_category(c);  // lowercased free-form wording
        json obj;
        obj["industry_context"] = cats[0];
        obj["psychological_need"] = cats[1];
        obj["product_form"] = cats[2];
        return obj.dump();
    }

    std::string consolidation_reply(const std::string& prompt) const {
        // Map every listed raw label to the scheme category it names (or a
        // deterministic pick when it names none), and return the scheme.
        static const char* kDimNames[3] = {"industry_context", "psychological_need",
                                           "product_form"};
        json mapping = json::array({json::object(), json::object(), json::object()});
        std::istringstream lines(prompt);
        std::string line;
        int dim = -1;
        while (std::getline(lines, line)) {
            if (line.rfind("Dimension ", 0) == 0) {
                for (int d = 0; d < 3; ++d)
                    if (line.find(kDimNames[d]) != std::string::npos) dim = d;
                continue;
            }
            if (dim < 0 || line.rfind("- ", 0) != 0) continue;
            const std::string raw = line.substr(2);
            auto resolved = scan_dimension(static_cast<std::size_t>(dim), raw);
            if (!resolved) {
                const std::uint64_t key = hash_str(
                    hash_key(params_.rng_seed, {kFallbackTag, static_cast<std::uint64_t>(dim)}),
                    normalize_category(raw));
                resolved = params_.scheme.dimensions()[static_cast<std::size_t>(dim)]
                               .categories[uniform_category(
                                   key, params_.scheme.category_count(static_cast<std::size_t>(dim)))];
            }
            mapping[static_cast<std::size_t>(dim)][raw] = *resolved;
        }
        json out;
        out["scheme"] = json::parse(params_.scheme.to_json_text());
        out["mapping"] = std::move(mapping);
        return out.dump();
    }

    std::optional<std::string> scan_dimension(std::size_t d, const std::string& text) const {
        const std::string haystack = " " + normalize_category(text) + " ";
        for (const auto& cat : params_.scheme.dimensions()[d].categories) {
            if (haystack.find(" " + normalize_category(cat) + " ") != std::string::npos) return cat;
        }
        return std::nullopt;
    }

    std::string fenced_idea(const std::string& prompt) const {
        const std::string open = categorizer_prompts::kIdeaFenceOpen;
        const std::string close = categorizer_prompts::kIdeaFenceClose;
        const auto a = prompt.find(open);
        const auto b = prompt.find(close);
        if (a == std::string::npos || b == std::string::npos || b <= a)
            throw BackendError("sim backend: labeling prompt without fenced idea");
        std::string idea = prompt.substr(a + open.size(), b - a - open.size());
        while (!idea.empty() && (idea.front() == '\n' || idea.front() == '\r')) idea.erase(0, 1);
        while (!idea.empty() && (idea.back() == '\n' || idea.back() == '\r')) idea.pop_back();
        return idea;
    }

    static std::optional<int> parse_count_after(const std::string& text, const std::string& marker) {
        const auto pos = text.find(marker);
        if (pos == std::string::npos) return std::nullopt;
        std::size_t i = pos + marker.size();
        int value = 0;
        bool any = false;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            value = value * 10 + (text[i] - '0');
            ++i;
            any = true;
        }
        if (!any) return std::nullopt;
        return value;
    }

    PopulationParams params_;
    SimBackendOptions options_;
};

}  // namespace

std::shared_ptr<Backend> make_sim_backend(PopulationParams params, SimBackendOptions options) {
    return std::make_shared<SimBackend>(std::move(params), options);
}

}  // namespace ideabench
