#include "ideabench/categorizer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace ideabench {

std::optional<std::string> AbstractionMap::lookup(std::size_t dim, const std::string& raw_label) const {
    const auto& m = entries.at(dim);
    auto it = m.find(normalize_category(raw_label));
    if (it == m.end()) return std::nullopt;
    return it->second;
}

std::string AbstractionMap::to_json_text() const {
    json j;
    j["scheme"] = json::parse(scheme.to_json_text());
    j["entries"] = json::array();
    for (std::size_t d = 0; d < 3; ++d) {
        json dm = json::object();
        for (const auto& [raw, cat] : entries[d]) dm[raw] = cat;
        j["entries"].push_back(std::move(dm));
    }
    return j.dump(2);
}

AbstractionMap AbstractionMap::from_json_text(const std::string& text) {
    json j = json::parse(text);
    AbstractionMap map;
    map.scheme = CategoryScheme::from_json_text(j.at("scheme").dump());
    const auto& arr = j.at("entries");
    if (arr.size() != 3) throw DataError("abstraction map must cover 3 dimensions");
    for (std::size_t d = 0; d < 3; ++d)
        for (const auto& [raw, cat] : arr.at(d).items())
            map.entries[d][raw] = cat.get<std::string>();
    return map;
}

namespace categorizer_prompts {

const char* kTemplateVersion = "labeler_v1";
const char* kIdeaFenceOpen = "<<<IDEA>>>";
const char* kIdeaFenceClose = "<<<END IDEA>>>";

namespace {
std::string scheme_block(const CategoryScheme& scheme) {
    std::string out;
    for (std::size_t d = 0; d < scheme.dimension_count(); ++d) {
        const auto& dim = scheme.dimensions()[d];
        out += "- " + dim.name + ": ";
        for (std::size_t i = 0; i < dim.categories.size(); ++i) {
            if (i) out += "; ";
            out += dim.categories[i];
        }
        out += "\n";
    }
    return out;
}
}  // namespace

std::string fixed_label_prompt(const CategoryScheme& scheme, const std::string& idea_text) {
    return "Assign exactly one category per dimension to the product idea below, using only "
           "categories from this scheme (version " + scheme.version() + "):\n" +
           scheme_block(scheme) +
           "\n" + std::string(kIdeaFenceOpen) + "\n" + idea_text + "\n" + kIdeaFenceClose + "\n"
           "\n"
           "Respond with ONLY a JSON object with keys \"industry_context\", "
           "\"psychological_need\" and \"product_form\", whose values are category names copied "
           "verbatim from the scheme.";
}

std::string fixed_label_corrective_prompt() {
    return "Your previous answer was not valid. Each value must be exactly one category name "
           "from the scheme, copied verbatim. Respond with ONLY the JSON object.";
}

std::string initial_label_prompt(const std::string& idea_text) {
    return "Give the product idea below one short free-text label per dimension: its industry "
           "context, the psychological need it serves, and its product form.\n"
           "\n" + std::string(kIdeaFenceOpen) + "\n" + idea_text + "\n" + kIdeaFenceClose + "\n"
           "\n"
           "Respond with ONLY a JSON object with keys \"industry_context\", "
           "\"psychological_need\" and \"product_form\", whose values are short free-text "
           "labels.";
}

std::string consolidation_prompt(const std::array<std::vector<std::string>, 3>& raw_by_dimension,
                                 const std::array<std::size_t, 3>& target_sizes) {
    static const char* kDimNames[3] = {"industry_context", "psychological_need", "product_form"};
    std::string out =
        "Consolidate the raw labels below into broader, non-overlapping categories, eliminating "
        "redundancy while keeping meaningful distinctions. Produce exactly the requested number "
        "of categories per dimension and map every raw label to one category.\n\n";
    for (std::size_t d = 0; d < 3; ++d) {
        out += "Dimension " + std::string(kDimNames[d]) + " (consolidate into " +
               std::to_string(target_sizes[d]) + " categories):\n";
        for (const auto& raw : raw_by_dimension[d]) out += "- " + raw + "\n";
        out += "\n";
    }
    out +=
        "Respond with ONLY a JSON object of the form {\"scheme\": {\"version\": string, "
        "\"dimensions\": [{\"name\": string, \"categories\": [string]}]}, \"mapping\": "
        "[{raw label: category}, {raw label: category}, {raw label: category}]} where the three "
        "mapping objects correspond to the dimensions in order.";
    return out;
}

}  // namespace categorizer_prompts

namespace {

// First balanced JSON object in raw; labeling replies may be fenced or
// surrounded by prose.
std::optional<json> extract_first_object(const std::string& raw) {
    for (std::size_t start = 0; start < raw.size(); ++start) {
        if (raw[start] != '{') continue;
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    std::string candidate = raw.substr(start, i - start + 1);
                    if (json::accept(candidate)) return json::parse(candidate);
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

std::array<std::string, 3> triple_from_reply(const std::string& reply) {
    const auto obj = extract_first_object(reply);
    if (!obj) throw DataError("no JSON object in labeling reply");
    std::array<std::string, 3> out;
    static const char* kKeys[3] = {"industry_context", "psychological_need", "product_form"};
    for (std::size_t d = 0; d < 3; ++d) {
        if (!obj->contains(kKeys[d]) || !(*obj)[kKeys[d]].is_string())
            throw DataError(std::string("labeling reply missing key ") + kKeys[d]);
        out[d] = (*obj)[kKeys[d]].get<std::string>();
        if (out[d].empty()) throw DataError(std::string("empty label for ") + kKeys[d]);
    }
    return out;
}

ChatRequest labeling_request(const std::string& model_id, std::string prompt) {
    ChatRequest req;
    req.model_id = model_id;
    req.temperature = kCategorizerTemperature;
    req.messages.push_back({ChatRole::user, std::move(prompt)});
    return req;
}

}  // namespace

IdeaLabel label_idea_fixed(const Idea& idea, const CategoryScheme& scheme, Gateway& gateway,
                           const std::string& model_id) {
    if (scheme.dimension_count() != 3) throw ConfigError("scheme must have 3 dimensions");

    ChatRequest req = labeling_request(
        model_id, categorizer_prompts::fixed_label_prompt(scheme, idea.text));
    std::string reply = gateway.complete_chat(req);

    for (int attempt = 0;; ++attempt) {
        try {
            const auto triple = triple_from_reply(reply);
            return IdeaLabel::checked(scheme, triple[0], triple[1], triple[2]);
        } catch (const DataError& e) {
            if (attempt >= 1)
                throw DataError("labeling failed for " + idea.session_id + "#" +
                                std::to_string(idea.index) + " after corrective retry: " +
                                e.what());
            req.messages.push_back({ChatRole::assistant, reply});
            req.messages.push_back(
                {ChatRole::user, categorizer_prompts::fixed_label_corrective_prompt()});
            reply = gateway.complete_chat(req);
        }
    }
}

InitialLabelResult initial_label(const std::vector<Idea>& ideas, Gateway& gateway,
                                 const std::string& model_id) {
    if (ideas.empty()) throw DataError("initial_label: no ideas");
    InitialLabelResult result;
    for (const auto& idea : ideas) {
        try {
            const std::string reply = gateway.complete_chat(labeling_request(
                model_id, categorizer_prompts::initial_label_prompt(idea.text)));
            const auto triple = triple_from_reply(reply);
            for (std::size_t d = 0; d < 3; ++d)
                result.labels.push_back({idea.session_id, idea.index, d, triple[d]});
        } catch (const Error& e) {
            result.failures.push_back(idea.session_id + "#" + std::to_string(idea.index) + ": " +
                                      e.what());
        }
    }
    return result;
}

namespace {

AbstractionMap map_from_reply(const std::string& reply,
                              const std::array<std::vector<std::string>, 3>& raw_by_dimension,
                              const std::array<std::size_t, 3>& target_sizes) {
    const auto obj = extract_first_object(reply);
    if (!obj) throw DataError("no JSON object in consolidation reply");

    AbstractionMap map;
    map.scheme = CategoryScheme::from_json_text(obj->at("scheme").dump());
    for (std::size_t d = 0; d < 3; ++d) {
        if (map.scheme.category_count(d) != target_sizes[d])
            throw DataError("dimension " + std::to_string(d) + " has " +
                            std::to_string(map.scheme.category_count(d)) + " categories, target " +
                            std::to_string(target_sizes[d]));
    }

    const auto& mapping = obj->at("mapping");
    if (!mapping.is_array() || mapping.size() != 3)
        throw DataError("mapping must be an array of 3 objects");
    for (std::size_t d = 0; d < 3; ++d) {
        for (const auto& [raw, cat] : mapping.at(d).items()) {
            const auto resolved = map.scheme.resolve(d, cat.get<std::string>());
            if (!resolved)
                throw DataError("mapping target '" + cat.get<std::string>() +
                                "' is not a category of dimension " + std::to_string(d));
            map.entries[d][normalize_category(raw)] = *resolved;
        }
        // Totality over the observed raw labels.
        for (const auto& raw : raw_by_dimension[d])
            if (!map.entries[d].count(normalize_category(raw)))
                throw DataError("mapping is missing raw label '" + raw + "' in dimension " +
                                std::to_string(d));
    }
    return map;
}

}  // namespace

AbstractionMap abstract_hierarchy(const std::vector<RawLabel>& raw,
                                  const std::array<std::size_t, 3>& target_sizes, Gateway& gateway,
                                  const std::string& model_id) {
    std::array<std::vector<std::string>, 3> by_dim;
    std::array<std::set<std::string>, 3> seen;
    for (const auto& r : raw) {
        if (r.dimension > 2) throw DataError("raw label dimension out of range");
        if (seen[r.dimension].insert(normalize_category(r.free_text_label)).second)
            by_dim[r.dimension].push_back(r.free_text_label);
    }
    for (std::size_t d = 0; d < 3; ++d)
        if (by_dim[d].empty())
            throw DataError("abstract_hierarchy: no raw labels for dimension " + std::to_string(d));

    ChatRequest req = labeling_request(
        model_id, categorizer_prompts::consolidation_prompt(by_dim, target_sizes));
    std::string reply = gateway.complete_chat(req);
    for (int attempt = 0;; ++attempt) {
        try {
            return map_from_reply(reply, by_dim, target_sizes);
        } catch (const DataError& e) {
            if (attempt >= 1)
                throw DataError(std::string("consolidation failed after retry: ") + e.what());
            req.messages.push_back({ChatRole::assistant, reply});
            req.messages.push_back(
                {ChatRole::user, categorizer_prompts::fixed_label_corrective_prompt()});
            reply = gateway.complete_chat(req);
        }
    }
}

std::vector<Session> relabel_corpus(const std::vector<Session>& sessions,
                                    const std::vector<RawLabel>& raw, const AbstractionMap& map) {
    // (session, index, dimension) -> raw label
    std::map<std::pair<std::string, int>, std::array<const RawLabel*, 3>> by_idea;
    for (const auto& r : raw) by_idea[{r.session_id, r.idea_index}][r.dimension] = &r;

    std::vector<Session> out = sessions;
    for (auto& s : out) {
        for (auto& idea : s.ideas) {
            auto it = by_idea.find({s.id, idea.index});
            if (it == by_idea.end())
                throw DataError("no raw labels for idea " + s.id + "#" + std::to_string(idea.index));
            std::array<std::string, 3> cats;
            for (std::size_t d = 0; d < 3; ++d) {
                const RawLabel* r = it->second[d];
                if (!r)
                    throw DataError("missing raw label for dimension " + std::to_string(d) +
                                    " of idea " + s.id + "#" + std::to_string(idea.index));
                const auto mapped = map.lookup(d, r->free_text_label);
                if (!mapped)
                    throw DataError("raw label '" + r->free_text_label +
                                    "' is not covered by the abstraction map");
                cats[d] = *mapped;
            }
            idea.label = IdeaLabel::checked(map.scheme, cats[0], cats[1], cats[2]);
        }
    }
    return out;
}

LabelCorpusResult label_corpus_fixed(const std::vector<Session>& sessions,
                                     const CategoryScheme& scheme, Gateway& gateway,
                                     const std::string& model_id) {
    LabelCorpusResult result;
    result.sessions = sessions;
    for (auto& s : result.sessions) {
        for (auto& idea : s.ideas) {
            if (idea.label) continue;
            try {
                idea.label = label_idea_fixed(idea, scheme, gateway, model_id);
                ++result.labeled;
            } catch (const Error& e) {
                result.flagged.push_back(s.id + "#" + std::to_string(idea.index) + ": " + e.what());
            }
        }
    }
    return result;
}

}  // namespace ideabench
