#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ideabench/errors.hpp"

namespace ideabench {

// Canonicalization used everywhere category names are compared: case-fold,
// collapse whitespace and punctuation runs, and treat "&" and "and" as the
// same word. "Strength and muscle" and "Strength & Muscle" share a key.
std::string normalize_category(const std::string& name);

struct Dimension {
    std::string name;
    std::vector<std::string> categories;  // canonical display names
};

class CategoryScheme {
public:
    CategoryScheme() = default;
    CategoryScheme(std::string version, std::vector<Dimension> dimensions);

    const std::string& version() const { return version_; }
    const std::vector<Dimension>& dimensions() const { return dimensions_; }
    std::size_t dimension_count() const { return dimensions_.size(); }
    std::size_t category_count(std::size_t dim) const { return dimensions_.at(dim).categories.size(); }

    // Total categories across dimensions (28 for the builtin scheme) and
    // total triples (810 for the builtin scheme).
    std::size_t total_categories() const;
    std::size_t total_combinations() const;

    // Resolve a possibly sloppy name to the canonical display name for a
    // dimension. nullopt when nothing in the dimension matches.
    std::optional<std::string> resolve(std::size_t dim, const std::string& name) const;
    bool contains(std::size_t dim, const std::string& name) const;

    // Index of the canonical category name within its dimension.
    std::size_t category_index(std::size_t dim, const std::string& canonical_name) const;

    static CategoryScheme from_json_text(const std::string& text);
    static CategoryScheme load(const std::string& path);
    std::string to_json_text() const;

    // The fixed 9/9/10 fitness scheme, version "fitness_v1".
    static const CategoryScheme& builtin();

private:
    std::string version_;
    std::vector<Dimension> dimensions_;
};

struct IdeaLabel {
    std::string industry_context;
    std::string psychological_need;
    std::string product_form;
    std::string scheme_version;

    const std::string& dimension(std::size_t i) const;
    bool operator==(const IdeaLabel&) const = default;

    // Throws DataError unless every field resolves in the scheme. Values are
    // canonicalized in place.
    static IdeaLabel checked(const CategoryScheme& scheme, const std::string& industry,
                             const std::string& need, const std::string& form);
};

struct Idea {
    std::string session_id;
    int index = 0;  // 1-based position within the session
    std::string text;
    std::optional<IdeaLabel> label;
};

enum class SessionSource { human, llm };

enum class ConditionKind {
    default_sequential,
    seeded,
    persona_sequential,
    cot_batch,
    persona_cot_batch,
    cot_revision_sequential,
};

enum class PersonaPoolId { none, ordinary, entrepreneur };

std::string to_string(SessionSource s);
std::string to_string(ConditionKind k);
std::string to_string(PersonaPoolId p);
SessionSource session_source_from_string(const std::string& s);
ConditionKind condition_kind_from_string(const std::string& s);
PersonaPoolId persona_pool_from_string(const std::string& s);

struct ConditionSpec {
    ConditionKind kind = ConditionKind::default_sequential;
    std::optional<std::string> persona;
    PersonaPoolId persona_pool = PersonaPoolId::none;
    std::optional<std::string> seed_text;
    double temperature = 1.0;
    std::string model_id;

    // kind-specific requirements (persona present for persona kinds, seed
    // text for seeded). Throws ConfigError.
    void validate() const;

    // Group key used by the analysis tables, e.g. "persona_ordinary".
    std::string group_label() const;
};

struct Session {
    std::string id;
    SessionSource source = SessionSource::llm;
    ConditionSpec condition;
    std::vector<Idea> ideas;  // sorted by index
    std::optional<double> offtask_ratio;  // humans only

    static constexpr int kFullLength = 10;

    bool complete() const;
    bool fully_labeled() const;

    // Group key: "human" for human sessions, condition label otherwise.
    std::string group_label() const;
};

enum class CorpusFormat { jsonl, csv };

struct ReadReport {
    std::vector<std::string> warnings;
};

// One idea per record; sessions are grouped by id and sorted by index.
// Throws DataError naming the offending line on parse failures, duplicate
// (session_id, index) pairs, or index gaps.
std::vector<Session> read_corpus(const std::string& path, CorpusFormat format,
                                 ReadReport* report = nullptr);
void write_corpus(const std::vector<Session>& sessions, const std::string& path,
                  CorpusFormat format);

struct OfftaskFilterResult {
    std::vector<Session> kept;
    std::size_t removed = 0;
    std::vector<std::string> warnings;
};

// Drops human sessions whose off-task ratio strictly exceeds the threshold.
// LLM sessions always pass. A missing ratio on a human session passes with a
// warning.
OfftaskFilterResult filter_offtask(const std::vector<Session>& sessions, double threshold);

// Complete sessions only, unless include_incomplete. Analysis entry points
// run on the result of this.
std::vector<Session> analysis_view(const std::vector<Session>& sessions,
                                   bool include_incomplete = false);

}  // namespace ideabench
