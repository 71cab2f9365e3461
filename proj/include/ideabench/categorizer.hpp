#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ideabench/corpus.hpp"
#include "ideabench/gateway.hpp"

namespace ideabench {

struct RawLabel {
    std::string session_id;
    int idea_index = 0;
    std::size_t dimension = 0;  // 0..2
    std::string free_text_label;
};

// free-text label -> canonical scheme category, per dimension. Built by the
// consolidation stage; total on all observed raw labels.
struct AbstractionMap {
    CategoryScheme scheme;
    std::array<std::map<std::string, std::string>, 3> entries;  // key: normalized raw label

    std::optional<std::string> lookup(std::size_t dim, const std::string& raw_label) const;
    std::string to_json_text() const;
    static AbstractionMap from_json_text(const std::string& text);
};

namespace categorizer_prompts {

// Version tag recorded with every labeling run; bump when wording changes.
extern const char* kTemplateVersion;

std::string fixed_label_prompt(const CategoryScheme& scheme, const std::string& idea_text);
std::string fixed_label_corrective_prompt();
std::string initial_label_prompt(const std::string& idea_text);
std::string consolidation_prompt(const std::array<std::vector<std::string>, 3>& raw_by_dimension,
                                 const std::array<std::size_t, 3>& target_sizes);

// The idea text is quoted between these fences inside labeling prompts; the
// simulator backend relies on them to recover the idea.
extern const char* kIdeaFenceOpen;
extern const char* kIdeaFenceClose;

}  // namespace categorizer_prompts

// The categorizer issues its calls at the most deterministic setting
// available (temperature 0).
constexpr double kCategorizerTemperature = 0.0;

// One valid category per dimension via a prompt that enumerates the scheme
// verbatim and demands a JSON object. Invalid replies get one corrective
// retry; a second failure throws DataError (caller flags the idea
// unlabeled).
IdeaLabel label_idea_fixed(const Idea& idea, const CategoryScheme& scheme, Gateway& gateway,
                           const std::string& model_id);

struct InitialLabelResult {
    std::vector<RawLabel> labels;  // 3 per successfully labeled idea
    std::vector<std::string> failures;
};

// Stage 1: free-text labels, one per dimension per idea. Per-idea failures
// are recorded and the batch continues.
InitialLabelResult initial_label(const std::vector<Idea>& ideas, Gateway& gateway,
                                 const std::string& model_id);

// Stage 2: consolidate raw labels into a scheme with the target dimension
// sizes plus a total mapping. The consolidation is one backend call; the
// totality/size checks are mechanical. One retry, then DataError.
AbstractionMap abstract_hierarchy(const std::vector<RawLabel>& raw,
                                  const std::array<std::size_t, 3>& target_sizes, Gateway& gateway,
                                  const std::string& model_id);

// Stage 3: pure map lookup, no backend calls. Throws DataError naming any
// unmapped raw label.
std::vector<Session> relabel_corpus(const std::vector<Session>& sessions,
                                    const std::vector<RawLabel>& raw, const AbstractionMap& map);

struct LabelCorpusResult {
    std::vector<Session> sessions;
    std::size_t labeled = 0;
    std::vector<std::string> flagged;  // "session#index: reason"
};

// Fixed-scheme labeling over a whole corpus; already-labeled ideas are left
// alone, failures are flagged rather than fatal.
LabelCorpusResult label_corpus_fixed(const std::vector<Session>& sessions,
                                     const CategoryScheme& scheme, Gateway& gateway,
                                     const std::string& model_id);

}  // namespace ideabench
