#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ideabench/corpus.hpp"

namespace ideabench {

// Label-space diversity for one idea set. t_cat counts dimension-qualified
// categories (ceiling 28 under the builtin scheme), t_comb counts distinct
// category triples (ceiling 810), d_mean averages pairwise categorical
// distance over unordered pairs and needs at least two ideas.
struct DiversityScores {
    int t_cat = 0;
    int t_comb = 0;
    std::optional<double> d_mean;
    int n_ideas = 0;
};

struct AccumulationCurve {
    std::vector<int> cumulative_categories;    // after idea 1..n
    std::vector<int> cumulative_combinations;  // after idea 1..n
};

enum class MetricId { t_cat, t_comb, d_mean };

std::string to_string(MetricId m);
MetricId metric_from_string(const std::string& s);

// Number of the three dimensions on which the two labels differ (0..3).
// Throws DataError on scheme version mismatch.
int pairwise_distance(const IdeaLabel& a, const IdeaLabel& b);

// Throws DataError on empty input.
DiversityScores diversity_scores(const std::vector<IdeaLabel>& labels);

// Cumulative unique counts after each idea, in session order. Throws
// DataError if any idea is unlabeled.
AccumulationCurve accumulation_curve(const Session& session);

// Labels of every idea in the group, pooled. Used for group-level bootstrap
// statistics (all ideas of all sampled sessions as one set).
std::vector<IdeaLabel> pooled_labels(const std::vector<const Session*>& sessions);
std::vector<IdeaLabel> pooled_first_idea_labels(const std::vector<const Session*>& sessions);

double metric_value(const DiversityScores& s, MetricId m);

// Mean of per-session metric values; the non-default aggregation. Group
// statistics default to pooled_labels + diversity_scores.
double per_session_mean(const std::vector<const Session*>& sessions, MetricId m);

}  // namespace ideabench
