#include "ideabench/metrics.hpp"

#include <set>
#include <tuple>

namespace ideabench {

std::string to_string(MetricId m) {
    switch (m) {
        case MetricId::t_cat: return "t_cat";
        case MetricId::t_comb: return "t_comb";
        case MetricId::d_mean: return "d_mean";
    }
    throw DataError("unknown metric");
}

MetricId metric_from_string(const std::string& s) {
    if (s == "t_cat") return MetricId::t_cat;
    if (s == "t_comb") return MetricId::t_comb;
    if (s == "d_mean") return MetricId::d_mean;
    throw DataError("unknown metric: " + s);
}

int pairwise_distance(const IdeaLabel& a, const IdeaLabel& b) {
    if (a.scheme_version != b.scheme_version)
        throw DataError("pairwise_distance: scheme mismatch (" + a.scheme_version + " vs " +
                        b.scheme_version + ")");
    int d = 0;
    for (std::size_t i = 0; i < 3; ++i)
        if (a.dimension(i) != b.dimension(i)) ++d;
    return d;
}

DiversityScores diversity_scores(const std::vector<IdeaLabel>& labels) {
    if (labels.empty()) throw DataError("diversity_scores: empty label set");

    std::set<std::pair<std::size_t, std::string>> categories;
    std::set<std::tuple<std::string, std::string, std::string>> combos;
    for (const auto& l : labels) {
        for (std::size_t d = 0; d < 3; ++d) categories.emplace(d, l.dimension(d));
        combos.emplace(l.industry_context, l.psychological_need, l.product_form);
    }

    DiversityScores out;
    out.n_ideas = static_cast<int>(labels.size());
    out.t_cat = static_cast<int>(categories.size());
    out.t_comb = static_cast<int>(combos.size());
    if (labels.size() >= 2) {
        long long sum = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                sum += pairwise_distance(labels[i], labels[j]);
        const double pairs = 0.5 * static_cast<double>(labels.size()) *
                             static_cast<double>(labels.size() - 1);
        out.d_mean = static_cast<double>(sum) / pairs;
    }
    return out;
}

AccumulationCurve accumulation_curve(const Session& session) {
    AccumulationCurve curve;
    std::set<std::pair<std::size_t, std::string>> categories;
    std::set<std::tuple<std::string, std::string, std::string>> combos;
    for (const auto& idea : session.ideas) {
        if (!idea.label)
            throw DataError("accumulation_curve: unlabeled idea " + session.id + "#" +
                            std::to_string(idea.index));
        const auto& l = *idea.label;
        for (std::size_t d = 0; d < 3; ++d) categories.emplace(d, l.dimension(d));
        combos.emplace(l.industry_context, l.psychological_need, l.product_form);
        curve.cumulative_categories.push_back(static_cast<int>(categories.size()));
        curve.cumulative_combinations.push_back(static_cast<int>(combos.size()));
    }
    return curve;
}

std::vector<IdeaLabel> pooled_labels(const std::vector<const Session*>& sessions) {
    std::vector<IdeaLabel> labels;
    for (const Session* s : sessions)
        for (const auto& idea : s->ideas) {
            if (!idea.label)
                throw DataError("pooled_labels: unlabeled idea " + s->id + "#" +
                                std::to_string(idea.index));
            labels.push_back(*idea.label);
        }
    return labels;
}

std::vector<IdeaLabel> pooled_first_idea_labels(const std::vector<const Session*>& sessions) {
    std::vector<IdeaLabel> labels;
    for (const Session* s : sessions) {
        if (s->ideas.empty()) throw DataError("pooled_first_idea_labels: empty session " + s->id);
        const auto& idea = s->ideas.front();
        if (!idea.label) throw DataError("pooled_first_idea_labels: unlabeled first idea " + s->id);
        labels.push_back(*idea.label);
    }
    return labels;
}

double metric_value(const DiversityScores& s, MetricId m) {
    switch (m) {
        case MetricId::t_cat: return s.t_cat;
        case MetricId::t_comb: return s.t_comb;
        case MetricId::d_mean:
            if (!s.d_mean) throw DataError("d_mean undefined for n < 2");
            return *s.d_mean;
    }
    throw DataError("unknown metric");
}

double per_session_mean(const std::vector<const Session*>& sessions, MetricId m) {
    if (sessions.empty()) throw DataError("per_session_mean: empty group");
    double sum = 0;
    for (const Session* s : sessions) {
        std::vector<IdeaLabel> labels = pooled_labels({s});
        sum += metric_value(diversity_scores(labels), m);
    }
    return sum / static_cast<double>(sessions.size());
}

}  // namespace ideabench
