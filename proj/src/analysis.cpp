#include "ideabench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ideabench/rng.hpp"

namespace ideabench {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw DataError("mean of empty vector");
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double se_of_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return sample_stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DataError("least_squares: need >= 2 equal-length points");
    const double n = static_cast<double>(x.size());
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw DataError("least_squares: degenerate x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    (void)n;
    return fit;
}

namespace {

double group_metric(const std::vector<const Session*>& group, MetricId metric, bool first_only) {
    const auto labels = first_only ? pooled_first_idea_labels(group) : pooled_labels(group);
    return metric_value(diversity_scores(labels), metric);
}

BootstrapComparison bootstrap_impl(const std::map<std::string, std::vector<Session>>& groups,
                                   MetricId metric, const BootstrapConfig& cfg, bool first_only) {
    if (cfg.iterations < 1) throw ConfigError("bootstrap iterations must be >= 1");
    if (cfg.group_size < 1) throw ConfigError("bootstrap group_size must be >= 1");
    if (groups.empty()) throw DataError("bootstrap_compare: no groups");
    for (const auto& [name, sessions] : groups) {
        if (!cfg.replacement && static_cast<int>(sessions.size()) < cfg.group_size)
            throw DataError("condition '" + name + "' has " + std::to_string(sessions.size()) +
                            " sessions; group_size " + std::to_string(cfg.group_size) +
                            " needs at least that many without replacement");
        if (sessions.empty()) throw DataError("condition '" + name + "' is empty");
    }

    BootstrapComparison out;
    out.metric = metric;
    out.config = cfg;
    out.first_ideas_only = first_only;

    // Conditions iterate in map (name) order; each (iteration, condition)
    // pair draws from its own seed-split stream so the result is independent
    // of evaluation order and thread schedule.
    std::size_t cond_index = 0;
    for (const auto& [name, sessions] : groups) {
        ConditionStats stats;
        stats.iteration_values.reserve(static_cast<std::size_t>(cfg.iterations));
        for (int it = 0; it < cfg.iterations; ++it) {
            Rng rng(hash_key(cfg.rng_seed, {static_cast<std::uint64_t>(it), cond_index, 0x626f6f74ULL}));
            const auto idx =
                cfg.replacement
                    ? sample_with_replacement(rng, sessions.size(),
                                              static_cast<std::size_t>(cfg.group_size))
                    : sample_without_replacement(rng, sessions.size(),
                                                 static_cast<std::size_t>(cfg.group_size));
            std::vector<const Session*> group;
            group.reserve(idx.size());
            for (auto i : idx) group.push_back(&sessions[i]);
            stats.iteration_values.push_back(group_metric(group, metric, first_only));
        }
        stats.mean = mean_of(stats.iteration_values);
        stats.se = se_of_mean(stats.iteration_values);
        out.conditions.emplace(name, std::move(stats));
        ++cond_index;
    }

    for (auto a = out.conditions.begin(); a != out.conditions.end(); ++a) {
        for (auto b = std::next(a); b != out.conditions.end(); ++b) {
            PairComparison pc;
            pc.a = a->first;
            pc.b = b->first;
            pc.diff = a->second.mean - b->second.mean;
            const double denom = std::sqrt(a->second.se * a->second.se + b->second.se * b->second.se);
            pc.z = (pc.diff == 0.0) ? 0.0 : (denom == 0.0 ? std::numeric_limits<double>::infinity()
                                                          : pc.diff / denom);
            pc.p_z = pc.diff == 0.0 ? 1.0 : 2.0 * (1.0 - normal_cdf(std::abs(pc.z)));

            // Paired per-iteration differences; two-sided sign-flip fraction.
            std::size_t le = 0, ge = 0;
            const auto& va = a->second.iteration_values;
            const auto& vb = b->second.iteration_values;
            for (std::size_t i = 0; i < va.size(); ++i) {
                const double d = va[i] - vb[i];
                if (d <= 0) ++le;
                if (d >= 0) ++ge;
            }
            pc.p_percentile = std::min(
                1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(va.size()));
            out.pairs.push_back(std::move(pc));
        }
    }
    return out;
}

}  // namespace

BootstrapComparison bootstrap_compare(const std::map<std::string, std::vector<Session>>& groups,
                                      MetricId metric, const BootstrapConfig& cfg) {
    return bootstrap_impl(groups, metric, cfg, /*first_only=*/false);
}

BootstrapComparison first_idea_diversity(const std::map<std::string, std::vector<Session>>& groups,
                                         const BootstrapConfig& cfg, MetricId metric) {
    return bootstrap_impl(groups, metric, cfg, /*first_only=*/true);
}

FixationFit fit_fixation(const std::vector<Session>& sessions) {
    if (sessions.empty()) throw DataError("fit_fixation: no sessions");
    FixationFit fit;
    std::vector<double> slopes;
    for (const auto& s : sessions) {
        if (s.ideas.size() < 2)
            throw DataError("fit_fixation: session " + s.id + " has fewer than 2 ideas");
        const auto curve = accumulation_curve(s);
        std::vector<double> x, y;
        for (std::size_t k = 0; k < curve.cumulative_categories.size(); ++k) {
            x.push_back(static_cast<double>(k + 1));
            y.push_back(static_cast<double>(curve.cumulative_categories[k]));
        }
        const auto lf = least_squares(x, y);
        fit.sessions.push_back({s.id, lf.slope, lf.intercept});
        slopes.push_back(lf.slope);
    }
    fit.mean_slope = mean_of(slopes);
    fit.se_slope = se_of_mean(slopes);
    return fit;
}

std::vector<double> centroid(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw DataError("centroid: no vectors");
    const std::size_t dim = vectors.front().size();
    std::vector<double> c(dim, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw DataError("centroid: dimension mismatch");
        for (std::size_t i = 0; i < dim; ++i) c[i] += v[i];
    }
    for (double& x : c) x /= static_cast<double>(vectors.size());
    return c;
}

namespace {
double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double ss = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(ss);
}
}  // namespace

double between_participant_variation(const std::vector<std::vector<double>>& centroids) {
    const std::size_t m = centroids.size();
    if (m < 2) throw DataError("between_participant_variation: need >= 2 centroids");
    const std::size_t dim = centroids.front().size();
    for (const auto& c : centroids)
        if (c.size() != dim) throw DataError("between_participant_variation: dimension mismatch");
    double sum = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) sum += 2.0 * euclidean(centroids[i], centroids[j]);
    return sum / (static_cast<double>(m) * static_cast<double>(m - 1));
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("cosine_similarity: dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) throw DataError("cosine_similarity: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

PartitioningReport partitioning_report(
    const std::vector<Session>& sessions,
    const std::vector<std::vector<std::vector<double>>>& vectors) {
    if (sessions.size() != vectors.size())
        throw DataError("partitioning_report: sessions/vectors size mismatch");
    if (sessions.size() < 2) throw DataError("partitioning_report: need >= 2 participants");
    PartitioningReport report;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        report.participant_ids.push_back(sessions[i].id);
        report.centroids.push_back(centroid(vectors[i]));
        report.n += vectors[i].size();
    }
    report.m = sessions.size();
    report.s_between = between_participant_variation(report.centroids);
    return report;
}

ConditionStats s_between_bootstrap(const std::vector<std::vector<double>>& centroids,
                                   const BootstrapConfig& cfg) {
    if (static_cast<int>(centroids.size()) < cfg.group_size && !cfg.replacement)
        throw DataError("s_between_bootstrap: population smaller than group_size");
    ConditionStats stats;
    stats.iteration_values.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        Rng rng(hash_key(cfg.rng_seed, {static_cast<std::uint64_t>(it), 0x73626f6fULL}));
        const auto idx = cfg.replacement
                             ? sample_with_replacement(rng, centroids.size(),
                                                       static_cast<std::size_t>(cfg.group_size))
                             : sample_without_replacement(rng, centroids.size(),
                                                          static_cast<std::size_t>(cfg.group_size));
        std::vector<std::vector<double>> sub;
        sub.reserve(idx.size());
        for (auto i : idx) sub.push_back(centroids[i]);
        stats.iteration_values.push_back(between_participant_variation(sub));
    }
    stats.mean = mean_of(stats.iteration_values);
    stats.se = se_of_mean(stats.iteration_values);
    return stats;
}

}  // namespace ideabench
