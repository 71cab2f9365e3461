#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ideabench/corpus.hpp"
#include "ideabench/metrics.hpp"

namespace ideabench {

struct BootstrapConfig {
    int group_size = 10;
    int iterations = 100;
    std::uint64_t rng_seed = 0;
    bool replacement = false;
};

struct ConditionStats {
    double mean = 0;
    double se = 0;  // sample std-dev of iteration statistics / sqrt(iterations)
    std::vector<double> iteration_values;
};

struct PairComparison {
    std::string a;
    std::string b;
    double diff = 0;  // mean(a) - mean(b)
    double z = 0;
    double p_z = 1;           // two-sided z-test on the iteration means
    double p_percentile = 1;  // sign-flip fraction of paired iteration diffs
};

struct BootstrapComparison {
    MetricId metric = MetricId::t_cat;
    BootstrapConfig config;
    bool first_ideas_only = false;
    std::map<std::string, ConditionStats> conditions;
    std::vector<PairComparison> pairs;
};

struct FixationFit {
    struct PerSession {
        std::string session_id;
        double slope = 0;
        double intercept = 0;
    };
    std::vector<PerSession> sessions;
    double mean_slope = 0;
    double se_slope = 0;  // sample std-dev of per-session slopes / sqrt(n)
};

struct PartitioningReport {
    std::vector<std::string> participant_ids;
    std::vector<std::vector<double>> centroids;  // one per participant
    double s_between = 0;  // over all m centroids
    std::size_t m = 0;     // participants
    std::size_t n = 0;     // ideas embedded
};

// Basic sample statistics. se_of_mean = sample std-dev (ddof=1) / sqrt(n).
double mean_of(const std::vector<double>& v);
double sample_stddev(const std::vector<double>& v);
double se_of_mean(const std::vector<double>& v);
double normal_cdf(double z);

// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
    double slope = 0;
    double intercept = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Group comparison: per iteration, sample group_size sessions per condition
// with a shared seed-split RNG, pool the group's ideas, and record the
// metric. Means/SEs over iterations; two-sided z-test p-values per pair.
BootstrapComparison bootstrap_compare(const std::map<std::string, std::vector<Session>>& groups,
                                      MetricId metric, const BootstrapConfig& cfg);

// Same resampling, but each sampled session contributes only idea #1.
BootstrapComparison first_idea_diversity(const std::map<std::string, std::vector<Session>>& groups,
                                         const BootstrapConfig& cfg,
                                         MetricId metric = MetricId::t_comb);

// OLS slope per session over (k, cumulative unique categories at k).
FixationFit fit_fixation(const std::vector<Session>& sessions);

// Component-wise mean of equal-dimension vectors.
std::vector<double> centroid(const std::vector<std::vector<double>>& vectors);

// Average pairwise Euclidean distance over ordered centroid pairs:
// (1/(m(m-1))) * sum_i sum_{j != i} ||C_i - C_j||. Requires m >= 2.
double between_participant_variation(const std::vector<std::vector<double>>& centroids);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Per-participant centroids and the dispersion statistic for one group of
// sessions, given per-session idea embeddings (outer index parallels
// sessions, inner index parallels ideas).
PartitioningReport partitioning_report(const std::vector<Session>& sessions,
                                       const std::vector<std::vector<std::vector<double>>>& vectors);

// Bootstrap mean/SE of s_between over subsets of group_size centroids.
ConditionStats s_between_bootstrap(const std::vector<std::vector<double>>& centroids,
                                   const BootstrapConfig& cfg);

}  // namespace ideabench
