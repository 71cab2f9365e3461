#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "ideabench/analysis.hpp"
#include "ideabench/rng.hpp"
#include "test_support.hpp"

using namespace ideabench;

namespace {

// Independent closed-form OLS slope for y over x = 1..n.
double closed_form_slope(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = static_cast<double>(i + 1);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

IdeaLabel label_of(const std::string& a, const std::string& b, const std::string& c) {
    return IdeaLabel::checked(CategoryScheme::builtin(), a, b, c);
}

// Session whose category accumulation curve is exactly `curve` (must start
// at 3 with steps 0..3).
Session session_for_curve(const std::string& id, const std::vector<int>& curve) {
    const auto& dims = CategoryScheme::builtin().dimensions();
    std::vector<IdeaLabel> labels;
    // Pools of unused category indexes per dimension.
    std::array<std::size_t, 3> next = {1, 1, 1};
    std::array<std::size_t, 3> cur = {0, 0, 0};
    labels.push_back(IdeaLabel{dims[0].categories[0], dims[1].categories[0], dims[2].categories[0],
                               "fitness_v1"});
    for (std::size_t k = 1; k < curve.size(); ++k) {
        int add = curve[k] - curve[k - 1];
        REQUIRE(add >= 0);
        REQUIRE(add <= 3);
        for (int d = 0; d < 3 && add > 0; ++d) {
            if (next[static_cast<std::size_t>(d)] < dims[static_cast<std::size_t>(d)].categories.size()) {
                cur[static_cast<std::size_t>(d)] = next[static_cast<std::size_t>(d)]++;
                --add;
            }
        }
        REQUIRE(add == 0);  // curve must be realizable under 9/9/10
        labels.push_back(IdeaLabel{dims[0].categories[cur[0]], dims[1].categories[cur[1]],
                                   dims[2].categories[cur[2]], "fitness_v1"});
    }
    auto s = testsup::session_with_labels(id, labels);
    // sanity: the constructed session really has the requested curve
    REQUIRE(accumulation_curve(s).cumulative_categories == curve);
    return s;
}

}  // namespace

TEST_CASE("least squares recovers exact lines") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    SUBCASE("flat") {
        const std::vector<double> y(10, 3.0);
        CHECK(least_squares(x, y).slope == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("unit slope") {
        std::vector<double> y;
        for (double v = 1; v <= 10; ++v) y.push_back(v);
        const auto fit = least_squares(x, y);
        CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("near-ceiling accumulation curve") {
        const std::vector<double> y{3, 6, 9, 12, 15, 18, 21, 24, 27, 28};
        const auto fit = least_squares(x, y);
        CHECK(fit.slope == doctest::Approx(closed_form_slope(y)).epsilon(1e-12));
        // Sxy=238.5, Sxx=82.5 for these ten points.
        CHECK(fit.slope == doctest::Approx(238.5 / 82.5).epsilon(1e-12));
    }
}

TEST_CASE("fixation fit on constructed sessions") {
    SUBCASE("flat curve has slope zero") {
        const auto l = label_of("Mental Wellbeing", "Personalization", "Consumables");
        const auto fit = fit_fixation({testsup::session_with_labels("flat", std::vector<IdeaLabel>(10, l))});
        CHECK(fit.mean_slope == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("near-ceiling curve matches the closed form to 1e-9") {
        const auto s = session_for_curve("steep", {3, 6, 9, 12, 15, 18, 21, 24, 27, 28});
        const auto fit = fit_fixation({s});
        CHECK(std::abs(fit.mean_slope - 238.5 / 82.5) < 1e-9);
    }
    SUBCASE("one-new-category-per-idea curve has slope one") {
        const auto s = session_for_curve("linear", {3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
        const auto fit = fit_fixation({s});
        CHECK(fit.mean_slope == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("group mean and SE over multiple sessions") {
        const auto s1 = session_for_curve("a", {3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
        const auto s2 = session_for_curve("b", {3, 6, 9, 12, 15, 18, 21, 24, 27, 28});
        const auto fit = fit_fixation({s1, s2});
        const double b1 = 1.0, b2 = 238.5 / 82.5;
        CHECK(fit.mean_slope == doctest::Approx((b1 + b2) / 2).epsilon(1e-12));
        const double sd = std::sqrt((std::pow(b1 - fit.mean_slope, 2) +
                                     std::pow(b2 - fit.mean_slope, 2)) / 1.0);
        CHECK(fit.se_slope == doctest::Approx(sd / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("too-short or unlabeled sessions are errors") {
        const auto l = label_of("Body Composition", "Fun & Engagement", "Wearable");
        CHECK_THROWS_AS(fit_fixation({testsup::session_with_labels("short", {l})}), DataError);
        auto s = testsup::session_with_labels("nolab", std::vector<IdeaLabel>(10, l));
        s.ideas[3].label.reset();
        CHECK_THROWS_AS(fit_fixation({s}), DataError);
    }
}

TEST_CASE("category-curve slopes stay in [0,3] and vanish only for flat curves") {
    Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> y{3};
        bool flat = true;
        for (int k = 1; k < 10; ++k) {
            int step = static_cast<int>(rng.below(4));
            if (y.back() + step > 28) step = 0;
            if (step != 0) flat = false;
            y.push_back(y.back() + step);
        }
        std::vector<double> x;
        for (int k = 1; k <= 10; ++k) x.push_back(k);
        const double slope = least_squares(x, y).slope;
        CHECK(slope >= 0.0);
        CHECK(slope <= 3.0);
        if (flat) CHECK(slope == doctest::Approx(0.0).epsilon(1e-15));
        else CHECK(slope > 0.0);
    }
}

TEST_CASE("bootstrap on identical singleton populations gives zero difference, p = 1") {
    const auto l = label_of("Strength & Muscle", "Progress & Mastery", "Wearable");
    const auto s = testsup::session_with_labels("only", std::vector<IdeaLabel>(10, l));
    std::map<std::string, std::vector<Session>> groups{{"a", {s}}, {"b", {s}}};
    BootstrapConfig cfg;
    cfg.group_size = 1;
    cfg.iterations = 50;
    cfg.rng_seed = 3;
    const auto cmp = bootstrap_compare(groups, MetricId::t_comb, cfg);
    REQUIRE(cmp.pairs.size() == 1);
    CHECK(cmp.pairs[0].diff == 0.0);
    CHECK(cmp.pairs[0].p_z == 1.0);
}

TEST_CASE("bootstrap is bit-identical under the same seed") {
    Rng rng(8);
    std::map<std::string, std::vector<Session>> groups;
    for (int g = 0; g < 2; ++g) {
        std::vector<Session> sessions;
        for (int i = 0; i < 12; ++i) {
            std::vector<IdeaLabel> labels;
            for (int k = 0; k < 10; ++k) labels.push_back(testsup::random_label(rng));
            sessions.push_back(testsup::session_with_labels(
                "g" + std::to_string(g) + "s" + std::to_string(i), labels));
        }
        groups[g == 0 ? "alpha" : "beta"] = std::move(sessions);
    }
    BootstrapConfig cfg;
    cfg.group_size = 5;
    cfg.iterations = 40;
    cfg.rng_seed = 777;
    const auto a = bootstrap_compare(groups, MetricId::d_mean, cfg);
    const auto b = bootstrap_compare(groups, MetricId::d_mean, cfg);
    CHECK(a.conditions.at("alpha").iteration_values == b.conditions.at("alpha").iteration_values);
    CHECK(a.conditions.at("beta").iteration_values == b.conditions.at("beta").iteration_values);
    CHECK(a.pairs[0].p_z == b.pairs[0].p_z);
}

TEST_CASE("bootstrap means converge to the exhaustive enumeration mean at small N") {
    // Three sessions with known label sets; group_size 2 without replacement
    // has exactly 3 possible groups.
    Rng rng(42);
    std::vector<Session> sessions;
    for (int i = 0; i < 3; ++i) {
        std::vector<IdeaLabel> labels;
        for (int k = 0; k < 10; ++k) labels.push_back(testsup::random_label(rng));
        sessions.push_back(testsup::session_with_labels("s" + std::to_string(i), labels));
    }

    for (MetricId metric : {MetricId::t_cat, MetricId::t_comb, MetricId::d_mean}) {
        double enum_sum = 0;
        int enum_count = 0;
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                const auto labels = pooled_labels({&sessions[i], &sessions[j]});
                enum_sum += metric_value(diversity_scores(labels), metric);
                ++enum_count;
            }
        }
        const double enum_mean = enum_sum / enum_count;

        std::map<std::string, std::vector<Session>> groups{{"only", sessions}};
        BootstrapConfig cfg;
        cfg.group_size = 2;
        cfg.iterations = 1000;
        cfg.rng_seed = 99;
        const auto cmp = bootstrap_compare(groups, metric, cfg);
        const auto& stats = cmp.conditions.at("only");
        CHECK(std::abs(stats.mean - enum_mean) <= 2.0 * std::max(stats.se, 1e-12));
    }
}

TEST_CASE("insufficient population without replacement is an error") {
    const auto l = label_of("General Wellness", "Personalization", "Consumables");
    std::map<std::string, std::vector<Session>> groups{
        {"tiny", {testsup::session_with_labels("s", std::vector<IdeaLabel>(10, l))}}};
    BootstrapConfig cfg;
    cfg.group_size = 2;
    CHECK_THROWS_AS(static_cast<void>(bootstrap_compare(groups, MetricId::t_cat, cfg)), DataError);
    cfg.replacement = true;
    CHECK_NOTHROW(static_cast<void>(bootstrap_compare(groups, MetricId::t_cat, cfg)));
}

TEST_CASE("first-idea analysis uses only idea #1 of each sampled session") {
    const auto& dims = CategoryScheme::builtin().dimensions();

    SUBCASE("shared first triple pins t_comb at 1") {
        const auto first = label_of("Cardio & Endurance", "Motivation & Discipline", "App / Software");
        std::vector<Session> sessions;
        Rng rng(5);
        for (int i = 0; i < 10; ++i) {
            std::vector<IdeaLabel> labels{first};
            for (int k = 1; k < 10; ++k) labels.push_back(testsup::random_label(rng));
            sessions.push_back(testsup::session_with_labels("s" + std::to_string(i), labels));
        }
        BootstrapConfig cfg;
        cfg.group_size = 10;
        cfg.iterations = 20;
        const auto cmp = first_idea_diversity({{"g", sessions}}, cfg);
        for (double v : cmp.conditions.at("g").iteration_values) CHECK(v == 1.0);
    }

    SUBCASE("pairwise-disjoint first triples give t_comb = 10") {
        std::vector<Session> sessions;
        for (int i = 0; i < 10; ++i) {
            std::vector<IdeaLabel> labels;
            labels.push_back(IdeaLabel{dims[0].categories[static_cast<std::size_t>(i) % 9],
                                       dims[1].categories[static_cast<std::size_t>(i) % 9],
                                       dims[2].categories[static_cast<std::size_t>(i)],
                                       "fitness_v1"});
            for (int k = 1; k < 10; ++k) labels.push_back(labels.front());
            sessions.push_back(testsup::session_with_labels("s" + std::to_string(i), labels));
        }
        BootstrapConfig cfg;
        cfg.group_size = 10;
        cfg.iterations = 5;
        const auto cmp = first_idea_diversity({{"g", sessions}}, cfg);
        for (double v : cmp.conditions.at("g").iteration_values) CHECK(v == 10.0);
    }
}

TEST_CASE("first-idea bootstrap means match exhaustive enumeration at small N") {
    Rng rng(61);
    std::vector<Session> sessions;
    for (int i = 0; i < 3; ++i) {
        std::vector<IdeaLabel> labels;
        for (int k = 0; k < 10; ++k) labels.push_back(testsup::random_label(rng));
        sessions.push_back(testsup::session_with_labels("s" + std::to_string(i), labels));
    }
    for (MetricId metric : {MetricId::t_cat, MetricId::t_comb, MetricId::d_mean}) {
        double enum_sum = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const auto firsts = pooled_first_idea_labels({&sessions[i], &sessions[j]});
                enum_sum += metric_value(diversity_scores(firsts), metric);
            }
        const double enum_mean = enum_sum / 3.0;

        BootstrapConfig cfg;
        cfg.group_size = 2;
        cfg.iterations = 1000;
        cfg.rng_seed = 4242;
        const auto cmp = first_idea_diversity({{"pop", sessions}}, cfg, metric);
        const auto& stats = cmp.conditions.at("pop");
        CHECK(std::abs(stats.mean - enum_mean) <= 2.0 * std::max(stats.se, 1e-12));
    }
}

TEST_CASE("centroid is the component-wise mean") {
    SUBCASE("single vector is its own centroid") {
        const std::vector<std::vector<double>> vs{{1.5, -2.0, 0.25}};
        CHECK(centroid(vs) == vs[0]);
    }
    SUBCASE("antipodal pair averages to zero") {
        const std::vector<double> v{0.3, -1.2, 4.0, 2.5};
        std::vector<double> neg;
        for (double x : v) neg.push_back(-x);
        for (double x : centroid({v, neg})) CHECK(x == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("matches a naive summation within 1e-12") {
        Rng rng(17);
        std::vector<std::vector<double>> vs;
        for (int i = 0; i < 3; ++i) {
            std::vector<double> v;
            for (int k = 0; k < 24; ++k) v.push_back(2.0 * rng.unit_real() - 1.0);
            vs.push_back(std::move(v));
        }
        const auto c = centroid(vs);
        for (std::size_t k = 0; k < c.size(); ++k) {
            double s = 0;
            for (const auto& v : vs) s += v[k];
            CHECK(c[k] == doctest::Approx(s / 3.0).epsilon(1e-12));
        }
    }
    SUBCASE("dimension mismatch is an error") {
        CHECK_THROWS_AS(centroid({{1.0, 2.0}, {1.0}}), DataError);
        CHECK_THROWS_AS(centroid({}), DataError);
    }
}

TEST_CASE("between-participant variation matches its definition") {
    SUBCASE("two centroids at distance D give exactly D") {
        const std::vector<std::vector<double>> cs{{0, 0, 0}, {3, 4, 0}};  // distance 5
        CHECK(between_participant_variation(cs) == doctest::Approx(5.0).epsilon(1e-15));
    }
    SUBCASE("unit equilateral triangle gives 1") {
        const std::vector<std::vector<double>> cs{
            {0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
        CHECK(between_participant_variation(cs) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("identical centroids give 0") {
        const std::vector<std::vector<double>> cs(4, std::vector<double>{1.0, 2.0, 3.0});
        CHECK(between_participant_variation(cs) == 0.0);
    }
    SUBCASE("translation invariant, scales linearly") {
        Rng rng(23);
        std::vector<std::vector<double>> cs;
        for (int i = 0; i < 5; ++i) {
            std::vector<double> v;
            for (int k = 0; k < 16; ++k) v.push_back(2.0 * rng.unit_real() - 1.0);
            cs.push_back(std::move(v));
        }
        const double base = between_participant_variation(cs);
        auto shifted = cs;
        for (auto& v : shifted)
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += 17.25;
        CHECK(between_participant_variation(shifted) == doctest::Approx(base).epsilon(1e-9));
        auto scaled = cs;
        for (auto& v : scaled)
            for (auto& x : v) x *= 2.5;
        CHECK(between_participant_variation(scaled) == doctest::Approx(2.5 * base).epsilon(1e-9));
    }
    SUBCASE("fewer than two centroids is an error") {
        CHECK_THROWS_AS(between_participant_variation({{1.0}}), DataError);
    }
}

TEST_CASE("cosine similarity basics and naive oracle") {
    const std::vector<double> a{1, 0, 0};
    const std::vector<double> b{0, 1, 0};
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine_similarity(a, b) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(cosine_similarity({0, 0}, {1, 1}), DataError);
    CHECK_THROWS_AS(cosine_similarity({1}, {1, 2}), DataError);

    Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u, v;
        for (int k = 0; k < 32; ++k) {
            u.push_back(2.0 * rng.unit_real() - 1.0);
            v.push_back(2.0 * rng.unit_real() - 1.0);
        }
        double dot = 0, nu = 0, nv = 0;
        for (int k = 0; k < 32; ++k) {
            dot += u[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
            nu += u[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
            nv += v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
        }
        const double want = dot / (std::sqrt(nu) * std::sqrt(nv));
        const double got = cosine_similarity(u, v);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got >= -1.0 - 1e-12);
        CHECK(got <= 1.0 + 1e-12);
    }
}

TEST_CASE("s_between bootstrap is deterministic and centered") {
    Rng rng(72);
    std::vector<std::vector<double>> centroids;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> v;
        for (int k = 0; k < 8; ++k) v.push_back(2.0 * rng.unit_real() - 1.0);
        centroids.push_back(std::move(v));
    }
    BootstrapConfig cfg;
    cfg.group_size = 10;
    cfg.iterations = 200;
    cfg.rng_seed = 4;
    const auto a = s_between_bootstrap(centroids, cfg);
    const auto b = s_between_bootstrap(centroids, cfg);
    CHECK(a.iteration_values == b.iteration_values);
    const double full = between_participant_variation(centroids);
    CHECK(std::abs(a.mean - full) < 10 * std::max(a.se, 1e-9));
}
