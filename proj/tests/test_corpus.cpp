#include <doctest.h>

#include <set>

#include "ideabench/corpus.hpp"
#include "test_support.hpp"

using namespace ideabench;
using testsup::TempDir;

TEST_CASE("category name normalization folds case, whitespace, and &/and") {
    CHECK(normalize_category("Strength & Muscle") == "strength and muscle");
    CHECK(normalize_category("Strength and muscle") == "strength and muscle");
    CHECK(normalize_category("  strength   AND   Muscle ") == "strength and muscle");
    CHECK(normalize_category("App / Software") == "app software");
    CHECK(normalize_category("App/Software") == "app software");
    CHECK(normalize_category("None/Utility Only") == "none utility only");
    CHECK(normalize_category("Subscription / Coaching") == "subscription coaching");
}

TEST_CASE("builtin scheme has dimensions 9/9/10, 28 categories, 810 combinations") {
    const auto& scheme = CategoryScheme::builtin();
    REQUIRE(scheme.dimension_count() == 3);
    CHECK(scheme.category_count(0) == 9);
    CHECK(scheme.category_count(1) == 9);
    CHECK(scheme.category_count(2) == 10);
    CHECK(scheme.total_categories() == 28);
    CHECK(scheme.total_combinations() == 810);
    CHECK(scheme.version() == "fitness_v1");
}

TEST_CASE("shipped scheme file matches the builtin") {
    const auto loaded = CategoryScheme::load(std::string(IDEABENCH_DATA_DIR) +
                                             "/scheme_fitness_v1.json");
    const auto& builtin = CategoryScheme::builtin();
    CHECK(loaded.version() == builtin.version());
    REQUIRE(loaded.dimension_count() == 3);
    for (std::size_t d = 0; d < 3; ++d) {
        CHECK(loaded.dimensions()[d].name == builtin.dimensions()[d].name);
        CHECK(loaded.dimensions()[d].categories == builtin.dimensions()[d].categories);
    }
}

TEST_CASE("label resolution canonicalizes sloppy names and rejects unknown ones") {
    const auto& scheme = CategoryScheme::builtin();
    const auto label = IdeaLabel::checked(scheme, "strength and muscle", "Convenience & access",
                                          "traditional equipment");
    CHECK(label.industry_context == "Strength & Muscle");
    CHECK(label.psychological_need == "Convenience & Access");
    CHECK(label.product_form == "Traditional Equipment");
    CHECK(label.scheme_version == "fitness_v1");
    CHECK_THROWS_AS(IdeaLabel::checked(scheme, "Yoga", "Fun & Engagement", "Wearable"), DataError);
}

TEST_CASE("scheme rejects wrong dimension count and duplicate categories") {
    CHECK_THROWS_AS(CategoryScheme("v", {Dimension{"a", {"x"}}, Dimension{"b", {"y"}}}), DataError);
    CHECK_THROWS_AS(CategoryScheme("v", {Dimension{"a", {"x", "X "}}, Dimension{"b", {"y"}},
                                         Dimension{"c", {"z"}}}),
                    DataError);
}

namespace {

Session make_session(const std::string& id, int n, SessionSource source = SessionSource::llm) {
    Session s;
    s.id = id;
    s.source = source;
    s.condition.model_id = "m1";
    for (int i = 1; i <= n; ++i) {
        Idea idea;
        idea.session_id = id;
        idea.index = i;
        idea.text = "idea " + std::to_string(i) + " for " + id;
        s.ideas.push_back(idea);
    }
    return s;
}

}  // namespace

TEST_CASE("read_corpus groups rows by session and flags incomplete sessions") {
    TempDir dir("corpus");
    const std::string path = dir.file("c.jsonl");
    testsup::spit(path,
                  R"({"session_id":"s1","index":2,"text":"second","source":"llm","condition_kind":"default_sequential","temperature":1.0,"model_id":"m"})"
                  "\n"
                  R"({"session_id":"s1","index":1,"text":"first","source":"llm","condition_kind":"default_sequential","temperature":1.0,"model_id":"m"})"
                  "\n");
    ReadReport report;
    const auto sessions = read_corpus(path, CorpusFormat::jsonl, &report);
    REQUIRE(sessions.size() == 1);
    CHECK(sessions[0].ideas.size() == 2);
    CHECK(sessions[0].ideas[0].index == 1);
    CHECK(sessions[0].ideas[0].text == "first");
    CHECK_FALSE(sessions[0].complete());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("s1") != std::string::npos);
}

TEST_CASE("read_corpus on an empty file yields an empty list") {
    TempDir dir("corpus");
    const std::string path = dir.file("empty.jsonl");
    testsup::spit(path, "");
    CHECK(read_corpus(path, CorpusFormat::jsonl).empty());
}

TEST_CASE("read_corpus reports duplicates and gaps with line numbers") {
    TempDir dir("corpus");
    const std::string dup = dir.file("dup.jsonl");
    testsup::spit(dup,
                  R"({"session_id":"s1","index":1,"text":"a"})" "\n"
                  R"({"session_id":"s1","index":1,"text":"b"})" "\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(read_corpus(dup, CorpusFormat::jsonl)),
                         doctest::Contains("line 2"), DataError);

    const std::string gap = dir.file("gap.jsonl");
    testsup::spit(gap,
                  R"({"session_id":"s1","index":1,"text":"a"})" "\n"
                  R"({"session_id":"s1","index":3,"text":"b"})" "\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(read_corpus(gap, CorpusFormat::jsonl)),
                         doctest::Contains("gap"), DataError);

    const std::string bad = dir.file("bad.jsonl");
    testsup::spit(bad, "not json\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(read_corpus(bad, CorpusFormat::jsonl)),
                         doctest::Contains("line 1"), DataError);
}

TEST_CASE("write then read round-trips structurally, in both formats") {
    TempDir dir("corpus");
    std::vector<Session> sessions;
    auto s1 = make_session("s1", 10);
    s1.ideas[0].label = IdeaLabel::checked(CategoryScheme::builtin(), "Strength & Muscle",
                                           "Convenience & Access", "Traditional Equipment");
    s1.ideas[1].text = "tricky, \"quoted\" text with,commas";
    s1.ideas[2].text = "an idea split\nacross two lines";
    sessions.push_back(s1);
    auto s2 = make_session("s2", 3, SessionSource::human);
    s2.offtask_ratio = 0.05;
    sessions.push_back(s2);
    auto s3 = make_session("s3", 10);
    s3.condition.kind = ConditionKind::persona_sequential;
    s3.condition.persona = "A retired politician";
    s3.condition.persona_pool = PersonaPoolId::ordinary;
    sessions.push_back(s3);

    for (auto format : {CorpusFormat::jsonl, CorpusFormat::csv}) {
        const std::string path =
            dir.file(format == CorpusFormat::jsonl ? "rt.jsonl" : "rt.csv");
        write_corpus(sessions, path, format);
        const auto back = read_corpus(path, format);
        REQUIRE(back.size() == sessions.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].id == sessions[i].id);
            CHECK(back[i].source == sessions[i].source);
            CHECK(back[i].offtask_ratio == sessions[i].offtask_ratio);
            CHECK(back[i].condition.kind == sessions[i].condition.kind);
            CHECK(back[i].condition.persona == sessions[i].condition.persona);
            CHECK(back[i].condition.model_id == sessions[i].condition.model_id);
            REQUIRE(back[i].ideas.size() == sessions[i].ideas.size());
            for (std::size_t k = 0; k < back[i].ideas.size(); ++k) {
                CHECK(back[i].ideas[k].text == sessions[i].ideas[k].text);
                CHECK(back[i].ideas[k].label == sessions[i].ideas[k].label);
            }
        }
    }
}

TEST_CASE("write_corpus of an empty list produces a valid empty corpus") {
    TempDir dir("corpus");
    const std::string path = dir.file("e.jsonl");
    write_corpus({}, path, CorpusFormat::jsonl);
    CHECK(read_corpus(path, CorpusFormat::jsonl).empty());
}

TEST_CASE("write_corpus to an unwritable path raises an I/O error") {
    CHECK_THROWS_AS(write_corpus({}, "/nonexistent_dir_xyz/out.jsonl", CorpusFormat::jsonl),
                    DataError);
}

TEST_CASE("offtask filter drops only human sessions strictly above threshold") {
    auto h_over = make_session("h1", 10, SessionSource::human);
    h_over.offtask_ratio = 0.15;
    auto h_at = make_session("h2", 10, SessionSource::human);
    h_at.offtask_ratio = 0.10;
    auto h_missing = make_session("h3", 10, SessionSource::human);
    auto llm = make_session("l1", 10);

    const auto result = filter_offtask({h_over, h_at, h_missing, llm}, 0.1);
    CHECK(result.removed == 1);
    REQUIRE(result.kept.size() == 3);
    CHECK(result.kept[0].id == "h2");  // boundary value retained
    CHECK(result.kept[1].id == "h3");  // missing ratio passes with a warning
    CHECK(result.kept[2].id == "l1");
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("h3") != std::string::npos);

    CHECK_THROWS_AS(filter_offtask({}, 0.0), ConfigError);
}

TEST_CASE("offtask filter is idempotent and monotone in threshold") {
    Rng rng(7);
    std::vector<Session> sessions;
    for (int i = 0; i < 40; ++i) {
        auto s = make_session("h" + std::to_string(i), 10, SessionSource::human);
        s.offtask_ratio = rng.unit_real() * 0.4;
        sessions.push_back(s);
    }
    const auto once = filter_offtask(sessions, 0.1);
    const auto twice = filter_offtask(once.kept, 0.1);
    CHECK(twice.removed == 0);
    CHECK(twice.kept.size() == once.kept.size());

    const auto loose = filter_offtask(sessions, 0.3);
    // larger threshold retains a superset
    std::set<std::string> loose_ids, tight_ids;
    for (const auto& s : loose.kept) loose_ids.insert(s.id);
    for (const auto& s : once.kept) tight_ids.insert(s.id);
    for (const auto& id : tight_ids) CHECK(loose_ids.count(id) == 1);
}

TEST_CASE("llm rows carrying offtask_ratio are rejected") {
    TempDir dir("corpus");
    const std::string path = dir.file("bad.jsonl");
    testsup::spit(path,
                  R"({"session_id":"s1","index":1,"text":"a","source":"llm","offtask_ratio":0.2})"
                  "\n");
    CHECK_THROWS_AS(static_cast<void>(read_corpus(path, CorpusFormat::jsonl)), DataError);
}

TEST_CASE("analysis view excludes incomplete sessions unless overridden") {
    const std::vector<Session> sessions = {make_session("a", 10), make_session("b", 4)};
    CHECK(analysis_view(sessions).size() == 1);
    CHECK(analysis_view(sessions, true).size() == 2);
}

TEST_CASE("condition validation enforces kind-specific fields") {
    ConditionSpec persona_kind;
    persona_kind.kind = ConditionKind::persona_sequential;
    CHECK_THROWS_AS(persona_kind.validate(), ConfigError);
    persona_kind.persona = "Somebody";
    CHECK_NOTHROW(persona_kind.validate());

    ConditionSpec seeded;
    seeded.kind = ConditionKind::seeded;
    CHECK_THROWS_AS(seeded.validate(), ConfigError);
    seeded.seed_text = "resistance bands for travel workouts";
    CHECK_NOTHROW(seeded.validate());
}
