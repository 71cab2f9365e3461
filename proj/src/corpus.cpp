#include "ideabench/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace ideabench {

std::string normalize_category(const std::string& name) {
    // Lowercase, then split into word tokens treating any punctuation or
    // whitespace run as one separator. "&" becomes the word "and".
    std::string out;
    bool pending_sep = false;
    auto push_word_sep = [&] {
        if (!out.empty()) pending_sep = true;
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(name[i]);
        if (std::isalnum(c)) {
            if (pending_sep) {
                out.push_back(' ');
                pending_sep = false;
            }
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == '&') {
            if (!out.empty()) push_word_sep();
            if (pending_sep) {
                out.push_back(' ');
                pending_sep = false;
            }
            out += "and";
            push_word_sep();
        } else {
            push_word_sep();
        }
    }
    return out;
}

CategoryScheme::CategoryScheme(std::string version, std::vector<Dimension> dimensions)
    : version_(std::move(version)), dimensions_(std::move(dimensions)) {
    if (dimensions_.size() != 3)
        throw DataError("scheme must have exactly 3 dimensions, got " +
                        std::to_string(dimensions_.size()));
    for (const auto& dim : dimensions_) {
        if (dim.categories.empty()) throw DataError("scheme dimension '" + dim.name + "' is empty");
        std::unordered_set<std::string> keys;
        for (const auto& cat : dim.categories) {
            if (!keys.insert(normalize_category(cat)).second)
                throw DataError("duplicate category '" + cat + "' in dimension '" + dim.name +
                                "' after normalization");
        }
    }
}

std::size_t CategoryScheme::total_categories() const {
    std::size_t n = 0;
    for (const auto& d : dimensions_) n += d.categories.size();
    return n;
}

std::size_t CategoryScheme::total_combinations() const {
    std::size_t n = 1;
    for (const auto& d : dimensions_) n *= d.categories.size();
    return n;
}

std::optional<std::string> CategoryScheme::resolve(std::size_t dim, const std::string& name) const {
    const auto key = normalize_category(name);
    for (const auto& cat : dimensions_.at(dim).categories)
        if (normalize_category(cat) == key) return cat;
    return std::nullopt;
}

bool CategoryScheme::contains(std::size_t dim, const std::string& name) const {
    return resolve(dim, name).has_value();
}

std::size_t CategoryScheme::category_index(std::size_t dim, const std::string& canonical_name) const {
    const auto& cats = dimensions_.at(dim).categories;
    auto it = std::find(cats.begin(), cats.end(), canonical_name);
    if (it == cats.end())
        throw DataError("category '" + canonical_name + "' not in dimension '" +
                        dimensions_.at(dim).name + "'");
    return static_cast<std::size_t>(it - cats.begin());
}

CategoryScheme CategoryScheme::from_json_text(const std::string& text) {
    json j = json::parse(text);
    std::vector<Dimension> dims;
    for (const auto& dj : j.at("dimensions")) {
        Dimension d;
        d.name = dj.at("name").get<std::string>();
        for (const auto& c : dj.at("categories")) d.categories.push_back(c.get<std::string>());
        dims.push_back(std::move(d));
    }
    return CategoryScheme(j.at("version").get<std::string>(), std::move(dims));
}

CategoryScheme CategoryScheme::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scheme file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return from_json_text(ss.str());
    } catch (const json::exception& e) {
        throw DataError("scheme file " + path + ": " + e.what());
    }
}

std::string CategoryScheme::to_json_text() const {
    json j;
    j["version"] = version_;
    j["dimensions"] = json::array();
    for (const auto& d : dimensions_) {
        json dj;
        dj["name"] = d.name;
        dj["categories"] = d.categories;
        j["dimensions"].push_back(std::move(dj));
    }
    return j.dump(2);
}

const CategoryScheme& CategoryScheme::builtin() {
    static const CategoryScheme scheme(
        "fitness_v1",
        {Dimension{"industry_context",
                   {"Strength & Muscle", "Cardio & Endurance", "Mobility & Flexibility",
                    "Body Composition", "Recovery & Injury", "Balance & Coordination",
                    "Mental Wellbeing", "General Wellness", "None/Utility Only"}},
         Dimension{"psychological_need",
                   {"Progress & Mastery", "Personalization", "Motivation & Discipline",
                    "Fun & Engagement", "Social & Belonging", "Convenience & Access",
                    "Self-Expression & Identity", "Novelty & Curiosity", "None/Functional Only"}},
         Dimension{"product_form",
                   {"Wearable", "App / Software", "Smart Equipment", "Immersive Tech",
                    "Traditional Equipment", "Apparel & Accessories", "Consumables",
                    "Integrated Furniture", "Subscription / Coaching", "Outdoor / Environmental"}}});
    return scheme;
}

const std::string& IdeaLabel::dimension(std::size_t i) const {
    switch (i) {
        case 0: return industry_context;
        case 1: return psychological_need;
        case 2: return product_form;
        default: throw DataError("label dimension index out of range");
    }
}

IdeaLabel IdeaLabel::checked(const CategoryScheme& scheme, const std::string& industry,
                             const std::string& need, const std::string& form) {
    const std::string* raw[3] = {&industry, &need, &form};
    std::string canon[3];
    for (std::size_t d = 0; d < 3; ++d) {
        auto r = scheme.resolve(d, *raw[d]);
        if (!r)
            throw DataError("'" + *raw[d] + "' is not a category of dimension '" +
                            scheme.dimensions()[d].name + "' (scheme " + scheme.version() + ")");
        canon[d] = *r;
    }
    return IdeaLabel{canon[0], canon[1], canon[2], scheme.version()};
}

std::string to_string(SessionSource s) {
    return s == SessionSource::human ? "human" : "llm";
}

std::string to_string(ConditionKind k) {
    switch (k) {
        case ConditionKind::default_sequential: return "default_sequential";
        case ConditionKind::seeded: return "seeded";
        case ConditionKind::persona_sequential: return "persona_sequential";
        case ConditionKind::cot_batch: return "cot_batch";
        case ConditionKind::persona_cot_batch: return "persona_cot_batch";
        case ConditionKind::cot_revision_sequential: return "cot_revision_sequential";
    }
    throw DataError("unknown condition kind");
}

std::string to_string(PersonaPoolId p) {
    switch (p) {
        case PersonaPoolId::none: return "none";
        case PersonaPoolId::ordinary: return "ordinary";
        case PersonaPoolId::entrepreneur: return "entrepreneur";
    }
    throw DataError("unknown persona pool");
}

SessionSource session_source_from_string(const std::string& s) {
    if (s == "human") return SessionSource::human;
    if (s == "llm") return SessionSource::llm;
    throw DataError("unknown session source: " + s);
}

ConditionKind condition_kind_from_string(const std::string& s) {
    if (s == "default_sequential") return ConditionKind::default_sequential;
    if (s == "seeded") return ConditionKind::seeded;
    if (s == "persona_sequential") return ConditionKind::persona_sequential;
    if (s == "cot_batch") return ConditionKind::cot_batch;
    if (s == "persona_cot_batch") return ConditionKind::persona_cot_batch;
    if (s == "cot_revision_sequential") return ConditionKind::cot_revision_sequential;
    throw DataError("unknown condition kind: " + s);
}

PersonaPoolId persona_pool_from_string(const std::string& s) {
    if (s.empty() || s == "none") return PersonaPoolId::none;
    if (s == "ordinary") return PersonaPoolId::ordinary;
    if (s == "entrepreneur") return PersonaPoolId::entrepreneur;
    throw DataError("unknown persona pool: " + s);
}

void ConditionSpec::validate() const {
    const bool needs_persona = kind == ConditionKind::persona_sequential ||
                               kind == ConditionKind::persona_cot_batch;
    if (needs_persona && (!persona || persona->empty()))
        throw ConfigError("condition " + to_string(kind) + " requires a persona");
    if (kind == ConditionKind::seeded && (!seed_text || seed_text->empty()))
        throw ConfigError("seeded condition requires seed_text");
    if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
}

std::string ConditionSpec::group_label() const {
    const std::string pool = persona_pool == PersonaPoolId::none ? "" : "_" + to_string(persona_pool);
    switch (kind) {
        case ConditionKind::default_sequential: return "default";
        case ConditionKind::seeded: return "seeded";
        case ConditionKind::persona_sequential: return "persona" + pool;
        case ConditionKind::cot_batch: return "cot";
        case ConditionKind::persona_cot_batch: return "persona_cot" + pool;
        case ConditionKind::cot_revision_sequential:
            return persona ? "persona_cot_revision" + pool : "cot_revision";
    }
    throw DataError("unknown condition kind");
}

bool Session::complete() const {
    if (static_cast<int>(ideas.size()) != kFullLength) return false;
    for (std::size_t i = 0; i < ideas.size(); ++i)
        if (ideas[i].index != static_cast<int>(i) + 1) return false;
    return true;
}

bool Session::fully_labeled() const {
    return std::all_of(ideas.begin(), ideas.end(),
                       [](const Idea& idea) { return idea.label.has_value(); });
}

std::string Session::group_label() const {
    return source == SessionSource::human ? "human" : condition.group_label();
}

namespace {

constexpr const char* kColumns[] = {
    "session_id", "index",        "text",        "source",       "offtask_ratio",
    "condition_kind", "persona",  "persona_pool", "seed_text",   "temperature",
    "model_id",   "industry_context", "psychological_need", "product_form", "scheme_version"};
constexpr std::size_t kNumColumns = sizeof(kColumns) / sizeof(kColumns[0]);

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json row_from_idea(const Session& s, const Idea& idea) {
    json row;
    row["session_id"] = s.id;
    row["index"] = idea.index;
    row["text"] = idea.text;
    row["source"] = to_string(s.source);
    if (s.offtask_ratio) row["offtask_ratio"] = *s.offtask_ratio;
    row["condition_kind"] = to_string(s.condition.kind);
    if (s.condition.persona) row["persona"] = *s.condition.persona;
    if (s.condition.persona_pool != PersonaPoolId::none)
        row["persona_pool"] = to_string(s.condition.persona_pool);
    if (s.condition.seed_text) row["seed_text"] = *s.condition.seed_text;
    row["temperature"] = s.condition.temperature;
    row["model_id"] = s.condition.model_id;
    if (idea.label) {
        row["industry_context"] = idea.label->industry_context;
        row["psychological_need"] = idea.label->psychological_need;
        row["product_form"] = idea.label->product_form;
        row["scheme_version"] = idea.label->scheme_version;
    }
    return row;
}

struct ParsedRow {
    std::string session_id;
    int index = 0;
    std::string text;
    SessionSource source = SessionSource::llm;
    std::optional<double> offtask_ratio;
    ConditionSpec condition;
    std::optional<IdeaLabel> label;
};

ParsedRow row_from_json(const json& row, std::size_t line_no) {
    auto fail = [&](const std::string& msg) -> DataError {
        return DataError("line " + std::to_string(line_no) + ": " + msg);
    };
    ParsedRow out;
    try {
        out.session_id = row.at("session_id").get<std::string>();
        out.index = row.at("index").get<int>();
        out.text = row.at("text").get<std::string>();
    } catch (const json::exception& e) {
        throw fail(std::string("missing or malformed required field: ") + e.what());
    }
    std::string trimmed = out.text;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
    if (trimmed.empty()) throw fail("idea text is empty");
    if (out.index < 1) throw fail("index must be >= 1");

    if (row.contains("source")) out.source = session_source_from_string(row.at("source").get<std::string>());
    if (row.contains("offtask_ratio") && !row.at("offtask_ratio").is_null()) {
        double r = row.at("offtask_ratio").get<double>();
        if (r < 0) throw fail("offtask_ratio must be nonnegative");
        out.offtask_ratio = r;
    }
    if (out.source == SessionSource::llm && out.offtask_ratio)
        throw fail("llm session must not carry offtask_ratio");

    if (row.contains("condition_kind"))
        out.condition.kind = condition_kind_from_string(row.at("condition_kind").get<std::string>());
    if (row.contains("persona") && !row.at("persona").is_null() &&
        !row.at("persona").get<std::string>().empty())
        out.condition.persona = row.at("persona").get<std::string>();
    if (row.contains("persona_pool") && !row.at("persona_pool").is_null())
        out.condition.persona_pool = persona_pool_from_string(row.at("persona_pool").get<std::string>());
    if (row.contains("seed_text") && !row.at("seed_text").is_null() &&
        !row.at("seed_text").get<std::string>().empty())
        out.condition.seed_text = row.at("seed_text").get<std::string>();
    if (row.contains("temperature") && !row.at("temperature").is_null())
        out.condition.temperature = row.at("temperature").get<double>();
    if (row.contains("model_id") && !row.at("model_id").is_null())
        out.condition.model_id = row.at("model_id").get<std::string>();

    const bool has_label = row.contains("industry_context") && !row.at("industry_context").is_null() &&
                           !row.at("industry_context").get<std::string>().empty();
    if (has_label) {
        IdeaLabel label;
        try {
            label.industry_context = row.at("industry_context").get<std::string>();
            label.psychological_need = row.at("psychological_need").get<std::string>();
            label.product_form = row.at("product_form").get<std::string>();
            label.scheme_version = row.value("scheme_version", std::string{});
        } catch (const json::exception&) {
            throw fail("partial label triple (all three dimensions required)");
        }
        out.label = std::move(label);
    }
    return out;
}

// Minimal RFC-4180 CSV. Idea text routinely contains commas and quotes.
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// One CSV record, quote-aware: a quoted field may span lines. Returns
// nullopt at end of input; line_no advances past consumed lines.
std::optional<std::vector<std::string>> csv_record(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
        if (i >= line.size()) {
            if (!quoted) break;
            // Quoted field continues on the next physical line.
            if (!std::getline(in, line))
                throw DataError("line " + std::to_string(line_no) + ": unterminated quote in CSV");
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            cur.push_back('\n');
            i = 0;
            continue;
        }
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
        ++i;
    }
    fields.push_back(cur);
    return fields;
}

json csv_row_to_json(const std::vector<std::string>& header, const std::vector<std::string>& fields,
                     std::size_t line_no) {
    if (fields.size() != header.size())
        throw DataError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    json row;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& col = header[i];
        const std::string& val = fields[i];
        if (val.empty()) continue;
        if (col == "index") {
            row[col] = std::stoi(val);
        } else if (col == "offtask_ratio" || col == "temperature") {
            row[col] = std::stod(val);
        } else {
            row[col] = val;
        }
    }
    return row;
}

std::vector<Session> assemble_sessions(std::vector<std::pair<ParsedRow, std::size_t>>& rows) {
    // Group by session id, preserving first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<ParsedRow, std::size_t>>> by_id;
    for (auto& [row, line] : rows) {
        if (by_id.find(row.session_id) == by_id.end()) order.push_back(row.session_id);
        by_id[row.session_id].emplace_back(std::move(row), line);
    }
    std::vector<Session> sessions;
    sessions.reserve(order.size());
    for (const auto& id : order) {
        auto& group = by_id[id];
        std::sort(group.begin(), group.end(),
                  [](const auto& a, const auto& b) { return a.first.index < b.first.index; });
        Session s;
        s.id = id;
        s.source = group.front().first.source;
        s.condition = group.front().first.condition;
        s.offtask_ratio = group.front().first.offtask_ratio;
        int expect = 1;
        for (auto& [row, line] : group) {
            if (row.index < expect)
                throw DataError("line " + std::to_string(line) + ": duplicate (" + id + ", " +
                                std::to_string(row.index) + ")");
            if (row.index > expect)
                throw DataError("line " + std::to_string(line) + ": index gap in session " + id +
                                " (expected " + std::to_string(expect) + ", got " +
                                std::to_string(row.index) + ")");
            Idea idea;
            idea.session_id = id;
            idea.index = row.index;
            idea.text = std::move(row.text);
            idea.label = std::move(row.label);
            s.ideas.push_back(std::move(idea));
            ++expect;
        }
        sessions.push_back(std::move(s));
    }
    return sessions;
}

}  // namespace

std::vector<Session> read_corpus(const std::string& path, CorpusFormat format, ReadReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);

    std::vector<std::pair<ParsedRow, std::size_t>> rows;
    std::string line;
    std::size_t line_no = 0;

    if (format == CorpusFormat::jsonl) {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json row;
            try {
                row = json::parse(line);
            } catch (const json::exception& e) {
                throw DataError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
            }
            rows.emplace_back(row_from_json(row, line_no), line_no);
        }
    } else {
        std::vector<std::string> header;
        while (auto fields = csv_record(in, line_no)) {
            if (fields->size() == 1 && fields->front().empty()) continue;  // blank line
            if (header.empty()) {
                header = std::move(*fields);
                continue;
            }
            rows.emplace_back(row_from_json(csv_row_to_json(header, *fields, line_no), line_no),
                              line_no);
        }
    }

    auto sessions = assemble_sessions(rows);
    if (report) {
        for (const auto& s : sessions)
            if (!s.complete())
                report->warnings.push_back("session " + s.id + " is incomplete (" +
                                           std::to_string(s.ideas.size()) + " ideas)");
    }
    return sessions;
}

void write_corpus(const std::vector<Session>& sessions, const std::string& path,
                  CorpusFormat format) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);

    if (format == CorpusFormat::jsonl) {
        for (const auto& s : sessions)
            for (const auto& idea : s.ideas) out << row_from_idea(s, idea).dump() << "\n";
    } else {
        for (std::size_t i = 0; i < kNumColumns; ++i)
            out << (i ? "," : "") << kColumns[i];
        out << "\n";
        for (const auto& s : sessions) {
            for (const auto& idea : s.ideas) {
                json row = row_from_idea(s, idea);
                for (std::size_t i = 0; i < kNumColumns; ++i) {
                    if (i) out << ",";
                    const char* col = kColumns[i];
                    if (!row.contains(col)) continue;
                    const json& v = row[col];
                    if (v.is_string()) out << csv_escape(v.get<std::string>());
                    else if (v.is_number_integer()) out << v.get<long long>();
                    else out << format_double(v.get<double>());
                }
                out << "\n";
            }
        }
    }
    out.flush();
    if (!out) throw DataError("write failed: " + path);
}

OfftaskFilterResult filter_offtask(const std::vector<Session>& sessions, double threshold) {
    if (threshold <= 0.0) throw ConfigError("offtask threshold must be > 0");
    OfftaskFilterResult result;
    for (const auto& s : sessions) {
        if (s.source == SessionSource::human) {
            if (!s.offtask_ratio) {
                result.warnings.push_back("human session " + s.id +
                                          " has no offtask_ratio; retained");
            } else if (*s.offtask_ratio > threshold) {
                ++result.removed;
                continue;
            }
        }
        result.kept.push_back(s);
    }
    return result;
}

std::vector<Session> analysis_view(const std::vector<Session>& sessions, bool include_incomplete) {
    std::vector<Session> out;
    for (const auto& s : sessions)
        if (include_incomplete || s.complete()) out.push_back(s);
    return out;
}

}  // namespace ideabench
