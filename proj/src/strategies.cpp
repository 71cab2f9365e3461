#include "ideabench/strategies.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ideabench/rng.hpp"

using nlohmann::json;

namespace ideabench {

void SessionPlan::validate() const {
    if (num_ideas < 1) throw ConfigError("num_ideas must be >= 1");
    if (participant_id.empty()) throw ConfigError("participant_id must be nonempty");
    condition.validate();
}

PersonaPool PersonaPool::load(PersonaPoolId name, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open persona pool file: " + path);
    PersonaPool pool;
    pool.name = name;
    std::string line;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!seen.insert(line).second)
            throw ConfigError("duplicate persona in " + path + ": " + line);
        pool.personas.push_back(line);
    }
    if (pool.personas.empty()) throw ConfigError("persona pool file is empty: " + path);
    return pool;
}

namespace prompts {

const char* kDefaultSystemMessage = "You are a helpful assistant.";

std::string sequential_user_prompt(int idea_number) {
    return "Give me 1 new idea for a new fitness product. The idea should be explained in "
           "exactly one sentence. Just give me the idea, labeled 'idea #" +
           std::to_string(idea_number) + ".'";
}

std::string persona_system_message(const std::string& persona) {
    return "You are acting as this persona: " + persona +
           ". Generate ideas from this persona's perspective.";
}

std::string persona_user_prompt(int idea_number) {
    return "Give me 1 new idea for a fitness product. The idea should be explained in exactly "
           "one sentence. Just give me the idea, labeled 'Idea #" +
           std::to_string(idea_number) + "'.";
}

std::string cot_batch_prompt(int num_ideas) {
    const std::string n = std::to_string(num_ideas);
    return "Generate fitness product ideas. Follow these steps:\n"
           "1. Generate a list of " + n + " ideas (short title only)\n"
           "2. Review and make them bolder and more different - no two ideas should be the same\n"
           "3. Return ONLY a JSON array with " + n + " objects, each with \"idea_number\" (1-" +
           n + ") and \"idea_content\" (one sentence description)\n"
           "\n"
           "Return ONLY the JSON array, no other text.";
}

std::string persona_cot_batch_prompt(const std::string& persona, int num_ideas) {
    const std::string n = std::to_string(num_ideas);
    return "You are acting as this persona: " + persona + "\n"
           "\n"
           "Generate fitness product ideas from this persona's perspective using chain of "
           "thought reasoning. Follow these steps:\n"
           "\n"
           "1. First, think about what this persona would value in fitness products based on "
           "their characteristics.\n"
           "2. Generate a list of " + n + " fitness product ideas that align with this persona's "
           "needs and preferences (short titles only).\n"
           "3. Review and refine ideas to make them bolder and more different - ensure that no "
           "two ideas are the same.\n"
           "4. Consider how this persona would uniquely approach or modify each idea.\n"
           "\n"
           "Return ONLY a JSON array with " + n + " objects, each with:\n"
           "- \"idea_number\" (1-" + n + ")\n"
           "- \"idea_content\" (one sentence description from this persona's perspective)\n"
           "\n"
           "Return ONLY the JSON array, no other text or explanation.";
}

namespace {
std::string numbered_idea_block(const std::vector<std::string>& ideas) {
    std::string out;
    for (std::size_t i = 0; i < ideas.size(); ++i)
        out += "Idea #" + std::to_string(i + 1) + ": " + ideas[i] + "\n";
    return out;
}
}  // namespace

std::string revision_prompt(const std::vector<std::string>& ideas) {
    const std::string n = std::to_string(ideas.size());
    return "Please review the " + n + " fitness product ideas below. Revise them to make them "
           "bolder and more different from one another. Ensure that no two ideas are the same "
           "across your ten responses.\n"
           "\n" +
           numbered_idea_block(ideas) +
           "\n"
           "Return ONLY a JSON array with " + n + " objects, each with \"idea_number\" (1-" + n +
           ") and \"idea_content\" (revised one-sentence description). Make them bolder and "
           "more distinctive.";
}

std::string persona_revision_prompt(const std::string& persona,
                                    const std::vector<std::string>& ideas) {
    const std::string n = std::to_string(ideas.size());
    return "You are acting as this persona: " + persona + ".\n"
           "\n"
           "Please review the " + n + " fitness product ideas below that you previously "
           "generated from this persona's perspective. Revise them to make them bolder and more "
           "different from one another while staying faithful to the persona. Ensure that no "
           "two ideas are the same across your ten responses.\n"
           "\n" +
           numbered_idea_block(ideas) +
           "\n"
           "Return ONLY a JSON array with " + n + " objects, each with \"idea_number\" (1-" + n +
           ") and \"idea_content\" (revised one-sentence description). Make them bolder and "
           "more distinctive.";
}

std::string cot_corrective_prompt(int num_ideas) {
    const std::string n = std::to_string(num_ideas);
    return "Your previous reply could not be parsed. Return ONLY a JSON array with " + n +
           " objects, each with \"idea_number\" (1-" + n +
           ") and \"idea_content\" (one sentence description). No other text.";
}

}  // namespace prompts

std::vector<ChatMessage> build_messages(const SessionPlan& plan,
                                        const std::vector<std::string>& prior_ideas,
                                        int next_index) {
    plan.validate();
    const ConditionKind kind = plan.condition.kind;
    const bool persona_style = kind == ConditionKind::persona_sequential ||
                               (kind == ConditionKind::cot_revision_sequential &&
                                plan.condition.persona.has_value());
    const bool sequential = kind == ConditionKind::default_sequential ||
                            kind == ConditionKind::seeded ||
                            kind == ConditionKind::persona_sequential ||
                            kind == ConditionKind::cot_revision_sequential;
    if (!sequential)
        throw ConfigError("build_messages: " + to_string(kind) + " is not a sequential condition");
    if (next_index != static_cast<int>(prior_ideas.size()) + 1)
        throw ConfigError("build_messages: next_index " + std::to_string(next_index) +
                          " does not follow " + std::to_string(prior_ideas.size()) +
                          " prior ideas");
    if (next_index < 1 || next_index > plan.num_ideas)
        throw ConfigError("build_messages: idea index out of range");
    if (kind == ConditionKind::seeded) {
        if (next_index == 1)
            throw ConfigError("build_messages: seeded sessions inject idea #1; generation starts at #2");
        if (prior_ideas.front() != *plan.condition.seed_text)
            throw ConfigError("build_messages: seeded history must start with the seed text");
    }

    std::vector<ChatMessage> messages;
    if (persona_style) {
        messages.push_back(
            {ChatRole::system, prompts::persona_system_message(*plan.condition.persona)});
    } else {
        messages.push_back({ChatRole::system, prompts::kDefaultSystemMessage});
    }
    auto user_prompt = [&](int k) {
        return persona_style ? prompts::persona_user_prompt(k) : prompts::sequential_user_prompt(k);
    };
    for (int k = 1; k < next_index; ++k) {
        messages.push_back({ChatRole::user, user_prompt(k)});
        messages.push_back({ChatRole::assistant, prior_ideas[static_cast<std::size_t>(k - 1)]});
    }
    messages.push_back({ChatRole::user, user_prompt(next_index)});
    return messages;
}

namespace {

// First balanced JSON array in raw, honoring string/escape state so brackets
// inside idea text do not confuse the scan.
std::optional<std::string> extract_first_array(const std::string& raw) {
    for (std::size_t start = 0; start < raw.size(); ++start) {
        if (raw[start] != '[') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '[') ++depth;
            else if (c == ']') {
                if (--depth == 0) {
                    std::string candidate = raw.substr(start, i - start + 1);
                    if (json::accept(candidate)) return candidate;
                    break;  // balanced but invalid; try the next '['
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::pair<int, std::string>> parse_cot_json(const std::string& raw, int expected_count) {
    if (raw.empty()) throw CotParseError(CotParseErrorKind::no_array, "empty reply");
    const auto arr_text = extract_first_array(raw);
    if (!arr_text)
        throw CotParseError(CotParseErrorKind::no_array, "no JSON array found in reply");
    const json arr = json::parse(*arr_text);

    if (static_cast<int>(arr.size()) != expected_count)
        throw CotParseError(CotParseErrorKind::wrong_count,
                            "expected " + std::to_string(expected_count) + " objects, got " +
                                std::to_string(arr.size()));

    std::vector<std::pair<int, std::string>> out;
    std::set<int> seen;
    for (const auto& obj : arr) {
        if (!obj.is_object() || !obj.contains("idea_number") || !obj.contains("idea_content"))
            throw CotParseError(CotParseErrorKind::bad_number,
                                "object missing idea_number/idea_content");
        if (!obj["idea_number"].is_number_integer())
            throw CotParseError(CotParseErrorKind::bad_number, "idea_number is not an integer");
        const int num = obj["idea_number"].get<int>();
        if (num < 1 || num > expected_count)
            throw CotParseError(CotParseErrorKind::bad_number,
                                "idea_number " + std::to_string(num) + " out of range 1.." +
                                    std::to_string(expected_count));
        if (!seen.insert(num).second)
            throw CotParseError(CotParseErrorKind::bad_number,
                                "duplicate idea_number " + std::to_string(num));
        std::string content = obj["idea_content"].is_string()
                                  ? obj["idea_content"].get<std::string>()
                                  : std::string{};
        if (content.find_first_not_of(" \t\r\n") == std::string::npos)
            throw CotParseError(CotParseErrorKind::empty_content,
                                "empty idea_content for idea_number " + std::to_string(num));
        out.emplace_back(num, std::move(content));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t participant_sampling_seed(const std::string& participant_id) {
    return hash_str(0x69646561ULL, participant_id);
}

namespace {

// One batch call returning a JSON array, with exactly one corrective retry.
std::vector<std::pair<int, std::string>> batch_call(Gateway& gateway, ChatRequest request,
                                                    int expected_count) {
    const std::string first_reply = gateway.complete_chat(request);
    try {
        return parse_cot_json(first_reply, expected_count);
    } catch (const CotParseError&) {
        request.messages.push_back({ChatRole::assistant, first_reply});
        request.messages.push_back({ChatRole::user, prompts::cot_corrective_prompt(expected_count)});
        const std::string second_reply = gateway.complete_chat(request);
        return parse_cot_json(second_reply, expected_count);  // failure propagates
    }
}

std::vector<std::string> contents_of(const std::vector<std::pair<int, std::string>>& parsed) {
    std::vector<std::string> out;
    out.reserve(parsed.size());
    for (const auto& [num, content] : parsed) out.push_back(content);
    return out;
}

}  // namespace

Session run_session(const SessionPlan& plan, Gateway& gateway) {
    plan.validate();
    const ConditionKind kind = plan.condition.kind;

    Session session;
    session.id = plan.participant_id;
    session.source = SessionSource::llm;
    session.condition = plan.condition;

    const std::uint64_t sampling_seed = participant_sampling_seed(plan.participant_id);
    auto make_request = [&](std::vector<ChatMessage> messages) {
        ChatRequest req;
        req.model_id = plan.condition.model_id;
        req.temperature = plan.condition.temperature;
        req.sampling_seed = sampling_seed;
        req.messages = std::move(messages);
        return req;
    };

    std::vector<std::string> texts;

    if (kind == ConditionKind::cot_batch || kind == ConditionKind::persona_cot_batch) {
        const std::string prompt =
            kind == ConditionKind::cot_batch
                ? prompts::cot_batch_prompt(plan.num_ideas)
                : prompts::persona_cot_batch_prompt(*plan.condition.persona, plan.num_ideas);
        const auto parsed =
            batch_call(gateway, make_request({{ChatRole::user, prompt}}), plan.num_ideas);
        texts = contents_of(parsed);
    } else {
        // Sequential base: seeded sessions start with the injected seed.
        int start_index = 1;
        if (kind == ConditionKind::seeded) {
            texts.push_back(*plan.condition.seed_text);
            start_index = 2;
        }
        for (int k = start_index; k <= plan.num_ideas; ++k) {
            const auto messages = build_messages(plan, texts, k);
            texts.push_back(gateway.complete_chat(make_request(messages)));
        }

        if (kind == ConditionKind::cot_revision_sequential) {
            std::vector<ChatMessage> messages;
            if (plan.condition.persona) {
                messages.push_back({ChatRole::system,
                                    prompts::persona_system_message(*plan.condition.persona)});
                messages.push_back({ChatRole::user, prompts::persona_revision_prompt(
                                                        *plan.condition.persona, texts)});
            } else {
                messages.push_back({ChatRole::user, prompts::revision_prompt(texts)});
            }
            const auto parsed = batch_call(gateway, make_request(std::move(messages)),
                                           plan.num_ideas);
            texts = contents_of(parsed);  // revised ideas replace originals
        }
    }

    for (int k = 1; k <= plan.num_ideas; ++k) {
        Idea idea;
        idea.session_id = session.id;
        idea.index = k;
        idea.text = texts[static_cast<std::size_t>(k - 1)];
        if (idea.text.find_first_not_of(" \t\r\n") == std::string::npos)
            throw DataError("session " + session.id + ": empty idea text at #" +
                            std::to_string(k));
        session.ideas.push_back(std::move(idea));
    }
    return session;
}

}  // namespace ideabench
