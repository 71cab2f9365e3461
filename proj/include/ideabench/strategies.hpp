#pragma once

#include <string>
#include <vector>

#include "ideabench/corpus.hpp"
#include "ideabench/gateway.hpp"

namespace ideabench {

struct SessionPlan {
    ConditionSpec condition;
    int num_ideas = 10;
    std::string participant_id;

    void validate() const;
};

struct PersonaPool {
    PersonaPoolId name = PersonaPoolId::ordinary;
    std::vector<std::string> personas;

    // One persona per line. Throws ConfigError on missing file, empty or
    // duplicate entries.
    static PersonaPool load(PersonaPoolId name, const std::string& path);
};

namespace prompts {

// Sequential protocol templates. The default and persona variants differ in
// wording, label casing ("idea #k" vs "Idea #k") and where the period sits
// relative to the quoted label; both are load-bearing for golden tests.
extern const char* kDefaultSystemMessage;
std::string sequential_user_prompt(int idea_number);
std::string persona_system_message(const std::string& persona);
std::string persona_user_prompt(int idea_number);

// Single-call batch templates (JSON-array output).
std::string cot_batch_prompt(int num_ideas = 10);
std::string persona_cot_batch_prompt(const std::string& persona, int num_ideas = 10);

// Revision pass over previously generated ideas (JSON-array output).
std::string revision_prompt(const std::vector<std::string>& ideas);
std::string persona_revision_prompt(const std::string& persona,
                                    const std::vector<std::string>& ideas);

// Appended as a user message after an unparseable batch reply; one retry.
std::string cot_corrective_prompt(int num_ideas = 10);

}  // namespace prompts

// Message list for the next sequential call: optional system message, then
// alternating user prompt / assistant reply pairs for every prior idea, then
// the user prompt for idea next_index. Sequential kinds only. For the seeded
// condition prior_ideas[0] must equal the condition's seed_text (the seed is
// the assistant reply for idea #1).
std::vector<ChatMessage> build_messages(const SessionPlan& plan,
                                        const std::vector<std::string>& prior_ideas,
                                        int next_index);

enum class CotParseErrorKind { no_array, wrong_count, bad_number, empty_content };

struct CotParseError : DataError {
    CotParseError(CotParseErrorKind kind, const std::string& msg)
        : DataError(msg), kind(kind) {}
    CotParseErrorKind kind;
};

// Extracts the first balanced JSON array from raw (tolerating code fences
// and surrounding prose) and validates expected_count objects with unique
// idea_number 1..expected_count and nonempty idea_content. Result is sorted
// by idea_number.
std::vector<std::pair<int, std::string>> parse_cot_json(const std::string& raw,
                                                        int expected_count = 10);

// Runs one full ideation session for the plan's condition: sequential kinds
// issue num_ideas chat calls with growing history, batch kinds issue one
// call and parse its JSON array, cot_revision_sequential runs the base
// sequential session then one revision call whose parsed output replaces the
// originals. Batch/revision parse failures get exactly one corrective retry.
Session run_session(const SessionPlan& plan, Gateway& gateway);

// Stable per-participant sampling seed threaded through ChatRequest.
std::uint64_t participant_sampling_seed(const std::string& participant_id);

}  // namespace ideabench
