#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ideabench/corpus.hpp"
#include "ideabench/gateway.hpp"

namespace ideabench {

// Generative model of ideation sessions with two explicit knobs:
//   rho  - partitioning strength: each draw follows the agent's own home
//          category with probability rho, otherwise the population-shared
//          pool draw for that step.
//   phi  - fixation strength: for ideas after the first, each dimension
//          copies the previous idea's category with probability phi.
//
// The non-home component is realized with common random numbers: every agent
// that samples "from the pool" at step t gets the same pool draw. Per-draw
// marginals match the mixture (1-rho)*uniform + rho*point-mass(home) exactly,
// while across agents the pool acts as one centralized distribution, so at
// rho=0 independent sessions collapse onto identical idea sequences and at
// high rho agents disperse to their own homes. That is what makes first-idea
// diversity and centroid dispersion rise with rho while leaving every
// per-dimension frequency uniform.
struct PopulationParams {
    double rho = 0.0;
    double phi = 0.0;
    CategoryScheme scheme = CategoryScheme::builtin();
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct AgentProfile {
    std::uint64_t population_seed = 0;
    std::uint64_t agent_index = 0;
    double rho = 0.0;
    std::array<std::size_t, 3> home;  // category index per dimension
    CategoryScheme scheme;

    // Mixture weight of category `cat` in dimension `dim`:
    // (1-rho)/K + rho*[cat == home].
    double category_probability(std::size_t dim, std::size_t cat) const;
};

// Home categories drawn uniformly per dimension from a stream keyed by
// (rng_seed, agent_index). Pure function.
AgentProfile sample_agent(const PopulationParams& params, std::uint64_t agent_index);

// The population-shared pool draw for step t and dimension dim.
std::size_t shared_pool_category(const PopulationParams& params, int idea_index, std::size_t dim);

// Idea 1 samples each dimension from the profile mixture; for t > 1 each
// dimension independently copies idea t-1's category with probability phi,
// otherwise samples the mixture afresh. Deterministic in (profile, phi, n).
std::vector<IdeaLabel> generate_session_labels(const AgentProfile& profile, double phi, int n);

// Deterministic sentence embedding all three category names, so the fixed
// categorizer can recover the label from the text alone.
std::string render_idea_text(const IdeaLabel& label, std::uint64_t seed);

// Recover a label from rendered text by scanning for category names; nullopt
// if any dimension is not found.
std::optional<IdeaLabel> scan_label(const CategoryScheme& scheme, const std::string& text);

struct SimBackendOptions {
    std::size_t embedding_dim = 32;
};

// Gateway backend driven by the generative model: sequential/batch/revision
// ideation prompts are answered from the agent's label path (agent identity
// comes from the request's sampling seed), categorization prompts are
// answered by scanning the quoted idea text, and embeddings are seeded hash
// projections of the text. Pure function of (params, request).
std::shared_ptr<Backend> make_sim_backend(PopulationParams params, SimBackendOptions options = {});

}  // namespace ideabench
