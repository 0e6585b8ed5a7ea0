// SPDX-License-Identifier: Apache-2.0
//
// Prompt construction, the LLM-backend abstraction and perturbation-response
// parsing. Two backends ship: a remote chat-completions client (remote.hpp)
// and a deterministic simulated backend for tests and desk-scale runs.
#ifndef HALLUCIMC_AGENTS_HPP
#define HALLUCIMC_AGENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hallucimc/core.hpp"

namespace hallucimc {

/// Sampling parameters transmitted verbatim to the generation endpoint.
struct GenerationParams {
    double temperature = 1.0;
    double top_p = 0.95;
    int max_tokens = 800;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    std::int64_t seed = 123;
    std::string model = "gpt-3.5-turbo";

    void validate() const;
};

/// "Rewrite the query in {n} radically different ways.\nQuery: {q0}"
std::string render_perturbation_prompt(std::string_view q0, int n);

/// Scenario-specific answer prompt. Choice order is preserved exactly as
/// stored, enumerated A), B), ... for every variant of a record.
std::string render_output_prompt(std::string_view query,
                                 Scenario scenario,
                                 const std::optional<std::string>& context,
                                 const std::optional<std::vector<std::string>>& choices);

/// Splits a perturbator response into exactly n rewrites. Accepts numbered
/// markers ("1." / "1)") or plain lines; enumeration prefixes and surrounding
/// quotes are stripped. Throws ParseError when fewer than n non-empty items
/// can be extracted; extra items beyond n are dropped.
std::vector<std::string> parse_perturbations(const std::string& raw, int n);

/// Identifies one logical request stream for a record.
struct StreamKey {
    enum class Role { perturb, generate };
    std::string query_id;
    int index = 0;  // perturbation index for generate, attempt number for perturb
    Role role = Role::generate;
};

struct BackendResult {
    OutputStatus status = OutputStatus::ok;
    std::string text;
    std::string raw_response_digest;
    std::int64_t total_tokens = 0;  // usage echoed by the endpoint, 0 when absent
};

/// A chat backend usable from many concurrent tasks.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual BackendResult complete(const std::string& prompt,
                                   const GenerationParams& params,
                                   const StreamKey& key) = 0;
};

/// Test double for the Output Generator: per-query correctness probability
/// and a pool of wrong answers, driven by a counter-based generator so every
/// (seed, id, index) triple yields the same output on every machine.
struct SimulatedAgentProfile {
    std::unordered_map<std::string, double> correct_prob;
    std::unordered_map<std::string, std::vector<std::string>> wrong_pool;
    std::unordered_map<std::string, std::string> ground_truth;
    std::uint64_t rng_seed = 0;
};

/// One deterministic draw. Throws ValidationError when the profile does not
/// cover query_id.
AgentOutput simulated_agent(const std::string& query_id,
                            const SimulatedAgentProfile& profile,
                            int stream_index);

/// Profile with the same correctness probability for every record. Wrong
/// answers come from the record's non-truth choices when present, otherwise
/// from pool_size synthetic strings.
SimulatedAgentProfile make_uniform_profile(const std::vector<QueryRecord>& records,
                                           double correct_prob,
                                           std::uint64_t rng_seed,
                                           int pool_size = 3);

/// Backend wrapper over simulated_agent. Perturbation prompts are answered
/// with a deterministic numbered list of n rewrites derived from the query.
class SimulatedBackend final : public LlmBackend {
public:
    explicit SimulatedBackend(SimulatedAgentProfile profile);
    BackendResult complete(const std::string& prompt,
                           const GenerationParams& params,
                           const StreamKey& key) override;
    const SimulatedAgentProfile& profile() const { return profile_; }

private:
    SimulatedAgentProfile profile_;
};

}  // namespace hallucimc

#endif
