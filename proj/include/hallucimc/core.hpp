// SPDX-License-Identifier: Apache-2.0
//
// Domain types shared by the whole pipeline: queries, perturbation sets,
// agent outputs and completed simulation rounds.
#ifndef HALLUCIMC_CORE_HPP
#define HALLUCIMC_CORE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hallucimc/errors.hpp"
#include "hallucimc/rational.hpp"

namespace hallucimc {

enum class Scenario { extractive, multiple_choice, abstractive };

/// Serialized tag, also used inside prompts: EXTRACTIVE / MULTIPLE CHOICE / ABSTRACTIVE.
std::string_view scenario_tag(Scenario s);
std::optional<Scenario> scenario_from_tag(std::string_view tag);

/// Letter label for the i-th stored choice: A, B, C, ...
std::string choice_letter(std::size_t index);

/// One dataset item.
struct QueryRecord {
    std::string id;
    Scenario scenario = Scenario::abstractive;
    std::string text;                                   // the original query q0
    std::optional<std::string> context;                 // extractive only
    std::optional<std::vector<std::string>> choices;    // multiple choice only
    std::string ground_truth;
    std::optional<std::string> choice_label;            // letter of ground_truth when choices present

    /// Throws ValidationError when the scenario-dependent field rules are broken.
    void validate() const;

    /// Fills choice_label from the position of ground_truth in choices.
    void derive_choice_label();
};

/// The n+1 query variants; index 0 is always the untouched original.
struct PerturbationSet {
    QueryRecord original;
    std::vector<std::string> variants;  // length n + 1
    int n = 0;
};

/// Builds a PerturbationSet from n rewrites. The original text is prepended
/// at index 0 (the identity transform).
PerturbationSet make_perturbation_set(QueryRecord original, std::vector<std::string> rewrites, int n);

enum class OutputStatus { ok, api_error, content_filtered, parse_failure };

std::string_view output_status_name(OutputStatus s);
std::optional<OutputStatus> output_status_from_name(std::string_view name);

/// One agent's answer to one query variant.
struct AgentOutput {
    int perturbation_index = 0;
    std::string text;
    OutputStatus status = OutputStatus::ok;
    std::string raw_response_digest;

    void validate() const;
};

enum class Outcome { consensus, dissent, corrective, erroneous };

std::string_view outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

/// Relates the original query's correctness to the panel majority.
/// indicators[i] is 1 when output i hallucinated; indicators[0] belongs to the
/// original query. Majority means a strict majority of the n+1 indicators are
/// correct; an exact tie counts as majority-incorrect.
Outcome classify_outcome(std::span<const int> indicators);

/// One completed Monte Carlo round for a single query.
struct SimulationRecord {
    QueryRecord query;
    PerturbationSet perturbations;
    std::vector<AgentOutput> outputs;   // length n + 1, outputs[i] answers variants[i]
    std::vector<int> indicators;        // length n + 1, values in {0,1}
    Rational p_h;                       // sum(indicators) / (n+1), exact
    int binary_label = 0;               // 1 iff p_h > 0
    int class_label = 0;                // floor((n+1) * p_h) == sum(indicators)
    Outcome outcome = Outcome::consensus;
    int failed_agents = 0;              // outputs with status != ok
    std::uint64_t sequence = 0;         // assigned by the persistence layer

    void validate() const;
};

/// Derives indicators-dependent fields (p_h, labels, outcome, failed_agents)
/// and returns the assembled record.
SimulationRecord make_simulation_record(QueryRecord query,
                                        PerturbationSet perturbations,
                                        std::vector<AgentOutput> outputs,
                                        std::vector<int> indicators);

}  // namespace hallucimc

#endif
