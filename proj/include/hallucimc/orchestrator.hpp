// SPDX-License-Identifier: Apache-2.0
//
// End-to-end Monte Carlo pipeline: perturb once, run n+1 independent
// generations, grade, label, persist. Append-only JSONL store with a
// run-manifest sidecar; interrupted runs resume at record granularity.
#ifndef HALLUCIMC_ORCHESTRATOR_HPP
#define HALLUCIMC_ORCHESTRATOR_HPP

#include <filesystem>
#include <vector>

#include "hallucimc/agents.hpp"
#include "hallucimc/core.hpp"
#include "hallucimc/matcher.hpp"

namespace hallucimc {

struct RunConfig {
    enum class Backend { simulated, remote };

    int n = 5;
    Backend backend = Backend::simulated;
    int concurrency_cap = 8;
    std::filesystem::path output_path;
    bool resume = false;
    MatchConfig match;
    GenerationParams generation;
    int perturb_reasks = 2;   // extra perturbation attempts before skipping a query
    std::size_t progress_every = 0;  // stderr progress line cadence, 0 = silent

    void validate() const;
};

struct RunStats {
    std::size_t input_count = 0;
    std::size_t completed = 0;
    std::size_t skipped = 0;         // queries dropped after repeated perturbation failures
    std::size_t failed_outputs = 0;  // agent outputs with status != ok
    std::int64_t total_tokens = 0;   // usage echoed by the endpoint
};

/// Scenario-tagged classifier input: <<[{TAG}] {q0}>>.
std::string encode_with_scenario(std::string_view q0, Scenario scenario);

/// Records whose id already sits in the store are dropped. Corrupt store
/// lines produce a warning and are skipped.
std::vector<QueryRecord> resume_filter(const std::vector<QueryRecord>& dataset,
                                       const std::filesystem::path& store_path);

/// Runs the full pipeline over the dataset. Per-query failures are recorded
/// or skipped, never fatal; an unwritable output path is. Records are
/// flushed one JSONL line at a time in dataset order, so identical inputs,
/// seeds and config produce byte-identical stores regardless of scheduling.
RunStats run_simulation(const std::vector<QueryRecord>& dataset,
                        const RunConfig& cfg,
                        LlmBackend& backend,
                        const Matcher& matcher);

}  // namespace hallucimc

#endif
