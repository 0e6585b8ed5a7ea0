// SPDX-License-Identifier: Apache-2.0
//
// JSONL schemas: dataset records in, simulation records out. Field names are
// part of the wire contract; unknown fields on input are ignored.
#ifndef HALLUCIMC_JSONL_HPP
#define HALLUCIMC_JSONL_HPP

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "hallucimc/core.hpp"

namespace hallucimc {

nlohmann::json to_json(const QueryRecord& record);
QueryRecord query_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SimulationRecord& record);
SimulationRecord simulation_record_from_json(const nlohmann::json& j);

/// Loads a dataset of QueryRecords; every line must parse and validate.
std::vector<QueryRecord> load_dataset_jsonl(const std::filesystem::path& path);

/// Loads a store of SimulationRecords. Corrupt lines are skipped with a
/// warning on the given stream (stderr by default).
std::vector<SimulationRecord> load_store_jsonl(const std::filesystem::path& path,
                                               std::ostream* warnings = nullptr);

}  // namespace hallucimc

#endif
