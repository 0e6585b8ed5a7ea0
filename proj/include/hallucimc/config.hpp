// SPDX-License-Identifier: Apache-2.0
//
// Minimal sectioned config file: [section] headers, key = value lines,
// '#' comments. Flags always override file values.
#ifndef HALLUCIMC_CONFIG_HPP
#define HALLUCIMC_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>

#include "hallucimc/agents.hpp"
#include "hallucimc/classifier.hpp"
#include "hallucimc/matcher.hpp"

namespace hallucimc {

struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
};

ConfigFile parse_config_file(const std::filesystem::path& path);

/// Applies the [generation] / [matching] / [training] sections onto the
/// given defaults. Unknown keys are ignored.
void apply_generation_config(const ConfigFile& cfg, GenerationParams& params);
void apply_matching_config(const ConfigFile& cfg, MatchConfig& match);
void apply_training_config(const ConfigFile& cfg, TrainHyperparams& hp);

}  // namespace hallucimc

#endif
