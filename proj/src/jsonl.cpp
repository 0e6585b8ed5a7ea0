// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/jsonl.hpp"

#include <fstream>
#include <iostream>

namespace hallucimc {

using nlohmann::json;

json to_json(const QueryRecord& r) {
    json j{
        {"id", r.id},
        {"scenario", scenario_tag(r.scenario)},
        {"text", r.text},
        {"ground_truth", r.ground_truth},
    };
    if (r.context.has_value()) j["context"] = *r.context;
    if (r.choices.has_value()) j["choices"] = *r.choices;
    if (r.choice_label.has_value()) j["choice_label"] = *r.choice_label;
    return j;
}

QueryRecord query_record_from_json(const json& j) {
    QueryRecord r;
    r.id = j.at("id").get<std::string>();
    const auto scenario = scenario_from_tag(j.at("scenario").get<std::string>());
    if (!scenario.has_value())
        throw ValidationError("record " + r.id + ": unknown scenario tag");
    r.scenario = *scenario;
    r.text = j.at("text").get<std::string>();
    r.ground_truth = j.at("ground_truth").get<std::string>();
    if (j.contains("context") && !j["context"].is_null())
        r.context = j["context"].get<std::string>();
    if (j.contains("choices") && !j["choices"].is_null())
        r.choices = j["choices"].get<std::vector<std::string>>();
    if (j.contains("choice_label") && !j["choice_label"].is_null())
        r.choice_label = j["choice_label"].get<std::string>();
    else
        r.derive_choice_label();
    r.validate();
    return r;
}

namespace {

json output_to_json(const AgentOutput& o) {
    return json{
        {"perturbation_index", o.perturbation_index},
        {"text", o.text},
        {"status", output_status_name(o.status)},
        {"raw_response_digest", o.raw_response_digest},
    };
}

AgentOutput output_from_json(const json& j) {
    AgentOutput o;
    o.perturbation_index = j.at("perturbation_index").get<int>();
    o.text = j.at("text").get<std::string>();
    const auto status = output_status_from_name(j.at("status").get<std::string>());
    if (!status.has_value()) throw ValidationError("unknown output status");
    o.status = *status;
    o.raw_response_digest = j.value("raw_response_digest", "");
    return o;
}

}  // namespace

json to_json(const SimulationRecord& r) {
    json j = to_json(r.query);
    j["variants"] = r.perturbations.variants;
    json outputs = json::array();
    for (const auto& o : r.outputs) outputs.push_back(output_to_json(o));
    j["outputs"] = std::move(outputs);
    j["indicators"] = r.indicators;
    j["p_h_num"] = r.p_h.num;
    j["p_h_den"] = r.p_h.den;
    j["binary_label"] = r.binary_label;
    j["class_label"] = r.class_label;
    j["outcome"] = outcome_name(r.outcome);
    j["failed_agents"] = r.failed_agents;
    j["sequence"] = r.sequence;
    return j;
}

SimulationRecord simulation_record_from_json(const json& j) {
    SimulationRecord r;
    r.query = query_record_from_json(j);
    r.perturbations.variants = j.at("variants").get<std::vector<std::string>>();
    r.perturbations.n = static_cast<int>(r.perturbations.variants.size()) - 1;
    r.perturbations.original = r.query;
    for (const auto& o : j.at("outputs")) r.outputs.push_back(output_from_json(o));
    r.indicators = j.at("indicators").get<std::vector<int>>();
    r.p_h = Rational(j.at("p_h_num").get<std::int64_t>(), j.at("p_h_den").get<std::int64_t>());
    r.binary_label = j.at("binary_label").get<int>();
    r.class_label = j.at("class_label").get<int>();
    const auto outcome = outcome_from_name(j.at("outcome").get<std::string>());
    if (!outcome.has_value()) throw ValidationError("unknown outcome name");
    r.outcome = *outcome;
    r.failed_agents = j.value("failed_agents", 0);
    r.sequence = j.value("sequence", std::uint64_t{0});
    r.validate();
    return r;
}

std::vector<QueryRecord> load_dataset_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset " + path.string());
    std::vector<QueryRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(query_record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<SimulationRecord> load_store_jsonl(const std::filesystem::path& path,
                                               std::ostream* warnings) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open store " + path.string());
    std::ostream& warn = warnings == nullptr ? std::cerr : *warnings;
    std::vector<SimulationRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(simulation_record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            warn << "warning: " << path.string() << ":" << line_no
                 << ": skipping corrupt record: " << e.what() << "\n";
        }
    }
    return records;
}

}  // namespace hallucimc
