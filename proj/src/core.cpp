// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/core.hpp"

#include <algorithm>

#include "hallucimc/labeler.hpp"

namespace hallucimc {

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string_view scenario_tag(Scenario s) {
    switch (s) {
        case Scenario::extractive: return "EXTRACTIVE";
        case Scenario::multiple_choice: return "MULTIPLE CHOICE";
        case Scenario::abstractive: return "ABSTRACTIVE";
    }
    return "ABSTRACTIVE";
}

std::optional<Scenario> scenario_from_tag(std::string_view tag) {
    if (tag == "EXTRACTIVE") return Scenario::extractive;
    if (tag == "MULTIPLE CHOICE") return Scenario::multiple_choice;
    if (tag == "ABSTRACTIVE") return Scenario::abstractive;
    return std::nullopt;
}

std::string choice_letter(std::size_t index) {
    std::string label;
    // A..Z, then AA, AB, ... for the (unlikely) >26-choice record.
    std::size_t i = index;
    do {
        label.insert(label.begin(), static_cast<char>('A' + i % 26));
        i = i / 26;
    } while (i-- > 0);
    return label;
}

void QueryRecord::validate() const {
    if (is_blank(text)) throw ValidationError("query " + id + ": text is empty");
    switch (scenario) {
        case Scenario::extractive:
            if (!context.has_value())
                throw ValidationError("query " + id + ": extractive record lacks context");
            break;
        case Scenario::multiple_choice: {
            if (!choices.has_value() || choices->size() < 2)
                throw ValidationError("query " + id + ": multiple-choice record needs >= 2 choices");
            const bool truth_listed =
                std::find(choices->begin(), choices->end(), ground_truth) != choices->end();
            if (!truth_listed)
                throw ValidationError("query " + id + ": ground truth is not one of the choices");
            break;
        }
        case Scenario::abstractive:
            if (context.has_value() || choices.has_value())
                throw ValidationError("query " + id + ": abstractive record must not carry context or choices");
            break;
    }
}

void QueryRecord::derive_choice_label() {
    if (!choices.has_value()) return;
    for (std::size_t i = 0; i < choices->size(); ++i) {
        if ((*choices)[i] == ground_truth) {
            choice_label = choice_letter(i);
            return;
        }
    }
}

PerturbationSet make_perturbation_set(QueryRecord original, std::vector<std::string> rewrites, int n) {
    if (n < 0) throw ValidationError("perturbation count n must be >= 0");
    if (static_cast<int>(rewrites.size()) != n)
        throw CardinalityError("expected exactly " + std::to_string(n) + " rewrites, got " +
                               std::to_string(rewrites.size()));
    for (const auto& r : rewrites)
        if (is_blank(r)) throw ValidationError("rewrite must not be empty");

    PerturbationSet set;
    set.n = n;
    set.variants.reserve(static_cast<std::size_t>(n) + 1);
    set.variants.push_back(original.text);
    for (auto& r : rewrites) set.variants.push_back(std::move(r));
    set.original = std::move(original);
    return set;
}

std::string_view output_status_name(OutputStatus s) {
    switch (s) {
        case OutputStatus::ok: return "ok";
        case OutputStatus::api_error: return "api_error";
        case OutputStatus::content_filtered: return "content_filtered";
        case OutputStatus::parse_failure: return "parse_failure";
    }
    return "ok";
}

std::optional<OutputStatus> output_status_from_name(std::string_view name) {
    if (name == "ok") return OutputStatus::ok;
    if (name == "api_error") return OutputStatus::api_error;
    if (name == "content_filtered") return OutputStatus::content_filtered;
    if (name == "parse_failure") return OutputStatus::parse_failure;
    return std::nullopt;
}

void AgentOutput::validate() const {
    if (status == OutputStatus::ok && text.empty())
        throw ValidationError("ok output must carry text");
    if (status != OutputStatus::ok && !text.empty())
        throw ValidationError("failed output must carry empty text");
}

std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::consensus: return "consensus";
        case Outcome::dissent: return "dissent";
        case Outcome::corrective: return "corrective";
        case Outcome::erroneous: return "erroneous";
    }
    return "consensus";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
    if (name == "consensus") return Outcome::consensus;
    if (name == "dissent") return Outcome::dissent;
    if (name == "corrective") return Outcome::corrective;
    if (name == "erroneous") return Outcome::erroneous;
    return std::nullopt;
}

Outcome classify_outcome(std::span<const int> indicators) {
    if (indicators.empty()) throw ValidationError("classify_outcome: empty indicator vector");
    std::size_t correct = 0;
    for (int v : indicators) {
        if (v != 0 && v != 1) throw ValidationError("indicator values must be 0 or 1");
        if (v == 0) ++correct;
    }
    const bool original_correct = indicators[0] == 0;
    const bool majority_correct = 2 * correct > indicators.size();
    if (original_correct) return majority_correct ? Outcome::consensus : Outcome::dissent;
    return majority_correct ? Outcome::corrective : Outcome::erroneous;
}

void SimulationRecord::validate() const {
    query.validate();
    const std::size_t raters = perturbations.variants.size();
    if (raters != static_cast<std::size_t>(perturbations.n) + 1)
        throw CardinalityError("record " + query.id + ": variant list must have n+1 entries");
    if (outputs.size() != raters || indicators.size() != raters)
        throw CardinalityError("record " + query.id + ": outputs/indicators must have n+1 entries");
    std::int64_t sum = 0;
    for (int v : indicators) {
        if (v != 0 && v != 1) throw ValidationError("indicator values must be 0 or 1");
        sum += v;
    }
    if (p_h != Rational(sum, static_cast<std::int64_t>(raters)))
        throw ValidationError("record " + query.id + ": p_h does not equal sum(indicators)/(n+1)");
    if (binary_label != (sum > 0 ? 1 : 0))
        throw ValidationError("record " + query.id + ": binary label inconsistent with p_h");
    if (class_label != sum)
        throw ValidationError("record " + query.id + ": class label inconsistent with indicators");
}

SimulationRecord make_simulation_record(QueryRecord query,
                                        PerturbationSet perturbations,
                                        std::vector<AgentOutput> outputs,
                                        std::vector<int> indicators) {
    SimulationRecord rec;
    rec.p_h = hallucination_rate(indicators);
    rec.binary_label = binary_label(rec.p_h);
    rec.class_label = static_cast<int>(expected_class(rec.p_h, perturbations.n));
    rec.outcome = classify_outcome(indicators);
    rec.failed_agents = 0;
    for (const auto& out : outputs)
        if (out.status != OutputStatus::ok) ++rec.failed_agents;
    rec.query = std::move(query);
    rec.perturbations = std::move(perturbations);
    rec.outputs = std::move(outputs);
    rec.indicators = std::move(indicators);
    rec.validate();
    return rec;
}

}  // namespace hallucimc
