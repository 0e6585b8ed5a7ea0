// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/agents.hpp"

#include <cctype>
#include <iterator>
#include <sstream>

#include "hallucimc/hash.hpp"

namespace hallucimc {

void GenerationParams::validate() const {
    if (temperature < 0) throw ValidationError("temperature must be >= 0");
    if (top_p <= 0 || top_p > 1) throw ValidationError("top_p must lie in (0,1]");
    if (max_tokens < 1) throw ValidationError("max_tokens must be >= 1");
}

std::string render_perturbation_prompt(std::string_view q0, int n) {
    if (n < 1) throw ValidationError("perturbation prompt needs n >= 1");
    std::string prompt = "Rewrite the query in " + std::to_string(n) + " radically different ways.";
    prompt += "\nQuery: ";
    prompt += q0;
    return prompt;
}

std::string render_output_prompt(std::string_view query,
                                 Scenario scenario,
                                 const std::optional<std::string>& context,
                                 const std::optional<std::vector<std::string>>& choices) {
    std::string prompt = "You will answer the user's query.";
    switch (scenario) {
        case Scenario::extractive:
            if (!context.has_value())
                throw ValidationError("extractive prompt needs context");
            prompt += "\nContext: " + *context;
            prompt += "\nQuery: ";
            prompt += query;
            prompt += "\nAnswer:";
            break;
        case Scenario::multiple_choice: {
            if (!choices.has_value() || choices->empty())
                throw ValidationError("multiple-choice prompt needs choices");
            prompt += "\nQuery: ";
            prompt += query;
            for (std::size_t i = 0; i < choices->size(); ++i)
                prompt += "\n" + choice_letter(i) + ") " + (*choices)[i];
            prompt += "\nAnswer:";
            break;
        }
        case Scenario::abstractive:
            prompt += "\nQuery: ";
            prompt += query;
            prompt += "\nShort Answer:";
            break;
    }
    return prompt;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string strip_quotes(std::string s) {
    static constexpr std::pair<std::string_view, std::string_view> pairs[] = {
        {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}};
    for (const auto& [open, close] : pairs) {
        if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
            return trim(s.substr(open.size(), s.size() - open.size() - close.size()));
        }
    }
    return s;
}

struct Marker {
    std::size_t start;       // where the digits begin
    std::size_t item_start;  // first character after the marker
    int number;
};

// Candidate list markers: a digit run at the start of the string or right
// after whitespace, followed by '.' or ')'.
std::vector<Marker> find_markers(const std::string& raw) {
    std::vector<Marker> found;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(raw[i]))) continue;
        if (i > 0 && !std::isspace(static_cast<unsigned char>(raw[i - 1]))) continue;
        std::size_t j = i;
        while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
        // list ordinals are short; longer digit runs are content, not markers
        if (j - i > 6 || j >= raw.size() || (raw[j] != '.' && raw[j] != ')')) {
            i = j;
            continue;
        }
        std::size_t item_start = j + 1;
        while (item_start < raw.size() && raw[item_start] == ' ') ++item_start;
        found.push_back({i, item_start, std::stoi(raw.substr(i, j - i))});
        i = j;
    }
    return found;
}

}  // namespace

std::vector<std::string> parse_perturbations(const std::string& raw, int n) {
    if (n < 1) throw ValidationError("parse_perturbations: n must be >= 1");
    if (trim(raw).empty()) throw ParseError("empty perturbator response");

    std::vector<std::string> items;

    // Accept markers forming the ordinal sequence 1, 2, 3, ... so digits
    // inside a rewrite do not split it.
    std::vector<Marker> accepted;
    int expected = 1;
    for (const Marker& m : find_markers(raw)) {
        if (m.number == expected) {
            accepted.push_back(m);
            ++expected;
        }
    }

    if (!accepted.empty()) {
        for (std::size_t k = 0; k < accepted.size(); ++k) {
            const std::size_t end = k + 1 < accepted.size() ? accepted[k + 1].start : raw.size();
            std::string item = strip_quotes(trim(
                std::string_view(raw).substr(accepted[k].item_start, end - accepted[k].item_start)));
            if (!item.empty()) items.push_back(std::move(item));
        }
    } else {
        std::istringstream lines(raw);
        std::string line;
        while (std::getline(lines, line)) {
            std::string item = strip_quotes(trim(line));
            if (!item.empty()) items.push_back(std::move(item));
        }
    }

    if (static_cast<int>(items.size()) < n)
        throw ParseError("expected " + std::to_string(n) + " rewrites, parsed " +
                         std::to_string(items.size()));
    items.resize(static_cast<std::size_t>(n));
    return items;
}

namespace {

constexpr std::uint64_t kDecisionSalt = 0x6a09e667f3bcc909ULL;
constexpr std::uint64_t kPoolSalt = 0xbb67ae8584caa73bULL;

std::uint64_t stream_state(std::uint64_t seed, const std::string& id, int index) {
    const std::uint64_t base = splitmix64(seed ^ fnv1a64(id));
    return splitmix64(base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1));
}

}  // namespace

AgentOutput simulated_agent(const std::string& query_id,
                            const SimulatedAgentProfile& profile,
                            int stream_index) {
    const auto prob_it = profile.correct_prob.find(query_id);
    const auto truth_it = profile.ground_truth.find(query_id);
    if (prob_it == profile.correct_prob.end() || truth_it == profile.ground_truth.end())
        throw ValidationError("simulated profile does not cover query id " + query_id);
    const double p = prob_it->second;
    if (p < 0 || p > 1) throw ValidationError("correct probability must lie in [0,1]");

    const std::uint64_t state = stream_state(profile.rng_seed, query_id, stream_index);

    AgentOutput out;
    out.perturbation_index = stream_index;
    out.status = OutputStatus::ok;
    out.raw_response_digest = hex64(state);

    if (uniform01(splitmix64(state ^ kDecisionSalt)) < p) {
        out.text = truth_it->second;
        return out;
    }
    const auto pool_it = profile.wrong_pool.find(query_id);
    if (pool_it == profile.wrong_pool.end() || pool_it->second.empty())
        throw ValidationError("query " + query_id + " can hallucinate but has no wrong-answer pool");
    const std::uint64_t pick = splitmix64(state ^ kPoolSalt);
    out.text = pool_it->second[pick % pool_it->second.size()];
    return out;
}

SimulatedAgentProfile make_uniform_profile(const std::vector<QueryRecord>& records,
                                           double correct_prob,
                                           std::uint64_t rng_seed,
                                           int pool_size) {
    if (correct_prob < 0 || correct_prob > 1)
        throw ValidationError("correct probability must lie in [0,1]");
    if (pool_size < 1) throw ValidationError("pool_size must be >= 1");
    SimulatedAgentProfile profile;
    profile.rng_seed = rng_seed;
    static const char* kFillers[] = {"polar anomaly", "quartz ledger", "violet cascade",
                                     "ember lattice", "drifting monolith", "saffron orbit"};
    for (const auto& rec : records) {
        profile.correct_prob[rec.id] = correct_prob;
        profile.ground_truth[rec.id] = rec.ground_truth;
        std::vector<std::string> pool;
        if (rec.choices.has_value()) {
            for (const auto& c : *rec.choices)
                if (c != rec.ground_truth) pool.push_back(c);
        }
        if (pool.empty() && correct_prob < 1.0) {
            for (int i = 0; i < pool_size; ++i)
                pool.push_back(kFillers[i % std::size(kFillers)] + std::string(" ") +
                               std::to_string(i + 1));
        }
        profile.wrong_pool[rec.id] = std::move(pool);
    }
    return profile;
}

SimulatedBackend::SimulatedBackend(SimulatedAgentProfile profile) : profile_(std::move(profile)) {}

BackendResult SimulatedBackend::complete(const std::string& prompt,
                                         const GenerationParams& params,
                                         const StreamKey& key) {
    params.validate();
    if (key.role == StreamKey::Role::perturb) {
        // Behave like the perturbator: answer the rendered prompt with a
        // numbered list of n deterministic rewrites.
        int n = 0;
        for (std::size_t i = 0; i < prompt.size(); ++i) {
            if (std::isdigit(static_cast<unsigned char>(prompt[i]))) {
                n = std::stoi(prompt.substr(i));
                break;
            }
        }
        if (n < 1) return {OutputStatus::parse_failure, "", hex64(fnv1a64(prompt))};
        const std::size_t at = prompt.find("Query: ");
        const std::string q0 = at == std::string::npos ? prompt : prompt.substr(at + 7);
        std::string body;
        for (int i = 1; i <= n; ++i) {
            body += std::to_string(i) + ". " + q0 + " (rephrased variant " + std::to_string(i) + ")";
            if (i < n) body += "\n";
        }
        return {OutputStatus::ok, body, hex64(fnv1a64(body))};
    }
    const AgentOutput out = simulated_agent(key.query_id, profile_, key.index);
    return {out.status, out.text, out.raw_response_digest};
}

}  // namespace hallucimc
