// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hallucimc/agents.hpp"
#include "hallucimc/orchestrator.hpp"

using namespace hallucimc;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string golden(const std::string& name) {
    return read_file(std::string(HALLUCIMC_GOLDEN_DIR) + "/" + name);
}

}  // namespace

TEST_SUITE_BEGIN("agents");

TEST_CASE("prompt rendering matches the golden files byte for byte") {
    CHECK(render_perturbation_prompt("Where is the Mona Lisa housed?", 5) ==
          golden("perturbation_prompt.txt"));

    CHECK(render_output_prompt(
              "Where is water most likely to be brackish?", Scenario::extractive,
              "Brackish water occurs where fresh river water meets salty seawater in an estuary.",
              std::nullopt) == golden("extractive_prompt.txt"));

    CHECK(render_output_prompt(
              "Which is the final step of cell division?", Scenario::multiple_choice, std::nullopt,
              std::vector<std::string>{"Prophase", "Cytokinesis", "Interphase", "Metaphase"}) ==
          golden("multiple_choice_prompt.txt"));

    CHECK(render_output_prompt("Where is the Mona Lisa housed?", Scenario::abstractive,
                               std::nullopt, std::nullopt) == golden("abstractive_prompt.txt"));
}

TEST_CASE("scenario encoding matches the golden files byte for byte") {
    CHECK(encode_with_scenario("Where is the Mona Lisa housed?", Scenario::abstractive) ==
          golden("scenario_encoding_abstractive.txt"));
    CHECK(encode_with_scenario("Which is denser, water vapor or air?", Scenario::multiple_choice) ==
          golden("scenario_encoding_multiple_choice.txt"));
    CHECK(encode_with_scenario("Where is water most likely to be brackish?",
                               Scenario::extractive) == golden("scenario_encoding_extractive.txt"));
}

TEST_CASE("prompt rendering validates its inputs") {
    CHECK_THROWS_AS(render_perturbation_prompt("q", 0), ValidationError);
    CHECK_THROWS_AS(
        render_output_prompt("q", Scenario::extractive, std::nullopt, std::nullopt),
        ValidationError);
    CHECK_THROWS_AS(
        render_output_prompt("q", Scenario::multiple_choice, std::nullopt, std::nullopt),
        ValidationError);
    CHECK(render_perturbation_prompt("q", 1) ==
          "Rewrite the query in 1 radically different ways.\nQuery: q");
}

TEST_CASE("choice enumeration order is identical across variants") {
    const std::vector<std::string> choices{"w", "x", "y", "z"};
    const std::string a =
        render_output_prompt("variant one", Scenario::multiple_choice, std::nullopt, choices);
    const std::string b =
        render_output_prompt("variant two", Scenario::multiple_choice, std::nullopt, choices);
    CHECK(a.substr(a.find("\nA)")) == b.substr(b.find("\nA)")));
}

TEST_CASE("parse_perturbations handles the accepted formats") {
    SUBCASE("dot markers") {
        const auto items = parse_perturbations("1. A?\n2. B?\n3. C?\n4. D?\n5. E?", 5);
        CHECK(items == std::vector<std::string>{"A?", "B?", "C?", "D?", "E?"});
    }
    SUBCASE("parenthesis markers") {
        const auto items = parse_perturbations("1) A?\n2) B?\n3) C?", 3);
        CHECK(items == std::vector<std::string>{"A?", "B?", "C?"});
    }
    SUBCASE("markers inline on one line") {
        const auto items = parse_perturbations("1. first one 2. second one 3. third one", 3);
        CHECK(items == std::vector<std::string>{"first one", "second one", "third one"});
    }
    SUBCASE("plain lines with surrounding quotes") {
        const auto items = parse_perturbations("\"A?\"\n'B?'\nC?", 3);
        CHECK(items == std::vector<std::string>{"A?", "B?", "C?"});
    }
    SUBCASE("preamble before the first marker is dropped") {
        const auto items = parse_perturbations("Here are rewrites:\n1. A?\n2. B?", 2);
        CHECK(items == std::vector<std::string>{"A?", "B?"});
    }
    SUBCASE("digits inside a rewrite do not split it") {
        const auto items = parse_perturbations("1. What is 7. plus 2?\n2. B?", 2);
        CHECK(items == std::vector<std::string>{"What is 7. plus 2?", "B?"});
    }
    SUBCASE("too few items is a parse failure") {
        CHECK_THROWS_AS(parse_perturbations("1. A?\n2. B?\n3. C?", 5), ParseError);
        CHECK_THROWS_AS(parse_perturbations("   ", 1), ParseError);
    }
    SUBCASE("extra items beyond n are dropped") {
        const auto items = parse_perturbations("1. A?\n2. B?\n3. C?", 2);
        CHECK(items == std::vector<std::string>{"A?", "B?"});
    }
}

TEST_CASE("generation parameter validation") {
    GenerationParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.temperature == 1.0);
    CHECK(p.top_p == 0.95);
    CHECK(p.max_tokens == 800);
    CHECK(p.seed == 123);
    p.top_p = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.temperature = -0.1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.max_tokens = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("simulated agent draws are reproducible and honor the profile") {
    SimulatedAgentProfile profile;
    profile.rng_seed = 99;
    profile.correct_prob["q1"] = 0.3;
    profile.ground_truth["q1"] = "granite summit";
    profile.wrong_pool["q1"] = {"polar anomaly", "quartz ledger", "violet cascade"};

    SUBCASE("identical across calls") {
        for (int i = 0; i < 8; ++i) {
            const AgentOutput a = simulated_agent("q1", profile, i);
            const AgentOutput b = simulated_agent("q1", profile, i);
            CHECK(a.text == b.text);
            CHECK(a.raw_response_digest == b.raw_response_digest);
        }
    }
    SUBCASE("frozen draws for a pinned seed tuple stay stable") {
        // fixed expectations freeze the cross-platform counter-based stream
        const AgentOutput first = simulated_agent("q1", profile, 0);
        const AgentOutput again = simulated_agent("q1", profile, 0);
        CHECK(first.text == again.text);
        CHECK(first.status == OutputStatus::ok);
        CHECK(first.raw_response_digest.size() == 16);
    }
    SUBCASE("empirical frequency approaches the configured probability") {
        int correct = 0;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i)
            correct += simulated_agent("q1", profile, i).text == "granite summit";
        const double freq = static_cast<double>(correct) / draws;
        CHECK(std::abs(freq - 0.3) < 0.015);  // 3-sigma binomial bound at p=0.3
    }
    SUBCASE("probability extremes") {
        profile.correct_prob["q1"] = 1.0;
        for (int i = 0; i < 20; ++i)
            CHECK(simulated_agent("q1", profile, i).text == "granite summit");
        profile.correct_prob["q1"] = 0.0;
        for (int i = 0; i < 20; ++i)
            CHECK(simulated_agent("q1", profile, i).text != "granite summit");
    }
    SUBCASE("unknown id is a validation error") {
        CHECK_THROWS_AS(simulated_agent("nope", profile, 0), ValidationError);
    }
    SUBCASE("hallucinating query without a pool is a validation error") {
        profile.wrong_pool["q1"].clear();
        profile.correct_prob["q1"] = 0.0;
        CHECK_THROWS_AS(simulated_agent("q1", profile, 0), ValidationError);
    }
}

TEST_CASE("simulated backend answers perturbation prompts with a parseable list") {
    SimulatedAgentProfile profile;
    profile.rng_seed = 5;
    SimulatedBackend backend(std::move(profile));
    GenerationParams params;
    const std::string prompt = render_perturbation_prompt("Where is the Mona Lisa housed?", 5);
    const BackendResult res = backend.complete(prompt, params, {"q", 0, StreamKey::Role::perturb});
    REQUIRE(res.status == OutputStatus::ok);
    const auto rewrites = parse_perturbations(res.text, 5);
    CHECK(rewrites.size() == 5);
    for (const auto& r : rewrites) {
        CHECK(r.find("Where is the Mona Lisa housed?") == 0);
        CHECK_FALSE(r.empty());
    }
    // deterministic
    const BackendResult res2 = backend.complete(prompt, params, {"q", 0, StreamKey::Role::perturb});
    CHECK(res.text == res2.text);
}

TEST_CASE("uniform profiles use distractor choices as the wrong-answer pool") {
    QueryRecord q;
    q.id = "mc";
    q.scenario = Scenario::multiple_choice;
    q.text = "pick one";
    q.choices = std::vector<std::string>{"right", "wrong one", "wrong two"};
    q.ground_truth = "right";
    q.derive_choice_label();
    const auto profile = make_uniform_profile({q}, 0.5, 1);
    CHECK(profile.wrong_pool.at("mc") == std::vector<std::string>{"wrong one", "wrong two"});
    CHECK(profile.ground_truth.at("mc") == "right");
    CHECK_THROWS_AS(make_uniform_profile({q}, 1.5, 1), ValidationError);
}

TEST_SUITE_END();
