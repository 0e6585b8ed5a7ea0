// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "hallucimc/matcher.hpp"
#include "oracles.hpp"

using namespace hallucimc;

TEST_SUITE_BEGIN("matcher");

TEST_CASE("normalize: fold, trim, collapse, strip token punctuation") {
    CHECK(normalize("  The LOUVRE. ") == "the louvre");
    CHECK(normalize("") == "");
    CHECK(normalize("NH₂⁻") == "nh₂⁻");  // non-ASCII preserved, case folded
    CHECK(normalize("a   b\t c") == "a b c");
    CHECK(normalize("\"quoted\" (words)") == "quoted words");
    CHECK(normalize("...") == "");
    // typographic punctuation goes with unicode handling on, stays otherwise
    CHECK(normalize("“the won”") == "the won");
    CHECK(normalize("“the won”", false) == "“the won”");
}

TEST_CASE("partial_ratio basics") {
    CHECK(partial_ratio("the louvre", "the louvre") == 100);
    CHECK(partial_ratio("", "") == 100);
    CHECK(partial_ratio("cytokinesis", "the final step is cytokinesis") == 100);
    CHECK(partial_ratio("cytokinesis", "the final step is cytokinesis") ==
          oracle::partial_ratio("cytokinesis", "the final step is cytokinesis"));

    const int air = partial_ratio(normalize("air"), normalize("water vapor"));
    CHECK(air == oracle::partial_ratio("air", "water vapor"));
    CHECK(air < 90);
}

TEST_CASE("partial_ratio equals the exhaustive-substring oracle on random strings") {
    std::mt19937_64 rng(21);
    const std::string alphabet = "abcde ";
    auto random_string = [&](std::size_t max_len) {
        std::string s;
        const std::size_t len = rng() % (max_len + 1);
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        return s;
    };
    for (int trial = 0; trial < 300; ++trial) {
        const std::string a = random_string(10);
        const std::string b = random_string(18);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(partial_ratio(a, b) == oracle::partial_ratio(a, b));
    }
}

TEST_CASE("substring of the haystack always scores 100") {
    std::mt19937_64 rng(22);
    const std::string alphabet = "xyzw";
    for (int trial = 0; trial < 100; ++trial) {
        std::string hay;
        for (int i = 0; i < 12; ++i) hay.push_back(alphabet[rng() % alphabet.size()]);
        const std::size_t start = rng() % hay.size();
        const std::size_t len = 1 + rng() % (hay.size() - start);
        CHECK(partial_ratio(hay.substr(start, len), hay) == 100);
    }
}

TEST_CASE("match_answer grades outputs against the truth") {
    const MatchConfig cfg;
    SUBCASE("exact match") {
        CHECK(match_answer("The Louvre", "The Louvre", Scenario::abstractive, nullptr, nullptr,
                           cfg) == 0);
    }
    SUBCASE("choice-label path") {
        const std::vector<std::string> choices{"Prophase", "Cytokinesis", "Interphase"};
        const std::string label = "B";
        CHECK(match_answer("B) Cytokinesis", "Cytokinesis", Scenario::multiple_choice, &choices,
                           &label, cfg) == 0);
        CHECK(match_answer("b. something else", "Cytokinesis", Scenario::multiple_choice, &choices,
                           &label, cfg) == 0);
        CHECK(match_answer("B", "Cytokinesis", Scenario::multiple_choice, &choices, &label, cfg) ==
              0);
        // a leading letter that merely starts a word is not a label
        CHECK(match_answer("Because of mitosis", "Cytokinesis", Scenario::multiple_choice, &choices,
                           &label, cfg) == 1);
        // wrong letter
        CHECK(match_answer("A) Prophase", "Cytokinesis", Scenario::multiple_choice, &choices,
                           &label, cfg) == 1);
    }
    SUBCASE("mismatch") {
        CHECK(match_answer("Paris is the capital", "The Louvre", Scenario::abstractive, nullptr,
                           nullptr, cfg) == 1);
    }
    SUBCASE("empty output never matches a non-empty truth") {
        CHECK(match_answer("", "The Louvre", Scenario::abstractive, nullptr, nullptr, cfg) == 1);
    }
    SUBCASE("missing choices for multiple choice is an error") {
        CHECK_THROWS_AS(
            match_answer("B", "x", Scenario::multiple_choice, nullptr, nullptr, cfg),
            ValidationError);
    }
}

TEST_CASE("case flips never change the indicator") {
    std::mt19937_64 rng(23);
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"The Louvre", "the louvre museum"},
        {"Cytokinesis", "the last phase"},
        {"Estuary", "an ESTUARY along the coast"},
        {"carbon dioxide", "Carbon Dioxide"},
    };
    const MatchConfig cfg;
    for (const auto& [truth, output] : pairs) {
        auto flip = [&](const std::string& s) {
            std::string f = s;
            for (char& c : f) {
                if (rng() % 2 == 0) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
            return f;
        };
        const int base = match_answer(output, truth, Scenario::abstractive, nullptr, nullptr, cfg);
        for (int trial = 0; trial < 10; ++trial) {
            CHECK(match_answer(flip(output), flip(truth), Scenario::abstractive, nullptr, nullptr,
                               cfg) == base);
        }
    }
}

TEST_CASE("raising the threshold never flips an indicator from 1 to 0") {
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"The Louvre", "the louvre"},   {"The Louvre", "the luvre"},
        {"The Louvre", "paris"},        {"Estuary", "estuaries"},
        {"carbon dioxide", "oxygen"},
    };
    for (const auto& [truth, output] : pairs) {
        int previous = 0;
        for (int threshold = 0; threshold <= 100; ++threshold) {
            MatchConfig cfg;
            cfg.partial_ratio_threshold = threshold;
            const int ind =
                match_answer(output, truth, Scenario::abstractive, nullptr, nullptr, cfg);
            CHECK(ind >= previous);  // indicator only moves 0 -> 1 as threshold rises
            previous = ind;
        }
    }
}

TEST_CASE("failed outputs grade as hallucination through the matcher interface") {
    QueryRecord q;
    q.id = "q";
    q.text = "t";
    q.ground_truth = "y";
    q.scenario = Scenario::abstractive;
    AgentOutput out;
    out.perturbation_index = 0;
    out.status = OutputStatus::api_error;
    const StringMatcher matcher;
    CHECK(matcher.indicator(out, q) == 1);
}

TEST_CASE("match config validation") {
    MatchConfig cfg;
    cfg.partial_ratio_threshold = 101;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_SUITE_END();
