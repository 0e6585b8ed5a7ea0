// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <vector>

#include "hallucimc/labeler.hpp"

using namespace hallucimc;

TEST_SUITE_BEGIN("labeler");

TEST_CASE("hallucination_rate is the exact indicator fraction") {
    CHECK(hallucination_rate(std::vector<int>{0, 0, 0, 0, 0, 0}) == Rational{0, 6});
    CHECK(hallucination_rate(std::vector<int>{1, 1, 0, 0, 0, 0}) == Rational{1, 3});
    CHECK(hallucination_rate(std::vector<int>{1, 1, 1, 1, 1, 1}) == Rational{1, 1});
    CHECK_THROWS_AS(hallucination_rate(std::vector<int>{}), ValidationError);
    CHECK_THROWS_AS(hallucination_rate(std::vector<int>{2}), ValidationError);
}

TEST_CASE("binary label is the piecewise indicator of any hallucination") {
    CHECK(binary_label(Rational{0, 6}) == 0);
    CHECK(binary_label(Rational{1, 6}) == 1);
    CHECK(binary_label(Rational{6, 6}) == 1);
    CHECK_THROWS_AS(binary_label(Rational{7, 6}), ValidationError);
}

TEST_CASE("expected_class recovers the hallucination count exhaustively") {
    for (int c = 0; c <= 6; ++c) {
        const Rational p{c, 6};
        CHECK(expected_class(p, 5) == c);
        CHECK(binary_label(p) == (c > 0 ? 1 : 0));
    }
    SUBCASE("known class mappings") {
        CHECK(expected_class(Rational{2, 6}, 5) == 2);
        CHECK(expected_class(Rational{0, 6}, 5) == 0);
        CHECK(expected_class(Rational{1, 1}, 5) == 6);
    }
    SUBCASE("reduced forms with a compatible denominator still work") {
        CHECK(expected_class(Rational{1, 3}, 5) == 2);
        CHECK(expected_class(Rational{1, 2}, 5) == 3);
    }
    SUBCASE("denominator mismatch is rejected") {
        CHECK_THROWS_AS(expected_class(Rational{1, 5}, 5), ValidationError);
        CHECK_THROWS_AS(expected_class(Rational{1, 7}, 5), ValidationError);
    }
}

TEST_CASE("class rates render with one half-up decimal") {
    CHECK(class_rate_percent(0, 5) == "0.0");
    CHECK(class_rate_percent(1, 5) == "16.7");
    CHECK(class_rate_percent(2, 5) == "33.3");
    CHECK(class_rate_percent(3, 5) == "50.0");
    CHECK(class_rate_percent(4, 5) == "66.7");
    CHECK(class_rate_percent(5, 5) == "83.3");
    CHECK(class_rate_percent(6, 5) == "100.0");
    CHECK_THROWS_AS(class_rate_percent(7, 5), ValidationError);
}

TEST_CASE("class increments are 1/(n+1) of probability mass") {
    for (int c = 0; c < 6; ++c) {
        const double step = Rational{c + 1, 6}.value() - Rational{c, 6}.value();
        CHECK(step == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
}

TEST_SUITE_END();
