// SPDX-License-Identifier: Apache-2.0
//
// Indicator vectors -> empirical hallucination rate, binary label and
// expected-value class label.
#ifndef HALLUCIMC_LABELER_HPP
#define HALLUCIMC_LABELER_HPP

#include <cstdint>
#include <span>
#include <string>

#include "hallucimc/rational.hpp"

namespace hallucimc {

/// Exact rate sum(indicators) / (n+1). Throws on an empty vector.
Rational hallucination_rate(std::span<const int> indicators);

/// 1 iff the query produced any hallucination (p_h > 0).
int binary_label(const Rational& p_h);

/// floor((n+1) * p_h). Requires p_h to be representable with denominator n+1.
std::int64_t expected_class(const Rational& p_h, int n);

/// Class label rendered as a percent rate with one decimal, half-up:
/// n=5 yields 0.0, 16.7, 33.3, 50.0, 66.7, 83.3, 100.0.
std::string class_rate_percent(std::int64_t class_label, int n);

}  // namespace hallucimc

#endif
