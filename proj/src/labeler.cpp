// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/labeler.hpp"

#include "hallucimc/errors.hpp"

namespace hallucimc {

Rational hallucination_rate(std::span<const int> indicators) {
    if (indicators.empty()) throw ValidationError("hallucination_rate: empty indicator vector");
    std::int64_t sum = 0;
    for (int v : indicators) {
        if (v != 0 && v != 1) throw ValidationError("indicator values must be 0 or 1");
        sum += v;
    }
    return Rational{sum, static_cast<std::int64_t>(indicators.size())};
}

int binary_label(const Rational& p_h) {
    if (p_h.num > p_h.den) throw ValidationError("binary_label: p_h outside [0,1]");
    return p_h.num > 0 ? 1 : 0;
}

std::int64_t expected_class(const Rational& p_h, int n) {
    if (n < 0) throw ValidationError("expected_class: n must be >= 0");
    if (p_h.num > p_h.den) throw ValidationError("expected_class: p_h outside [0,1]");
    const std::int64_t raters = static_cast<std::int64_t>(n) + 1;
    if (!p_h.has_denominator(raters))
        throw ValidationError("expected_class: p_h " + p_h.str() +
                              " is not an exact multiple of 1/" + std::to_string(raters));
    return p_h.floor_mul(raters);
}

std::string class_rate_percent(std::int64_t class_label, int n) {
    const std::int64_t raters = static_cast<std::int64_t>(n) + 1;
    if (class_label < 0 || class_label > raters)
        throw ValidationError("class_rate_percent: class label out of range");
    // percent in tenths, rounded half-up
    const std::int64_t tenths = (2000 * class_label + raters) / (2 * raters);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

}  // namespace hallucimc
