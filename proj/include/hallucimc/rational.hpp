// SPDX-License-Identifier: Apache-2.0
#ifndef HALLUCIMC_RATIONAL_HPP
#define HALLUCIMC_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <string>

#include "hallucimc/errors.hpp"

namespace hallucimc {

/// Exact non-negative fraction. Keeps whatever numerator/denominator it was
/// built with (a rate of 2/6 stays 2/6), so the denominator still tells you
/// how many raters produced it. Comparisons are value-based.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den <= 0) throw ValidationError("rational denominator must be positive");
        if (num < 0) throw ValidationError("rational numerator must be non-negative");
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Rational reduced() const {
        const std::int64_t g = std::gcd(num, den);
        return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
    }

    /// floor(k * num / den) without going through floating point.
    std::int64_t floor_mul(std::int64_t k) const { return (k * num) / den; }

    /// True when k * this is an integer, i.e. this is representable as c/k.
    bool has_denominator(std::int64_t k) const { return (k * num) % den == 0; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num * b.den == b.num * a.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace hallucimc

#endif
