// SPDX-License-Identifier: Apache-2.0
#ifndef HALLUCIMC_ERRORS_HPP
#define HALLUCIMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hallucimc {

/// Raised when a record or argument violates a documented invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a collection has the wrong number of elements.
class CardinalityError : public ValidationError {
public:
    explicit CardinalityError(const std::string& what) : ValidationError(what) {}
};

/// Raised when a model response cannot be decomposed into the expected items.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hallucimc

#endif
