// SPDX-License-Identifier: Apache-2.0
//
// Grades an agent output against ground truth: normalization, partial
// case-insensitive string similarity and choice-label matching.
#ifndef HALLUCIMC_MATCHER_HPP
#define HALLUCIMC_MATCHER_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hallucimc/core.hpp"

namespace hallucimc {

struct MatchConfig {
    int partial_ratio_threshold = 90;  // 0..100
    bool normalize_unicode = true;     // also strip common non-ASCII punctuation at token edges

    void validate() const;
};

/// Case-folds, trims, collapses internal whitespace and strips punctuation
/// surrounding each token. Non-ASCII bytes are preserved; with unicode_punct
/// a handful of common typographic marks (curly quotes, dashes, ellipsis) are
/// stripped at token edges as well.
std::string normalize(std::string_view text, bool unicode_punct = true);

/// Best partial alignment score in 0..100: the shorter string is slid over
/// every contiguous substring of the longer one and scored by edit distance,
/// 100 * (1 - d/|needle|), rounded to nearest. Both strings are expected to
/// be normalized already. Two empty strings score 100.
int partial_ratio(std::string_view needle, std::string_view haystack);

/// Indicator of hallucination: 0 when the output matches the ground truth
/// (fuzzy text match at the configured threshold, or the leading choice
/// letter equals choice_label for multiple choice), else 1.
int match_answer(std::string_view output,
                 std::string_view truth,
                 Scenario scenario,
                 const std::vector<std::string>* choices,
                 const std::string* choice_label,
                 const MatchConfig& cfg);

/// Pluggable grading interface. The default implementation is string-based;
/// semantic matchers (embedding similarity) can be swapped in behind it.
class Matcher {
public:
    virtual ~Matcher() = default;

    /// Returns the indicator for one agent output. Outputs whose status is
    /// not ok grade as 1 by convention; the status stays on the record so
    /// downstream analysis can exclude them.
    virtual int indicator(const AgentOutput& output, const QueryRecord& query) const = 0;
};

class StringMatcher final : public Matcher {
public:
    explicit StringMatcher(MatchConfig cfg = {});
    int indicator(const AgentOutput& output, const QueryRecord& query) const override;
    const MatchConfig& config() const { return cfg_; }

private:
    MatchConfig cfg_;
};

}  // namespace hallucimc

#endif
