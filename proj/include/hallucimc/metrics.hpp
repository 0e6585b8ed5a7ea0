// SPDX-License-Identifier: Apache-2.0
//
// Corpus-level accuracy, agreement and reliability statistics over sets of
// SimulationRecords.
#ifndef HALLUCIMC_METRICS_HPP
#define HALLUCIMC_METRICS_HPP

#include <span>
#include <string>
#include <vector>

#include "hallucimc/core.hpp"
#include "hallucimc/matcher.hpp"

namespace hallucimc {

/// One equivalence class of answers within a record: identical after
/// normalization.
struct AnswerGroup {
    std::string key;      // normalized answer text
    int count = 0;        // frequency f_{j,i}
    int first_index = 0;  // lowest perturbation index producing it
    int indicator = 0;    // correctness indicator shared by the class
};

/// Per-record answer distribution. state_count is k_j: the number of
/// provided choices for multiple choice, otherwise the number of distinct
/// normalized answers (never smaller than the observed group count).
struct AnswerMultiset {
    std::vector<AnswerGroup> groups;  // ordered by first appearance
    int state_count = 0;
    int rater_count = 0;
};

AnswerMultiset build_answer_multiset(const SimulationRecord& record, bool unicode_punct = true);

struct AccuracyBounds {
    double base = 0;   // A: original-query accuracy
    double lower = 0;  // Omega: all raters correct
    double upper = 0;  // O: at least one rater correct
    double mode = 0;   // Y-hat: plurality-vote accuracy
};

/// The four corpus accuracy statistics. Ties in the plurality vote resolve
/// to the class seen at the lowest perturbation index.
AccuracyBounds accuracy_bounds(std::span<const SimulationRecord> records);

/// Closed-form upper bound under uniform random guessing with k choices:
/// 1 - ((k-1)/k)^(n+1).
double random_guess_upper(int k, int n);

/// Mean per-query fraction of correct responses.
double item_difficulty(std::span<const SimulationRecord> records);

/// One minus the entropy of the per-record answer distribution normalized by
/// log(k_j), averaged over records. A single-state record contributes 1.
double mean_normalized_certainty(std::span<const AnswerMultiset> records);

/// Reversed multinomial-dispersion index: 1 at unanimity, 0 at a uniform
/// split over the k_j states. A single-state record contributes 1.
double gibbs_m2(std::span<const AnswerMultiset> records);

struct KappaResult {
    double value = 0;
    bool degenerate_agreement = false;  // every rater chose one global category
};

/// Fleiss' generalized kappa over the union of observed answer categories.
/// Needs >= 2 records sharing one rater count >= 2.
KappaResult fleiss_kappa(std::span<const AnswerMultiset> records);

struct AlphaResult {
    double raw = 0;                    // NaN when undefined
    double capped = 0;                 // reported value, never above 1
    bool zero_total_variance = false;  // per-rater totals all equal
    bool zero_item_variance = false;   // every record row constant
};

/// Cronbach's alpha over an m x (n+1) correctness matrix (1 = correct),
/// population variances throughout.
AlphaResult cronbach_alpha(const std::vector<std::vector<int>>& correctness);

/// The full metric bundle.
struct AgreementReport {
    double base_accuracy = 0;
    double mode_accuracy = 0;
    double lower_bound = 0;
    double upper_bound = 0;
    double item_difficulty = 0;
    double mean_certainty = 0;
    double gibbs_m2 = 0;
    double fleiss_kappa = 0;
    double cronbach_alpha = 0;      // capped report value
    double cronbach_alpha_raw = 0;  // uncapped, NaN when undefined
    bool kappa_degenerate = false;
    bool alpha_zero_total_variance = false;
    std::size_t m = 0;
    std::size_t n_plus_1 = 0;
};

/// Computes every metric over a corpus of completed records. All records
/// must share the same rater count. kappa is reported as 1 with the
/// degenerate flag when observed agreement leaves no chance variation;
/// alpha falls back to 1 when both variance terms vanish (fully unanimous
/// corpus) and is NaN when only the rater totals are constant.
AgreementReport build_report(std::span<const SimulationRecord> records,
                             const MatchConfig& cfg = {});

/// Fixed CSV schema for report rows; extensions append columns only.
std::string report_csv_header();
std::string report_csv_row(const AgreementReport& report);

}  // namespace hallucimc

#endif
