// SPDX-License-Identifier: Apache-2.0
//
// Test-only brute-force reference implementations. These deliberately share
// no code with the library: plain loops, category tables built from scratch,
// exhaustive enumeration. Unit and acceptance suites compare the library
// against them.
#ifndef HALLUCIMC_TESTS_ORACLES_HPP
#define HALLUCIMC_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------- strings

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

/// Exhaustive partial ratio: minimum edit distance between the shorter string
/// and every contiguous substring of the longer one.
inline int partial_ratio(std::string needle, std::string haystack) {
    if (needle.size() > haystack.size()) std::swap(needle, haystack);
    if (needle.empty()) return 100;
    std::size_t best = needle.size();
    for (std::size_t start = 0; start <= haystack.size(); ++start)
        for (std::size_t len = 0; start + len <= haystack.size(); ++len)
            best = std::min(best, levenshtein(needle, haystack.substr(start, len)));
    return static_cast<int>(std::lround(
        100.0 * static_cast<double>(needle.size() - best) / static_cast<double>(needle.size())));
}

// ---------------------------------------------------------------- metrics
//
// rows: one answer string per rater per record; truths: per-record ground
// truth; ks: per-record allowed-state count.

inline double item_difficulty(const std::vector<std::vector<std::string>>& rows,
                              const std::vector<std::string>& truths) {
    double total = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double correct = 0;
        for (const auto& a : rows[j])
            if (a == truths[j]) correct += 1;
        total += correct / static_cast<double>(rows[j].size());
    }
    return total / static_cast<double>(rows.size());
}

inline double mean_certainty(const std::vector<std::vector<std::string>>& rows,
                             const std::vector<int>& ks) {
    double acc = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (ks[j] <= 1) {
            acc += 1.0;
            continue;
        }
        std::map<std::string, int> freq;
        for (const auto& a : rows[j]) freq[a] += 1;
        double inner = 0;
        for (const auto& [cat, f] : freq) {
            const double p = static_cast<double>(f) / static_cast<double>(rows[j].size());
            inner += p * std::log(p) / std::log(static_cast<double>(ks[j]));
        }
        acc += 1.0 + inner;
    }
    return acc / static_cast<double>(rows.size());
}

inline double gibbs_m2(const std::vector<std::vector<std::string>>& rows,
                       const std::vector<int>& ks) {
    double acc = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (ks[j] <= 1) {
            acc += 0.0;  // contributes certainty 1 after the reversal below
            continue;
        }
        std::map<std::string, int> freq;
        for (const auto& a : rows[j]) freq[a] += 1;
        double sum_sq = 0;
        for (const auto& [cat, f] : freq) {
            const double p = static_cast<double>(f) / static_cast<double>(rows[j].size());
            sum_sq += p * p;
        }
        const double k = static_cast<double>(ks[j]);
        acc += (k / (k - 1.0)) * (1.0 - sum_sq);
    }
    return 1.0 - acc / static_cast<double>(rows.size());
}

inline double fleiss_kappa(const std::vector<std::vector<std::string>>& rows) {
    const double m = static_cast<double>(rows.size());
    const double raters = static_cast<double>(rows.front().size());

    // category table over the union of observed answers
    std::vector<std::string> categories;
    for (const auto& row : rows)
        for (const auto& a : row)
            if (std::find(categories.begin(), categories.end(), a) == categories.end())
                categories.push_back(a);

    std::vector<std::vector<double>> f(rows.size(), std::vector<double>(categories.size(), 0.0));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (const auto& a : rows[j]) {
            const auto idx = static_cast<std::size_t>(
                std::find(categories.begin(), categories.end(), a) - categories.begin());
            f[j][idx] += 1.0;
        }

    double p_bar_o = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double sq = 0;
        for (double v : f[j]) sq += v * v;
        p_bar_o += (sq - raters) / ((raters - 1.0) * raters);
    }
    p_bar_o /= m;

    double p_bar_e = 0;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        double col = 0;
        for (std::size_t j = 0; j < rows.size(); ++j) col += f[j][i];
        const double share = col / (m * raters);
        p_bar_e += share * share;
    }
    if (p_bar_e >= 1.0) return 1.0;
    return (p_bar_o - p_bar_e) / (1.0 - p_bar_e);
}

inline double cronbach_alpha(const std::vector<std::vector<int>>& correctness) {
    const double m = static_cast<double>(correctness.size());
    const std::size_t raters = correctness.front().size();

    double sum_item_var = 0;
    for (const auto& row : correctness) {
        double mean = 0;
        for (int v : row) mean += v;
        mean /= static_cast<double>(raters);
        double var = 0;
        for (int v : row) var += (v - mean) * (v - mean);
        sum_item_var += var / static_cast<double>(raters);
    }

    std::vector<double> totals(raters, 0.0);
    for (const auto& row : correctness)
        for (std::size_t i = 0; i < raters; ++i) totals[i] += row[i];
    double mean_total = 0;
    for (double t : totals) mean_total += t;
    mean_total /= static_cast<double>(raters);
    double total_var = 0;
    for (double t : totals) total_var += (t - mean_total) * (t - mean_total);
    total_var /= static_cast<double>(raters);

    return m / (m - 1.0) * (1.0 - sum_item_var / total_var);
}

// ------------------------------------------------------------- thresholds

struct SweepResult {
    double tau = 0;
    double f1 = 0;
};

/// Exhaustive 0.001-grid F1 sweep with its own confusion-matrix counting.
inline SweepResult best_f1_threshold(const std::vector<double>& scores,
                                     const std::vector<int>& labels) {
    SweepResult best{0.0, -1.0};
    for (int i = 0; i <= 1000; ++i) {
        const double tau = i / 1000.0;
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t s = 0; s < scores.size(); ++s) {
            const int pred = scores[s] >= tau ? 1 : 0;
            tp += pred == 1 && labels[s] == 1;
            fp += pred == 1 && labels[s] == 0;
            fn += pred == 0 && labels[s] == 1;
        }
        const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 =
            precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        if (f1 > best.f1) best = {tau, f1};
    }
    return best;
}

// ------------------------------------------------------------ distributions

inline double binomial_pmf(int n, int k, double p) {
    double coeff = 1.0;
    for (int i = 0; i < k; ++i) coeff = coeff * (n - i) / (i + 1);
    return coeff * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace oracle

#endif
