// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace hallucimc {

namespace {

void require_nonempty(std::size_t m, const char* op) {
    if (m == 0) throw ValidationError(std::string(op) + ": empty corpus");
}

std::size_t common_rater_count(std::span<const SimulationRecord> records) {
    const std::size_t raters = records.front().indicators.size();
    for (const auto& r : records)
        if (r.indicators.size() != raters)
            throw ValidationError("corpus mixes different rater counts");
    return raters;
}

}  // namespace

AnswerMultiset build_answer_multiset(const SimulationRecord& record, bool unicode_punct) {
    AnswerMultiset ms;
    ms.rater_count = static_cast<int>(record.outputs.size());
    for (std::size_t i = 0; i < record.outputs.size(); ++i) {
        const std::string key = normalize(record.outputs[i].text, unicode_punct);
        auto it = std::find_if(ms.groups.begin(), ms.groups.end(),
                               [&](const AnswerGroup& g) { return g.key == key; });
        if (it == ms.groups.end()) {
            ms.groups.push_back({key, 1, static_cast<int>(i), record.indicators[i]});
        } else {
            ++it->count;
        }
    }
    int states = static_cast<int>(ms.groups.size());
    if (record.query.scenario == Scenario::multiple_choice && record.query.choices.has_value())
        states = std::max(states, static_cast<int>(record.query.choices->size()));
    ms.state_count = states;
    return ms;
}

AccuracyBounds accuracy_bounds(std::span<const SimulationRecord> records) {
    require_nonempty(records.size(), "accuracy_bounds");
    common_rater_count(records);
    AccuracyBounds b;
    for (const auto& rec : records) {
        const auto& ind = rec.indicators;
        b.base += ind[0] == 0 ? 1.0 : 0.0;
        b.lower += std::all_of(ind.begin(), ind.end(), [](int v) { return v == 0; }) ? 1.0 : 0.0;
        b.upper += std::any_of(ind.begin(), ind.end(), [](int v) { return v == 0; }) ? 1.0 : 0.0;

        const AnswerMultiset ms = build_answer_multiset(rec);
        const AnswerGroup* best = &ms.groups.front();
        for (const auto& g : ms.groups)
            if (g.count > best->count) best = &g;  // ties keep the earliest class
        b.mode += best->indicator == 0 ? 1.0 : 0.0;
    }
    const double m = static_cast<double>(records.size());
    b.base /= m;
    b.lower /= m;
    b.upper /= m;
    b.mode /= m;
    return b;
}

double random_guess_upper(int k, int n) {
    if (k < 2) throw ValidationError("random_guess_upper: k must be >= 2");
    if (n < 0) throw ValidationError("random_guess_upper: n must be >= 0");
    return 1.0 - std::pow((static_cast<double>(k) - 1.0) / static_cast<double>(k), n + 1);
}

double item_difficulty(std::span<const SimulationRecord> records) {
    require_nonempty(records.size(), "item_difficulty");
    double sum = 0;
    for (const auto& rec : records) {
        double correct = 0;
        for (int v : rec.indicators) correct += v == 0 ? 1.0 : 0.0;
        sum += correct / static_cast<double>(rec.indicators.size());
    }
    return sum / static_cast<double>(records.size());
}

namespace {

double record_certainty(const AnswerMultiset& ms) {
    if (ms.state_count <= 1) return 1.0;
    const double raters = static_cast<double>(ms.rater_count);
    double entropy_term = 0;
    for (const auto& g : ms.groups) {
        const double p = static_cast<double>(g.count) / raters;
        entropy_term += p * std::log(p);
    }
    return 1.0 + entropy_term / std::log(static_cast<double>(ms.state_count));
}

double record_m2(const AnswerMultiset& ms) {
    if (ms.state_count <= 1) return 1.0;
    const double raters = static_cast<double>(ms.rater_count);
    double sum_sq = 0;
    for (const auto& g : ms.groups) {
        const double p = static_cast<double>(g.count) / raters;
        sum_sq += p * p;
    }
    const double k = static_cast<double>(ms.state_count);
    return 1.0 - (k / (k - 1.0)) * (1.0 - sum_sq);
}

}  // namespace

double mean_normalized_certainty(std::span<const AnswerMultiset> records) {
    require_nonempty(records.size(), "mean_normalized_certainty");
    double sum = 0;
    for (const auto& ms : records) sum += record_certainty(ms);
    return sum / static_cast<double>(records.size());
}

double gibbs_m2(std::span<const AnswerMultiset> records) {
    require_nonempty(records.size(), "gibbs_m2");
    double sum = 0;
    for (const auto& ms : records) sum += record_m2(ms);
    return sum / static_cast<double>(records.size());
}

KappaResult fleiss_kappa(std::span<const AnswerMultiset> records) {
    if (records.size() < 2) throw ValidationError("fleiss_kappa: needs at least 2 records");
    const int raters = records.front().rater_count;
    if (raters < 2) throw ValidationError("fleiss_kappa: needs at least 2 raters");
    for (const auto& ms : records)
        if (ms.rater_count != raters)
            throw ValidationError("fleiss_kappa: records mix rater counts");

    const double m = static_cast<double>(records.size());
    const double n_plus_1 = static_cast<double>(raters);
    const double n = n_plus_1 - 1.0;

    // global category totals over the union of observed classes
    std::map<std::string, double> totals;
    double p_bar_o = 0;
    for (const auto& ms : records) {
        double sq = 0;
        for (const auto& g : ms.groups) {
            totals[g.key] += g.count;
            sq += static_cast<double>(g.count) * static_cast<double>(g.count);
        }
        p_bar_o += (sq - n_plus_1) / (n * n_plus_1);
    }
    p_bar_o /= m;

    double p_bar_e = 0;
    for (const auto& [key, total] : totals) {
        const double share = total / (m * n_plus_1);
        p_bar_e += share * share;
    }

    if (p_bar_e >= 1.0) return {1.0, true};  // one category everywhere: chance correction vanishes
    return {(p_bar_o - p_bar_e) / (1.0 - p_bar_e), false};
}

namespace {

double population_variance(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / n;
}

}  // namespace

AlphaResult cronbach_alpha(const std::vector<std::vector<int>>& correctness) {
    if (correctness.size() < 2) throw ValidationError("cronbach_alpha: needs at least 2 samples");
    const std::size_t raters = correctness.front().size();
    if (raters < 2) throw ValidationError("cronbach_alpha: needs at least 2 raters");
    for (const auto& row : correctness)
        if (row.size() != raters) throw ValidationError("cronbach_alpha: ragged matrix");

    const double m = static_cast<double>(correctness.size());
    double sum_item_var = 0;
    std::vector<double> rater_totals(raters, 0.0);
    std::vector<double> row(raters);
    for (const auto& r : correctness) {
        for (std::size_t i = 0; i < raters; ++i) {
            row[i] = static_cast<double>(r[i]);
            rater_totals[i] += row[i];
        }
        sum_item_var += population_variance(row);
    }
    const double total_var = population_variance(rater_totals);

    AlphaResult res;
    res.zero_item_variance = sum_item_var == 0.0;
    res.zero_total_variance = total_var == 0.0;
    if (res.zero_item_variance) {
        // perfectly consistent rows: the ratio term is 0 without any division
        res.raw = m / (m - 1.0);
        res.capped = 1.0;
        return res;
    }
    if (res.zero_total_variance) {
        res.raw = std::numeric_limits<double>::quiet_NaN();
        res.capped = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    res.raw = m / (m - 1.0) * (1.0 - sum_item_var / total_var);
    res.capped = std::min(res.raw, 1.0);
    return res;
}

AgreementReport build_report(std::span<const SimulationRecord> records, const MatchConfig& cfg) {
    require_nonempty(records.size(), "build_report");
    const std::size_t raters = common_rater_count(records);

    AgreementReport rep;
    rep.m = records.size();
    rep.n_plus_1 = raters;

    const AccuracyBounds bounds = accuracy_bounds(records);
    rep.base_accuracy = bounds.base;
    rep.mode_accuracy = bounds.mode;
    rep.lower_bound = bounds.lower;
    rep.upper_bound = bounds.upper;
    rep.item_difficulty = item_difficulty(records);

    std::vector<AnswerMultiset> multisets;
    multisets.reserve(records.size());
    for (const auto& rec : records) multisets.push_back(build_answer_multiset(rec, cfg.normalize_unicode));
    rep.mean_certainty = mean_normalized_certainty(multisets);
    rep.gibbs_m2 = gibbs_m2(multisets);

    if (records.size() >= 2 && raters >= 2) {
        const KappaResult kappa = fleiss_kappa(multisets);
        rep.fleiss_kappa = kappa.value;
        rep.kappa_degenerate = kappa.degenerate_agreement;

        std::vector<std::vector<int>> correctness(records.size(), std::vector<int>(raters, 0));
        for (std::size_t j = 0; j < records.size(); ++j)
            for (std::size_t i = 0; i < raters; ++i)
                correctness[j][i] = records[j].indicators[i] == 0 ? 1 : 0;
        const AlphaResult alpha = cronbach_alpha(correctness);
        rep.cronbach_alpha = alpha.capped;
        rep.cronbach_alpha_raw = alpha.raw;
        rep.alpha_zero_total_variance = alpha.zero_total_variance;
    } else {
        rep.fleiss_kappa = std::numeric_limits<double>::quiet_NaN();
        rep.cronbach_alpha = std::numeric_limits<double>::quiet_NaN();
        rep.cronbach_alpha_raw = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

std::string report_csv_header() {
    return "base_accuracy,mode_accuracy,lower_bound,upper_bound,item_difficulty,"
           "mean_certainty,gibbs_m2,fleiss_kappa,cronbach_alpha,cronbach_alpha_raw,m,n_plus_1";
}

std::string report_csv_row(const AgreementReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << r.base_accuracy << ',' << r.mode_accuracy << ',' << r.lower_bound << ','
       << r.upper_bound << ',' << r.item_difficulty << ',' << r.mean_certainty << ','
       << r.gibbs_m2 << ',' << r.fleiss_kappa << ',' << r.cronbach_alpha << ','
       << r.cronbach_alpha_raw << ',' << r.m << ',' << r.n_plus_1;
    return os.str();
}

}  // namespace hallucimc
