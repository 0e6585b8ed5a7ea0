// SPDX-License-Identifier: Apache-2.0
//
// hallucimc: estimate a query's propensity to induce hallucination by Monte
// Carlo simulation over perturbed variants, compute agreement/reliability
// metrics, and train lightweight classifier heads on the derived labels.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hallucimc/classifier.hpp"
#include "hallucimc/config.hpp"
#include "hallucimc/jsonl.hpp"
#include "hallucimc/labeler.hpp"
#include "hallucimc/metrics.hpp"
#include "hallucimc/orchestrator.hpp"
#include "hallucimc/remote.hpp"

namespace hmc = hallucimc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    std::string config_path;
    int match_threshold = -1;  // -1: not set on the command line
};

hmc::MatchConfig resolve_match_config(const CommonOpts& common) {
    hmc::MatchConfig match;
    if (!common.config_path.empty())
        hmc::apply_matching_config(hmc::parse_config_file(common.config_path), match);
    if (common.match_threshold >= 0) match.partial_ratio_threshold = common.match_threshold;
    match.validate();
    return match;
}

hmc::SimulatedAgentProfile load_profile_file(const std::string& path,
                                             const std::vector<hmc::QueryRecord>& dataset) {
    std::ifstream in(path);
    if (!in) throw hmc::ValidationError("cannot open profile " + path);
    nlohmann::json j;
    in >> j;
    hmc::SimulatedAgentProfile profile;
    profile.rng_seed = j.value("rng_seed", std::uint64_t{0});
    std::optional<double> default_prob;
    if (j.contains("default_correct_prob")) default_prob = j["default_correct_prob"].get<double>();
    const nlohmann::json queries = j.value("queries", nlohmann::json::object());

    // Resolve one explicit entry per dataset record so unknown-id lookups stay
    // fatal. The filler probability only controls pool generation; use one
    // below 1 so every record gets a non-empty wrong-answer pool.
    hmc::SimulatedAgentProfile filler =
        hmc::make_uniform_profile(dataset, 0.5, profile.rng_seed);
    for (const auto& rec : dataset) {
        profile.ground_truth[rec.id] = rec.ground_truth;
        const auto entry = queries.find(rec.id);
        if (entry != queries.end()) {
            profile.correct_prob[rec.id] = entry->value("correct_prob", default_prob.value_or(1.0));
            if (entry->contains("wrong_answers"))
                profile.wrong_pool[rec.id] = (*entry)["wrong_answers"].get<std::vector<std::string>>();
            else
                profile.wrong_pool[rec.id] = filler.wrong_pool[rec.id];
        } else if (default_prob.has_value()) {
            profile.correct_prob[rec.id] = *default_prob;
            profile.wrong_pool[rec.id] = filler.wrong_pool[rec.id];
        } else {
            throw hmc::ValidationError("profile does not cover query id " + rec.id);
        }
    }
    return profile;
}

std::string feature_text(const hmc::QueryRecord& query, bool scenario_encoding) {
    return scenario_encoding ? hmc::encode_with_scenario(query.text, query.scenario) : query.text;
}

hmc::FeatureVector record_features(const hmc::SimulationRecord& rec, bool scenario_encoding, int dim) {
    return hmc::featurize(feature_text(rec.query, scenario_encoding),
                          scenario_encoding ? std::optional<hmc::Scenario>(rec.query.scenario)
                                            : std::nullopt,
                          dim);
}

void print_kv(std::ostream& os, const std::string& key, double value) {
    os << key << "," << value << "\n";
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& dataset_path,
                 hmc::RunConfig cfg,
                 const std::string& profile_path,
                 double sim_correct_prob,
                 std::uint64_t sim_seed,
                 const std::string& endpoint_flag) {
    std::vector<hmc::QueryRecord> dataset = hmc::load_dataset_jsonl(dataset_path);
    const std::size_t total = dataset.size();
    if (cfg.resume) dataset = hmc::resume_filter(dataset, cfg.output_path);

    std::unique_ptr<hmc::LlmBackend> backend;
    if (cfg.backend == hmc::RunConfig::Backend::simulated) {
        hmc::SimulatedAgentProfile profile =
            profile_path.empty() ? hmc::make_uniform_profile(dataset, sim_correct_prob, sim_seed)
                                 : load_profile_file(profile_path, dataset);
        backend = std::make_unique<hmc::SimulatedBackend>(std::move(profile));
    } else {
        std::string endpoint = endpoint_flag;
        if (endpoint.empty()) {
            const char* env = std::getenv(hmc::kEndpointEnvVar);
            if (env != nullptr) endpoint = env;
        }
        if (endpoint.empty())
            throw hmc::ValidationError("remote backend needs --endpoint or HALLUCIMC_ENDPOINT");
        backend = std::make_unique<hmc::RemoteBackend>(
            hmc::RemoteBackend::from_environment(endpoint));
    }

    std::cerr << "simulating " << dataset.size() << " of " << total << " queries (n=" << cfg.n
              << ", backend="
              << (cfg.backend == hmc::RunConfig::Backend::simulated ? "simulated" : "remote")
              << ")\n";
    cfg.progress_every = std::max<std::size_t>(dataset.size() / 10, 1000);
    const hmc::StringMatcher matcher(cfg.match);
    const hmc::RunStats stats = hmc::run_simulation(dataset, cfg, *backend, matcher);
    std::cout << "completed," << stats.completed << "\n"
              << "skipped," << stats.skipped << "\n"
              << "failed_outputs," << stats.failed_outputs << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- perturb

int cmd_perturb(const std::string& dataset_path, int n, std::uint64_t sim_seed,
                const std::string& out_path) {
    const std::vector<hmc::QueryRecord> dataset = hmc::load_dataset_jsonl(dataset_path);
    hmc::SimulatedAgentProfile profile = hmc::make_uniform_profile(dataset, 1.0, sim_seed);
    hmc::SimulatedBackend backend(std::move(profile));
    hmc::GenerationParams params;

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw hmc::ValidationError("cannot open output " + out_path);
    }
    std::ostream& os = out_path.empty() ? std::cout : file;

    for (const auto& rec : dataset) {
        const auto res = backend.complete(hmc::render_perturbation_prompt(rec.text, n), params,
                                          {rec.id, 0, hmc::StreamKey::Role::perturb});
        const auto rewrites = hmc::parse_perturbations(res.text, n);
        const hmc::PerturbationSet set = hmc::make_perturbation_set(rec, rewrites, n);
        os << nlohmann::json{{"id", rec.id}, {"variants", set.variants}}.dump() << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- label

int cmd_label(const std::string& store_path, const std::string& out_path,
              const hmc::MatchConfig& match, bool exclude_failed) {
    const std::vector<hmc::SimulationRecord> records = hmc::load_store_jsonl(store_path);
    if (records.empty()) throw hmc::ValidationError("store is empty: " + store_path);

    std::ofstream out(out_path);
    if (!out) throw hmc::ValidationError("cannot open output " + out_path);

    const hmc::StringMatcher matcher(match);
    std::size_t dropped = 0;
    for (const auto& rec : records) {
        std::vector<int> indicators;
        indicators.reserve(rec.outputs.size());
        for (const auto& o : rec.outputs) indicators.push_back(matcher.indicator(o, rec.query));
        hmc::SimulationRecord relabeled = hmc::make_simulation_record(
            rec.query, rec.perturbations, rec.outputs, std::move(indicators));
        relabeled.sequence = rec.sequence;
        if (exclude_failed && relabeled.failed_agents > 0) {
            ++dropped;
            continue;
        }
        out << hmc::to_json(relabeled).dump() << "\n";
    }
    std::cout << "relabeled," << records.size() - dropped << "\n"
              << "dropped," << dropped << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- metrics

void print_report_table(std::ostream& os, const std::string& name, const hmc::AgreementReport& r) {
    os << name << ": m=" << r.m << " raters=" << r.n_plus_1 << "\n";
    const std::pair<const char*, double> rows[] = {
        {"base_accuracy", r.base_accuracy},      {"mode_accuracy", r.mode_accuracy},
        {"lower_bound", r.lower_bound},          {"upper_bound", r.upper_bound},
        {"item_difficulty", r.item_difficulty},  {"mean_certainty", r.mean_certainty},
        {"gibbs_m2", r.gibbs_m2},                {"fleiss_kappa", r.fleiss_kappa},
        {"cronbach_alpha", r.cronbach_alpha},
    };
    for (const auto& [label, value] : rows) {
        os << "  " << label;
        for (std::size_t pad = std::string(label).size(); pad < 18; ++pad) os << ' ';
        os << value << "\n";
    }
    if (r.kappa_degenerate) os << "  (kappa degenerate: one category everywhere)\n";
    if (r.alpha_zero_total_variance) os << "  (alpha: zero variance across rater totals)\n";
}

int cmd_metrics(const std::string& store_path, const std::string& csv_path,
                const std::string& group_by, const hmc::MatchConfig& match) {
    const std::vector<hmc::SimulationRecord> records = hmc::load_store_jsonl(store_path);
    if (records.empty()) {
        std::cerr << "error: store is empty: " << store_path << "\n";
        return kExitFatal;
    }

    std::vector<std::pair<std::string, std::vector<hmc::SimulationRecord>>> groups;
    if (group_by == "scenario") {
        std::map<std::string, std::vector<hmc::SimulationRecord>> by_tag;
        for (const auto& rec : records)
            by_tag[std::string(hmc::scenario_tag(rec.query.scenario))].push_back(rec);
        for (auto& [tag, recs] : by_tag) groups.emplace_back(tag, std::move(recs));
    } else {
        groups.emplace_back("all", records);
    }

    const std::size_t raters = records.front().indicators.size();
    const auto histogram_of = [&](const std::vector<hmc::SimulationRecord>& recs) {
        std::vector<std::size_t> h(raters + 1, 0);
        for (const auto& rec : recs) h[static_cast<std::size_t>(rec.class_label)] += 1;
        return h;
    };

    std::ostringstream csv;
    csv << "group," << hmc::report_csv_header();
    for (std::size_t c = 0; c <= raters; ++c) csv << ",class_" << c;
    csv << "\n";
    const auto append_row = [&](const std::string& name, const hmc::AgreementReport& rep,
                                const std::vector<std::size_t>& histogram) {
        csv << name << "," << hmc::report_csv_row(rep);
        for (std::size_t count : histogram) csv << "," << count;
        csv << "\n";
    };

    std::vector<std::pair<std::string, hmc::AgreementReport>> reports;
    std::vector<std::vector<std::size_t>> histograms;
    for (const auto& [name, recs] : groups) {
        const hmc::AgreementReport rep = hmc::build_report(recs, match);
        histograms.push_back(histogram_of(recs));
        append_row(name, rep, histograms.back());
        reports.emplace_back(name, rep);
    }
    if (groups.size() > 1) {
        // count-weighted average row mirroring the per-scenario presentation
        hmc::AgreementReport wavg;
        double total = 0;
        for (const auto& [name, rep] : reports) total += static_cast<double>(rep.m);
        for (const auto& [name, rep] : reports) {
            const double w = static_cast<double>(rep.m) / total;
            wavg.base_accuracy += w * rep.base_accuracy;
            wavg.mode_accuracy += w * rep.mode_accuracy;
            wavg.lower_bound += w * rep.lower_bound;
            wavg.upper_bound += w * rep.upper_bound;
            wavg.item_difficulty += w * rep.item_difficulty;
            wavg.mean_certainty += w * rep.mean_certainty;
            wavg.gibbs_m2 += w * rep.gibbs_m2;
            wavg.fleiss_kappa += w * rep.fleiss_kappa;
            wavg.cronbach_alpha += w * rep.cronbach_alpha;
            wavg.cronbach_alpha_raw += w * rep.cronbach_alpha_raw;
            wavg.m += rep.m;
            wavg.n_plus_1 = rep.n_plus_1;
        }
        std::vector<std::size_t> total_hist(raters + 1, 0);
        for (const auto& h : histograms)
            for (std::size_t c = 0; c <= raters; ++c) total_hist[c] += h[c];
        append_row("wavg", wavg, total_hist);
        histograms.push_back(std::move(total_hist));
        reports.emplace_back("wavg", wavg);
    }

    for (std::size_t g = 0; g < reports.size(); ++g) {
        print_report_table(std::cout, reports[g].first, reports[g].second);
        std::cout << "  histogram";
        for (std::size_t c = 0; c <= raters; ++c) std::cout << " y=" << c << ":" << histograms[g][c];
        std::cout << "\n";
    }
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw hmc::ValidationError("cannot open csv output " + csv_path);
        f << csv.str();
    } else {
        std::cout << csv.str();
    }
    return kExitOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const std::string& store_path, const std::string& out_path, const std::string& mode,
              int dim, bool scenario_encoding, hmc::TrainHyperparams hp, bool tune,
              const std::string& val_store_path) {
    const std::vector<hmc::SimulationRecord> records = hmc::load_store_jsonl(store_path);
    if (records.empty()) throw hmc::ValidationError("store is empty: " + store_path);

    std::vector<hmc::FeatureVector> features;
    features.reserve(records.size());
    for (const auto& rec : records) features.push_back(record_features(rec, scenario_encoding, dim));

    hmc::ModelFile model;
    model.kind = mode;
    model.dim = dim;
    model.scenario_encoding = scenario_encoding;

    if (mode == "binary") {
        std::vector<int> labels;
        labels.reserve(records.size());
        for (const auto& rec : records) labels.push_back(rec.binary_label);
        const auto weights = hmc::inverse_frequency_weights(labels, 2);
        const hmc::LinearModel trained = hmc::train_binary(features, labels, weights, hp);
        model.weights = trained.weights;
        model.bias = trained.bias;
        model.num_classes = 2;

        if (tune) {
            if (val_store_path.empty())
                throw hmc::ValidationError("--tune-threshold needs --val-store");
            const auto val = hmc::load_store_jsonl(val_store_path);
            if (val.empty()) throw hmc::ValidationError("validation store is empty");
            std::vector<double> scores;
            std::vector<int> val_labels;
            for (const auto& rec : val) {
                scores.push_back(
                    trained.probability(record_features(rec, scenario_encoding, dim).values));
                val_labels.push_back(rec.binary_label);
            }
            model.tau = hmc::tune_threshold(scores, val_labels);
            std::cout << "tau," << model.tau << "\n";
        }
    } else if (mode == "ordinal") {
        const int num_classes = static_cast<int>(records.front().indicators.size()) + 1;
        std::vector<int> labels;
        labels.reserve(records.size());
        for (const auto& rec : records) labels.push_back(rec.class_label);
        const auto weights = hmc::inverse_frequency_weights(labels, num_classes);
        const hmc::OrdinalHead head = hmc::train_ordinal(features, labels, num_classes, weights, hp);
        model.weights = head.scorer.weights;
        model.bias = head.scorer.bias;
        model.theta = head.theta;
        model.num_classes = num_classes;
    } else {
        throw hmc::ValidationError("unknown training mode: " + mode);
    }

    hmc::save_model(out_path, model);
    std::cout << "trained," << records.size() << "\n"
              << "model," << out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const std::string& store_path, const std::string& model_path, const std::string& mode) {
    const std::vector<hmc::SimulationRecord> records = hmc::load_store_jsonl(store_path);
    if (records.empty()) {
        std::cerr << "error: store is empty: " << store_path << "\n";
        return kExitFatal;
    }
    const hmc::ModelFile model = hmc::load_model(model_path);

    hmc::LinearModel scorer;
    scorer.weights = model.weights;
    scorer.bias = model.bias;

    if (mode == "binary") {
        if (model.kind != "binary")
            throw hmc::ValidationError("binary evaluation needs a binary model");
        std::vector<int> predictions, labels;
        for (const auto& rec : records) {
            const auto fv = record_features(rec, model.scenario_encoding, model.dim);
            predictions.push_back(scorer.probability(fv.values) >= model.tau ? 1 : 0);
            labels.push_back(rec.binary_label);
        }
        const hmc::BinaryMetrics m = hmc::evaluate_binary(predictions, labels);
        print_kv(std::cout, "accuracy", m.accuracy);
        print_kv(std::cout, "f1", m.f1);
        print_kv(std::cout, "precision", m.precision);
        print_kv(std::cout, "recall", m.recall);
        print_kv(std::cout, "tau", model.tau);
    } else if (mode == "multiclass") {
        if (model.kind != "ordinal")
            throw hmc::ValidationError("multiclass evaluation needs an ordinal model");
        hmc::OrdinalHead head;
        head.scorer = scorer;
        head.theta = model.theta;
        std::vector<std::vector<double>> probs;
        std::vector<int> labels;
        for (const auto& rec : records) {
            const auto fv = record_features(rec, model.scenario_encoding, model.dim);
            probs.push_back(head.predict_proba(fv.values));
            labels.push_back(rec.class_label);
        }
        const hmc::MulticlassMetrics m = hmc::evaluate_multiclass(probs, labels);
        print_kv(std::cout, "top1_accuracy", m.top1);
        print_kv(std::cout, "top2_accuracy", m.top2);
        print_kv(std::cout, "top3_accuracy", m.top3);
        print_kv(std::cout, "pm1_accuracy", m.within_one);
    } else {
        throw hmc::ValidationError("unknown eval mode: " + mode);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& store_path, const std::string& csv_path,
               const hmc::MatchConfig& match) {
    const std::vector<hmc::SimulationRecord> records = hmc::load_store_jsonl(store_path);
    if (records.empty()) {
        std::cerr << "error: store is empty: " << store_path << "\n";
        return kExitFatal;
    }

    const std::size_t raters = records.front().indicators.size();
    std::vector<std::size_t> histogram(raters + 1, 0);
    std::size_t yes = 0;
    std::map<std::string, std::size_t> outcomes;
    for (const auto& rec : records) {
        histogram[static_cast<std::size_t>(rec.class_label)] += 1;
        yes += static_cast<std::size_t>(rec.binary_label);
        outcomes[std::string(hmc::outcome_name(rec.outcome))] += 1;
    }

    const hmc::AgreementReport rep = hmc::build_report(records, match);
    print_report_table(std::cout, "corpus", rep);

    const std::string manifest_path = store_path + ".manifest.json";
    if (std::filesystem::exists(manifest_path))
        std::cout << "manifest: " << manifest_path << "\n";

    std::cout << "binary: no=" << records.size() - yes << " yes=" << yes << "\n";
    std::cout << "expected-class histogram (rate: count, percent):\n";
    for (std::size_t c = 0; c < histogram.size(); ++c) {
        std::cout << "  " << hmc::class_rate_percent(static_cast<std::int64_t>(c),
                                                     static_cast<int>(raters) - 1)
                  << "% (y=" << c << "): " << histogram[c] << ", "
                  << 100.0 * static_cast<double>(histogram[c]) / static_cast<double>(records.size())
                  << "%\n";
    }
    std::cout << "outcomes:";
    for (const char* name : {"consensus", "dissent", "corrective", "erroneous"})
        std::cout << " " << name << "=" << outcomes[name];
    std::cout << "\n";

    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw hmc::ValidationError("cannot open csv output " + csv_path);
        f << "group," << hmc::report_csv_header();
        for (std::size_t c = 0; c < histogram.size(); ++c) f << ",class_" << c;
        f << ",binary_no,binary_yes,consensus,dissent,corrective,erroneous\n";
        f << "all," << hmc::report_csv_row(rep);
        for (std::size_t c = 0; c < histogram.size(); ++c) f << "," << histogram[c];
        f << "," << records.size() - yes << "," << yes;
        for (const char* name : {"consensus", "dissent", "corrective", "erroneous"})
            f << "," << outcomes[name];
        f << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo hallucination estimation over perturbed queries"};
    app.require_subcommand(1);

    CommonOpts common;

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo pipeline over a dataset");
    std::string dataset_path, out_path, profile_path, endpoint, backend_name = "simulated",
                                                                model_name;
    double sim_correct_prob = 0.7;
    std::uint64_t sim_seed = 123;
    hmc::RunConfig run_cfg;
    std::int64_t gen_seed = 123;
    simulate->add_option("--dataset", dataset_path, "input JSONL dataset")->required();
    simulate->add_option("--out", out_path, "output JSONL store")->required();
    simulate->add_option("--backend", backend_name, "simulated or remote")
        ->check(CLI::IsMember({"simulated", "remote"}));
    simulate->add_option("--n", run_cfg.n, "number of rewrites per query");
    simulate->add_option("--concurrency", run_cfg.concurrency_cap, "in-flight query cap");
    simulate->add_flag("--resume", run_cfg.resume, "skip ids already present in the store");
    simulate->add_option("--match-threshold", common.match_threshold, "partial-ratio threshold");
    simulate->add_option("--config", common.config_path, "config file");
    simulate->add_option("--profile", profile_path, "simulated-agent profile JSON");
    simulate->add_option("--sim-correct-prob", sim_correct_prob,
                         "uniform per-agent correctness probability (simulated backend)");
    simulate->add_option("--seed", sim_seed, "simulated-backend seed");
    simulate->add_option("--gen-seed", gen_seed, "generation seed transmitted to the endpoint");
    simulate->add_option("--endpoint", endpoint, "remote base URL");
    simulate->add_option("--model", model_name, "remote model name");

    // perturb
    auto* perturb = app.add_subcommand("perturb", "emit perturbation sets only");
    std::string p_dataset, p_out;
    int p_n = 5;
    std::uint64_t p_seed = 123;
    perturb->add_option("--dataset", p_dataset, "input JSONL dataset")->required();
    perturb->add_option("--n", p_n, "number of rewrites per query");
    perturb->add_option("--seed", p_seed, "simulated-backend seed");
    perturb->add_option("--out", p_out, "output path (stdout when omitted)");

    // label
    auto* label = app.add_subcommand("label", "re-grade stored outputs and rebuild labels");
    std::string l_store, l_out;
    bool l_exclude_failed = false;
    label->add_option("--store", l_store, "simulation store")->required();
    label->add_option("--out", l_out, "relabeled output store")->required();
    label->add_option("--match-threshold", common.match_threshold, "partial-ratio threshold");
    label->add_option("--config", common.config_path, "config file");
    label->add_flag("--exclude-failed", l_exclude_failed,
                    "drop records containing failed agent outputs");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "agreement/reliability report over a store");
    std::string m_store, m_csv, m_group;
    metrics->add_option("--store", m_store, "simulation store")->required();
    metrics->add_option("--csv", m_csv, "write the CSV row(s) here instead of stdout");
    metrics->add_option("--group-by", m_group, "scenario")->check(CLI::IsMember({"scenario"}));
    metrics->add_option("--match-threshold", common.match_threshold, "partial-ratio threshold");
    metrics->add_option("--config", common.config_path, "config file");

    // train
    auto* train = app.add_subcommand("train", "train a classifier head on a labeled store");
    std::string t_store, t_out, t_mode = "binary", t_val;
    int t_dim = 512;
    bool t_scenario = false, t_tune = false;
    hmc::TrainHyperparams hp;
    train->add_option("--store", t_store, "training store")->required();
    train->add_option("--out", t_out, "model file path")->required();
    train->add_option("--mode", t_mode, "binary or ordinal")
        ->check(CLI::IsMember({"binary", "ordinal"}));
    train->add_option("--dim", t_dim, "hashed feature dimension");
    train->add_option("--epochs", hp.epochs, "training epochs");
    train->add_option("--lr", hp.learning_rate, "learning rate");
    train->add_option("--batch-size", hp.batch_size, "minibatch size");
    train->add_option("--seed", hp.shuffle_seed, "shuffle seed");
    train->add_flag("--scenario-encoding", t_scenario, "prepend <<[TAG] q0>> and one-hot scenario");
    train->add_flag("--tune-threshold", t_tune, "grid-sweep tau on validation scores");
    train->add_option("--val-store", t_val, "validation store for --tune-threshold");
    train->add_option("--config", common.config_path, "config file");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a trained model over a store");
    std::string e_store, e_model, e_mode = "binary";
    eval->add_option("--store", e_store, "evaluation store")->required();
    eval->add_option("--model", e_model, "model file")->required();
    eval->add_option("--mode", e_mode, "binary or multiclass")
        ->check(CLI::IsMember({"binary", "multiclass"}));

    // report
    auto* report = app.add_subcommand("report", "label histogram, outcome tally and agreement");
    std::string r_store, r_csv;
    report->add_option("--store", r_store, "simulation store")->required();
    report->add_option("--csv", r_csv, "CSV output path");
    report->add_option("--match-threshold", common.match_threshold, "partial-ratio threshold");
    report->add_option("--config", common.config_path, "config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            run_cfg.backend = backend_name == "remote" ? hmc::RunConfig::Backend::remote
                                                       : hmc::RunConfig::Backend::simulated;
            run_cfg.output_path = out_path;
            run_cfg.match = resolve_match_config(common);
            if (!common.config_path.empty())
                hmc::apply_generation_config(hmc::parse_config_file(common.config_path),
                                             run_cfg.generation);
            if (simulate->count("--gen-seed") > 0) run_cfg.generation.seed = gen_seed;
            if (!model_name.empty()) run_cfg.generation.model = model_name;
            return cmd_simulate(dataset_path, run_cfg, profile_path, sim_correct_prob, sim_seed,
                                endpoint);
        }
        if (perturb->parsed()) return cmd_perturb(p_dataset, p_n, p_seed, p_out);
        if (label->parsed())
            return cmd_label(l_store, l_out, resolve_match_config(common), l_exclude_failed);
        if (metrics->parsed())
            return cmd_metrics(m_store, m_csv, m_group, resolve_match_config(common));
        if (train->parsed()) {
            if (!common.config_path.empty())
                hmc::apply_training_config(hmc::parse_config_file(common.config_path), hp);
            return cmd_train(t_store, t_out, t_mode, t_dim, t_scenario, hp, t_tune, t_val);
        }
        if (eval->parsed()) return cmd_eval(e_store, e_model, e_mode);
        if (report->parsed()) return cmd_report(r_store, r_csv, resolve_match_config(common));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitUsage;
}
