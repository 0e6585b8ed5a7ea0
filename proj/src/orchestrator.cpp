// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/orchestrator.hpp"

#include <atomic>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_set>

#include "hallucimc/jsonl.hpp"

namespace hallucimc {

void RunConfig::validate() const {
    if (n < 1) throw ValidationError("run config: n must be >= 1");
    if (concurrency_cap < 1) throw ValidationError("run config: concurrency cap must be >= 1");
    if (output_path.empty()) throw ValidationError("run config: output path missing");
    if (perturb_reasks < 0) throw ValidationError("run config: perturb_reasks must be >= 0");
    match.validate();
    generation.validate();
}

std::string encode_with_scenario(std::string_view q0, Scenario scenario) {
    std::string out = "<<[";
    out += scenario_tag(scenario);
    out += "] ";
    out += q0;
    out += ">>";
    return out;
}

std::vector<QueryRecord> resume_filter(const std::vector<QueryRecord>& dataset,
                                       const std::filesystem::path& store_path) {
    std::unordered_set<std::string> seen;
    if (std::filesystem::exists(store_path)) {
        std::ifstream in(store_path);
        if (!in) throw ValidationError("cannot read store " + store_path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("id") || !j["id"].is_string()) {
                std::cerr << "warning: " << store_path.string() << ":" << line_no
                          << ": skipping corrupt store line\n";
                continue;
            }
            seen.insert(j["id"].get<std::string>());
        }
    }
    std::vector<QueryRecord> fresh;
    for (const auto& rec : dataset)
        if (!seen.contains(rec.id)) fresh.push_back(rec);
    return fresh;
}

namespace {

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t max_existing_sequence(const std::filesystem::path& store_path) {
    std::uint64_t max_seq = 0;
    bool any = false;
    if (!std::filesystem::exists(store_path)) return 0;
    std::ifstream in(store_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("sequence")) continue;
        any = true;
        max_seq = std::max(max_seq, j["sequence"].get<std::uint64_t>());
    }
    return any ? max_seq + 1 : 0;
}

struct WorkerOutcome {
    std::optional<SimulationRecord> record;  // nullopt: query skipped
    std::size_t failed_outputs = 0;
    std::int64_t tokens = 0;
};

WorkerOutcome simulate_one(const QueryRecord& query,
                           const RunConfig& cfg,
                           LlmBackend& backend,
                           const Matcher& matcher) {
    WorkerOutcome outcome;

    std::optional<std::vector<std::string>> rewrites;
    const std::string perturb_prompt = render_perturbation_prompt(query.text, cfg.n);
    for (int attempt = 0; attempt <= cfg.perturb_reasks && !rewrites.has_value(); ++attempt) {
        const BackendResult res = backend.complete(
            perturb_prompt, cfg.generation, {query.id, attempt, StreamKey::Role::perturb});
        outcome.tokens += res.total_tokens;
        if (res.status != OutputStatus::ok) continue;
        try {
            rewrites = parse_perturbations(res.text, cfg.n);
        } catch (const ParseError&) {
            // re-ask
        }
    }
    if (!rewrites.has_value()) {
        std::cerr << "warning: skipping query " << query.id
                  << " after repeated perturbation failures\n";
        return outcome;
    }

    PerturbationSet set = make_perturbation_set(query, std::move(*rewrites), cfg.n);

    std::vector<AgentOutput> outputs;
    std::vector<int> indicators;
    outputs.reserve(set.variants.size());
    indicators.reserve(set.variants.size());
    for (std::size_t i = 0; i < set.variants.size(); ++i) {
        const std::string prompt =
            render_output_prompt(set.variants[i], query.scenario, query.context, query.choices);
        const BackendResult res = backend.complete(
            prompt, cfg.generation, {query.id, static_cast<int>(i), StreamKey::Role::generate});
        outcome.tokens += res.total_tokens;

        AgentOutput out;
        out.perturbation_index = static_cast<int>(i);
        out.status = res.status;
        out.text = res.status == OutputStatus::ok ? res.text : "";
        out.raw_response_digest = res.raw_response_digest;
        if (out.status != OutputStatus::ok) ++outcome.failed_outputs;

        indicators.push_back(matcher.indicator(out, query));
        outputs.push_back(std::move(out));
    }

    outcome.record =
        make_simulation_record(query, std::move(set), std::move(outputs), std::move(indicators));
    return outcome;
}

}  // namespace

RunStats run_simulation(const std::vector<QueryRecord>& dataset,
                        const RunConfig& cfg,
                        LlmBackend& backend,
                        const Matcher& matcher) {
    cfg.validate();
    for (const auto& rec : dataset) rec.validate();

    const std::uint64_t first_sequence = cfg.resume ? max_existing_sequence(cfg.output_path) : 0;

    // An interrupted run can leave a partial last line; isolate it so the
    // first appended record does not merge into it.
    bool repair_tail = false;
    if (cfg.resume && std::filesystem::exists(cfg.output_path) &&
        std::filesystem::file_size(cfg.output_path) > 0) {
        std::ifstream tail(cfg.output_path, std::ios::binary);
        tail.seekg(-1, std::ios::end);
        char last = '\n';
        tail.get(last);
        repair_tail = last != '\n';
    }

    std::ofstream out(cfg.output_path,
                      cfg.resume ? std::ios::out | std::ios::app : std::ios::out | std::ios::trunc);
    if (!out) throw ValidationError("cannot open output store " + cfg.output_path.string());
    if (repair_tail) out << '\n';

    const std::string started_at = iso8601_utc_now();

    RunStats stats;
    stats.input_count = dataset.size();

    std::mutex mu;
    std::map<std::size_t, WorkerOutcome> pending;  // dataset index -> outcome
    std::size_t next_to_write = 0;
    std::uint64_t sequence = first_sequence;
    std::atomic<std::size_t> cursor{0};

    auto drain_ready = [&]() {  // caller holds mu
        while (!pending.empty() && pending.begin()->first == next_to_write) {
            WorkerOutcome& done = pending.begin()->second;
            stats.failed_outputs += done.failed_outputs;
            stats.total_tokens += done.tokens;
            if (done.record.has_value()) {
                done.record->sequence = sequence++;
                out << to_json(*done.record).dump() << '\n' << std::flush;
                ++stats.completed;
            } else {
                ++stats.skipped;
            }
            pending.erase(pending.begin());
            ++next_to_write;
            if (cfg.progress_every > 0 && next_to_write % cfg.progress_every == 0)
                std::cerr << "progress: " << next_to_write << "/" << dataset.size() << "\n";
        }
    };

    auto worker = [&]() {
        while (true) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= dataset.size()) return;
            WorkerOutcome outcome;
            try {
                outcome = simulate_one(dataset[idx], cfg, backend, matcher);
            } catch (const std::exception& e) {
                // per-record failures never abort the run
                std::lock_guard<std::mutex> lock(mu);
                std::cerr << "warning: query " << dataset[idx].id << " failed: " << e.what()
                          << "\n";
                outcome = {};
            }
            std::lock_guard<std::mutex> lock(mu);
            pending.emplace(idx, std::move(outcome));
            drain_ready();
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.concurrency_cap), std::max<std::size_t>(dataset.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    out.close();

    // run-manifest sidecar
    nlohmann::json manifest{
        {"started_at", started_at},
        {"finished_at", iso8601_utc_now()},
        {"counts",
         {{"input", stats.input_count},
          {"completed", stats.completed},
          {"skipped", stats.skipped},
          {"failed_outputs", stats.failed_outputs}}},
        {"total_tokens", stats.total_tokens},
        {"config",
         {{"n", cfg.n},
          {"backend", cfg.backend == RunConfig::Backend::simulated ? "simulated" : "remote"},
          {"concurrency_cap", cfg.concurrency_cap},
          {"resume", cfg.resume},
          {"match",
           {{"partial_ratio_threshold", cfg.match.partial_ratio_threshold},
            {"normalize_unicode", cfg.match.normalize_unicode}}},
          {"generation",
           {{"temperature", cfg.generation.temperature},
            {"top_p", cfg.generation.top_p},
            {"max_tokens", cfg.generation.max_tokens},
            {"frequency_penalty", cfg.generation.frequency_penalty},
            {"presence_penalty", cfg.generation.presence_penalty},
            {"seed", cfg.generation.seed},
            {"model", cfg.generation.model}}}}},
    };
    std::ofstream manifest_out(cfg.output_path.string() + ".manifest.json");
    if (manifest_out) manifest_out << manifest.dump(2) << '\n';

    return stats;
}

}  // namespace hallucimc
