// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/remote.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "hallucimc/hash.hpp"

namespace hallucimc {

namespace {

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    const std::size_t scheme = base_url.find("://");
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = base_url.find('/', host_start);
    if (slash == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, slash), prefix};
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

RemoteBackend::RemoteBackend(std::string base_url, std::string api_key, RetryPolicy retry)
    : api_key_(std::move(api_key)), retry_(retry) {
    if (base_url.empty()) throw ValidationError("remote backend needs a base URL");
    if (retry_.max_attempts < 1) throw ValidationError("retry policy needs >= 1 attempt");
    std::tie(origin_, path_prefix_) = split_base_url(base_url);
}

RemoteBackend RemoteBackend::from_environment(std::string base_url, RetryPolicy retry) {
    const char* key = std::getenv(kApiKeyEnvVar);
    return RemoteBackend(std::move(base_url), key == nullptr ? "" : key, retry);
}

nlohmann::json RemoteBackend::build_request_body(const std::string& prompt,
                                                 const GenerationParams& params) {
    params.validate();
    return nlohmann::json{
        {"model", params.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"max_tokens", params.max_tokens},
        {"frequency_penalty", params.frequency_penalty},
        {"presence_penalty", params.presence_penalty},
        {"seed", params.seed},
    };
}

std::optional<std::string> RemoteBackend::extract_message_text(const std::string& body) {
    const auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    const auto choices = parsed.find("choices");
    if (choices == parsed.end() || !choices->is_array() || choices->empty()) return std::nullopt;
    const auto& first = (*choices)[0];
    if (!first.contains("message") || !first["message"].contains("content")) return std::nullopt;
    const auto& content = first["message"]["content"];
    if (!content.is_string()) return std::nullopt;
    return content.get<std::string>();
}

std::int64_t RemoteBackend::extract_total_tokens(const std::string& body) {
    const auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("usage")) return 0;
    const auto& usage = parsed["usage"];
    if (usage.contains("total_tokens") && usage["total_tokens"].is_number_integer())
        return usage["total_tokens"].get<std::int64_t>();
    return 0;
}

bool RemoteBackend::is_content_filter_error(const std::string& body) {
    const auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("error")) return false;
    const auto& err = parsed["error"];
    const auto field_is = [&](const char* name) {
        return err.contains(name) && err[name].is_string() &&
               err[name].get<std::string>() == "content_filter";
    };
    return field_is("code") || field_is("type");
}

BackendResult RemoteBackend::complete(const std::string& prompt,
                                      const GenerationParams& params,
                                      const StreamKey& key) {
    const std::string body = build_request_body(prompt, params).dump();
    const std::string path = path_prefix_ + "/chat/completions";

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        httplib::Client client(origin_);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);
        auto res = client.Post(path, headers, body, "application/json");

        if (res) {
            const std::string digest = hex64(fnv1a64(res->body));
            if (res->status == 200) {
                auto text = extract_message_text(res->body);
                if (!text.has_value()) return {OutputStatus::parse_failure, "", digest};
                BackendResult result{OutputStatus::ok, std::move(*text), digest};
                result.total_tokens = extract_total_tokens(res->body);
                return result;
            }
            if (res->status == 400 && is_content_filter_error(res->body))
                return {OutputStatus::content_filtered, "", digest};
            if (!retryable_status(res->status)) return {OutputStatus::api_error, "", digest};
            if (attempt == retry_.max_attempts) return {OutputStatus::api_error, "", digest};
        } else if (attempt == retry_.max_attempts) {
            return {OutputStatus::api_error, "", ""};
        }

        // jittered exponential backoff: base * 2^(attempt-1) * [0.5, 1.0)
        double delay = static_cast<double>(retry_.base_delay_ms) *
                       static_cast<double>(1LL << std::min(attempt - 1, 20));
        delay = std::min(delay, static_cast<double>(retry_.max_delay_ms));
        const std::uint64_t h =
            splitmix64(fnv1a64(key.query_id) ^ (static_cast<std::uint64_t>(attempt) << 32) ^
                       static_cast<std::uint64_t>(key.index));
        delay *= 0.5 + 0.5 * uniform01(h);
        std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<std::int64_t>(delay)));
    }
    return {OutputStatus::api_error, "", ""};
}

}  // namespace hallucimc
