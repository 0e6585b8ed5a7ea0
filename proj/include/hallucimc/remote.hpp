// SPDX-License-Identifier: Apache-2.0
//
// Chat-completions client: POST {base_url}/chat/completions with bearer-token
// auth, bounded retries with jittered exponential backoff, and error
// classification into the AgentOutput status space.
#ifndef HALLUCIMC_REMOTE_HPP
#define HALLUCIMC_REMOTE_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "hallucimc/agents.hpp"

namespace hallucimc {

struct RetryPolicy {
    int max_attempts = 5;
    int base_delay_ms = 1000;
    int max_delay_ms = 30000;
};

/// Name of the environment variable carrying the bearer token.
inline constexpr const char* kApiKeyEnvVar = "HALLUCIMC_API_KEY";
/// Name of the environment variable carrying the default base URL.
inline constexpr const char* kEndpointEnvVar = "HALLUCIMC_ENDPOINT";

class RemoteBackend final : public LlmBackend {
public:
    RemoteBackend(std::string base_url, std::string api_key, RetryPolicy retry = {});

    /// Reads the token from HALLUCIMC_API_KEY (empty when unset).
    static RemoteBackend from_environment(std::string base_url, RetryPolicy retry = {});

    BackendResult complete(const std::string& prompt,
                           const GenerationParams& params,
                           const StreamKey& key) override;

    /// Request body: {model, messages:[{role,content}], temperature, top_p,
    /// max_tokens, frequency_penalty, presence_penalty, seed}.
    static nlohmann::json build_request_body(const std::string& prompt,
                                             const GenerationParams& params);

    /// First message text of the completion, or nullopt when the body does
    /// not carry one.
    static std::optional<std::string> extract_message_text(const std::string& body);

    /// Total tokens echoed in the usage block, 0 when absent.
    static std::int64_t extract_total_tokens(const std::string& body);

    /// True when an HTTP 400 carries a content-filter rejection code.
    static bool is_content_filter_error(const std::string& body);

private:
    std::string origin_;       // scheme://host[:port]
    std::string path_prefix_;  // optional path portion of base_url
    std::string api_key_;
    RetryPolicy retry_;
};

}  // namespace hallucimc

#endif
