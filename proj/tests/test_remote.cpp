// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "hallucimc/remote.hpp"

using namespace hallucimc;

namespace {

/// Local stub server; no network leaves the machine.
class StubServer {
public:
    explicit StubServer(httplib::Server::Handler handler) {
        server_.Post("/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

constexpr const char* kCompletion =
    R"({"choices":[{"message":{"role":"assistant","content":"The Louvre"}}],"usage":{"total_tokens":42}})";

const RetryPolicy kFastRetry{5, 1, 4};

}  // namespace

TEST_SUITE_BEGIN("remote");

TEST_CASE("request body carries the generation parameters verbatim") {
    GenerationParams params;
    params.model = "gpt-3.5-turbo";
    const nlohmann::json body = RemoteBackend::build_request_body("hello", params);
    CHECK(body.at("model") == "gpt-3.5-turbo");
    CHECK(body.at("temperature") == 1.0);
    CHECK(body.at("top_p") == 0.95);
    CHECK(body.at("max_tokens") == 800);
    CHECK(body.at("frequency_penalty") == 0.0);
    CHECK(body.at("presence_penalty") == 0.0);
    CHECK(body.at("seed") == 123);
    REQUIRE(body.at("messages").is_array());
    REQUIRE(body.at("messages").size() == 1);
    CHECK(body.at("messages")[0].at("role") == "user");
    CHECK(body.at("messages")[0].at("content") == "hello");
}

TEST_CASE("success path returns the first message text and echoes usage") {
    std::string captured_body;
    std::string captured_auth;
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        captured_body = req.body;
        captured_auth = req.get_header_value("Authorization");
        res.set_content(kCompletion, "application/json");
    });

    RemoteBackend backend(server.base_url(), "test-key", kFastRetry);
    GenerationParams params;
    const BackendResult result = backend.complete("prompt here", params, {"q1", 0});
    CHECK(result.status == OutputStatus::ok);
    CHECK(result.text == "The Louvre");
    CHECK(result.total_tokens == 42);
    CHECK_FALSE(result.raw_response_digest.empty());
    CHECK(captured_auth == "Bearer test-key");

    const nlohmann::json body = nlohmann::json::parse(captured_body);
    CHECK(body.at("temperature") == 1.0);
    CHECK(body.at("top_p") == 0.95);
    CHECK(body.at("max_tokens") == 800);
    CHECK(body.at("seed") == 123);
    CHECK(body.at("messages")[0].at("content") == "prompt here");
}

TEST_CASE("429 exhausts retries and classifies as api_error") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 429;
        res.set_content(R"({"error":{"message":"rate limited"}})", "application/json");
    });
    RemoteBackend backend(server.base_url(), "k", kFastRetry);
    const BackendResult result = backend.complete("p", GenerationParams{}, {"q1", 0});
    CHECK(result.status == OutputStatus::api_error);
    CHECK(hits.load() == kFastRetry.max_attempts);
}

TEST_CASE("5xx exhausts retries and classifies as api_error") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
        res.set_content("unavailable", "text/plain");
    });
    RemoteBackend backend(server.base_url(), "k", kFastRetry);
    CHECK(backend.complete("p", GenerationParams{}, {"q1", 0}).status == OutputStatus::api_error);
    CHECK(hits.load() == kFastRetry.max_attempts);
}

TEST_CASE("transient failures recover within the retry budget") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++hits <= 2) {
            res.status = 500;
            res.set_content("boom", "text/plain");
        } else {
            res.set_content(kCompletion, "application/json");
        }
    });
    RemoteBackend backend(server.base_url(), "k", kFastRetry);
    const BackendResult result = backend.complete("p", GenerationParams{}, {"q1", 0});
    CHECK(result.status == OutputStatus::ok);
    CHECK(result.text == "The Louvre");
    CHECK(hits.load() == 3);
}

TEST_CASE("400 with a content-filter code classifies immediately") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 400;
        res.set_content(
            R"({"error":{"code":"content_filter","message":"filtered by policy"}})",
            "application/json");
    });
    RemoteBackend backend(server.base_url(), "k", kFastRetry);
    const BackendResult result = backend.complete("p", GenerationParams{}, {"q1", 0});
    CHECK(result.status == OutputStatus::content_filtered);
    CHECK(result.text.empty());
    CHECK(hits.load() == 1);  // no retry on a content filter
}

TEST_CASE("other 4xx responses are api_error without retries") {
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
        res.set_content(R"({"error":{"message":"bad key"}})", "application/json");
    });
    RemoteBackend backend(server.base_url(), "k", kFastRetry);
    CHECK(backend.complete("p", GenerationParams{}, {"q1", 0}).status == OutputStatus::api_error);
    CHECK(hits.load() == 1);
}

TEST_CASE("a 200 body without a message is a parse failure") {
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices":[]})", "application/json");
    });
    RemoteBackend backend(server.base_url(), "k", kFastRetry);
    CHECK(backend.complete("p", GenerationParams{}, {"q1", 0}).status ==
          OutputStatus::parse_failure);
}

TEST_CASE("an unreachable endpoint is api_error after retries") {
    RemoteBackend backend("http://127.0.0.1:1", "k", RetryPolicy{2, 1, 2});
    CHECK(backend.complete("p", GenerationParams{}, {"q1", 0}).status == OutputStatus::api_error);
}

TEST_CASE("base urls with a path prefix post to {prefix}/chat/completions") {
    std::string captured_path;
    StubServer raw_server([](const httplib::Request&, httplib::Response&) {});
    // separate server instance that records the path for a prefixed route
    httplib::Server server;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        captured_path = req.path;
        res.set_content(kCompletion, "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    RemoteBackend backend("http://127.0.0.1:" + std::to_string(port) + "/v1", "k", kFastRetry);
    const BackendResult result = backend.complete("p", GenerationParams{}, {"q1", 0});
    CHECK(result.status == OutputStatus::ok);
    CHECK(captured_path == "/v1/chat/completions");
    server.stop();
    t.join();
}

TEST_SUITE_END();
