// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// HTTP backend against a loopback server and against recorded fixtures.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tmplevo/backends/http.hpp"
#include "tmplevo/hashing.hpp"

using namespace tmplevo;
using Catch::Matchers::WithinAbs;

namespace {

constexpr const char* kKeyEnv = "TMPLEVO_TEST_API_KEY";

json chat_envelope(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
}

class LoopbackServer {
public:
    LoopbackServer() {
        mPort = mServer.bind_to_any_port("127.0.0.1");
        mThread = std::thread([this] { mServer.listen_after_bind(); });
        mServer.wait_until_ready();
    }
    ~LoopbackServer() {
        mServer.stop();
        mThread.join();
    }
    httplib::Server& server() { return mServer; }
    [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(mPort); }

private:
    httplib::Server mServer;
    int mPort = 0;
    std::thread mThread;
};

struct Harness {
    LoopbackServer loop;
    std::vector<std::chrono::milliseconds> sleeps;
    std::mutex mutex;

    HttpBackend backend(int max_attempts = 4, int max_in_flight = 4, std::size_t dim = 3) {
        HttpBackendConfig cfg;
        cfg.base_url = loop.url();
        cfg.api_key_env = kKeyEnv;
        cfg.retry.max_attempts = max_attempts;
        cfg.retry.base_backoff = std::chrono::milliseconds(100);
        cfg.max_in_flight = max_in_flight;
        cfg.embedding_dim = dim;
        cfg.timeout = std::chrono::seconds(5);
        return HttpBackend(cfg, std::make_unique<HttplibTransport>(cfg.base_url, cfg.timeout),
                           [this](std::chrono::milliseconds d) {
                               std::lock_guard lock(mutex);
                               sleeps.push_back(d);
                           });
    }
};

ChatRequest simple_request() {
    ChatRequest req;
    req.kind = OperationKind::Diff;
    req.messages.push_back({"user", "hello", std::nullopt});
    return req;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("http chat success sends the bearer token and OpenAI envelope") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    json seen;
    std::string auth;
    h.loop.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(chat_envelope("hi there").dump(), "application/json");
    });
    auto backend = h.backend();
    ChatRequest req = simple_request();
    req.seed = 17;
    const auto resp = backend.complete(req);
    CHECK(resp.text == "hi there");
    CHECK(resp.attempts == 1);
    CHECK(auth == "Bearer sk-test");
    CHECK(seen["model"] == "gpt-4o");
    CHECK(seen["temperature"] == 0.0);
    CHECK(seen["seed"] == 17);
    CHECK(seen["messages"][0]["content"] == "hello");
}

TEST_CASE("http retries 429 and 5xx with growing backoff") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    std::atomic<int> calls{0};
    h.loop.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        const int n = ++calls;
        if (n == 1) res.status = 429;
        else if (n == 2) res.status = 503;
        else res.set_content(chat_envelope("ok").dump(), "application/json");
    });
    auto backend = h.backend();
    const auto resp = backend.complete(simple_request());
    CHECK(resp.text == "ok");
    CHECK(resp.attempts == 3);
    REQUIRE(h.sleeps.size() == 2);
    // Attempt k waits base * 2^(k-1) scaled by a jitter in [0.5, 1.5).
    CHECK(h.sleeps[0].count() >= 50);
    CHECK(h.sleeps[0].count() < 150);
    CHECK(h.sleeps[1].count() >= 100);
    CHECK(h.sleeps[1].count() < 300);
}

TEST_CASE("http gives up after max attempts") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    std::atomic<int> calls{0};
    h.loop.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 429;
    });
    auto backend = h.backend(3);
    CHECK(kind_of([&] { backend.complete(simple_request()); }) == ErrorKind::RateLimited);
    CHECK(calls == 3);

    h.loop.server().Post("/v1/images/generations", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
    });
    CHECK(kind_of([&] { backend.generate("a cat", {}); }) == ErrorKind::TransportError);
}

TEST_CASE("http auth failures and content rejections are not retried") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    std::atomic<int> calls{0};
    h.loop.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 401;
    });
    h.loop.server().Post("/v1/images/generations", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 400;
        res.set_content(R"({"error":{"code":"content_policy_violation"}})", "application/json");
    });
    auto backend = h.backend();
    CHECK(kind_of([&] { backend.complete(simple_request()); }) == ErrorKind::AuthError);
    CHECK(kind_of([&] { backend.generate("a cat", {}); }) == ErrorKind::ContentRejected);
    CHECK(calls == 2);
    CHECK(h.sleeps.empty());
}

TEST_CASE("http requires the API key variable") {
    ::unsetenv(kKeyEnv);
    Harness h;
    auto backend = h.backend();
    CHECK(kind_of([&] { backend.complete(simple_request()); }) == ErrorKind::AuthError);
}

TEST_CASE("http embeddings are checked and renormalized") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    h.loop.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        const bool wide = body["input"] == "wide";
        json v = wide ? json::array({1, 0, 0, 0}) : json::array({3.0, 4.0, 0.0});
        res.set_content(json{{"data", json::array({{{"embedding", v}}})}}.dump(), "application/json");
    });
    auto backend = h.backend();
    const auto e = backend.embed_text("narrow");
    CHECK_THAT(e.values[0], WithinAbs(0.6, 1e-12));
    CHECK_THAT(e.values[1], WithinAbs(0.8, 1e-12));
    CHECK(kind_of([&] { backend.embed_text("wide"); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("http image generation decodes base64 payloads") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    json seen;
    h.loop.server().Post("/v1/images/generations", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        res.set_content(json{{"data", json::array({{{"b64_json", base64_encode("PNGBYTES")}}})}}.dump(),
                        "application/json");
    });
    auto backend = h.backend();
    const auto r = backend.generate("a cat, watercolor", {});
    CHECK(r.image.data == "PNGBYTES");
    CHECK(seen["size"] == "1024x1024");
    CHECK(seen["quality"] == "standard");
    CHECK(seen["model"] == "dall-e-3");
}

TEST_CASE("http in-flight requests are bounded") {
    ::setenv(kKeyEnv, "sk-test", 1);
    Harness h;
    std::atomic<int> current{0}, peak{0};
    h.loop.server().new_task_queue = [] { return new httplib::ThreadPool(8); };
    h.loop.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        const int now = ++current;
        int p = peak.load();
        while (now > p && !peak.compare_exchange_weak(p, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        --current;
        res.set_content(chat_envelope("ok").dump(), "application/json");
    });
    auto backend = h.backend(4, 2);
    std::vector<std::thread> threads;
    for (int i = 0; i < 6; ++i) threads.emplace_back([&] { backend.complete(simple_request()); });
    for (auto& t : threads) t.join();
    CHECK(peak.load() <= 2);
    CHECK(peak.load() >= 1);
}

TEST_CASE("fixture replay returns recorded envelopes") {
    test::TempDir dir;
    HttpBackendConfig cfg;
    cfg.retry.max_attempts = 1;
    cfg.embedding_dim = 2;
    HttpBackend probe(cfg, std::make_unique<FixtureTransport>(dir.path()));

    const ChatRequest req = simple_request();
    const std::string chat_key = FixtureTransport::fixture_key("/v1/chat/completions", probe.chat_body(req).dump());
    std::ofstream(dir / (chat_key + ".json")) << chat_envelope("from fixture").dump();

    const std::string image_key =
        FixtureTransport::fixture_key("/v1/images/generations", probe.image_body("a cat", {}).dump());
    std::ofstream(dir / (image_key + ".json")) << json{{"data", json::array({{{"url", "https://img.example/1.png"}}})}}.dump();

    // No API key needed for replay.
    ::unsetenv(kKeyEnv);
    HttpBackend backend(cfg, std::make_unique<FixtureTransport>(dir.path()));
    CHECK(backend.complete(req).text == "from fixture");
    CHECK(backend.generate("a cat", {}).image.uri == "https://img.example/1.png");

    ChatRequest other = simple_request();
    other.messages[0].text = "unrecorded";
    CHECK(kind_of([&] { backend.complete(other); }) == ErrorKind::TransportError);
}

TEST_CASE("image urls") {
    CHECK(image_url(ImageRef{"https://x/y.png", {}}) == "https://x/y.png");
    CHECK(image_url(ImageRef{"mem", "\x89PNG...."}).rfind("data:image/png;base64,", 0) == 0);
}
