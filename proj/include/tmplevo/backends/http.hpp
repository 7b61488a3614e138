// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// OpenAI-style HTTP backend: POST /v1/chat/completions, /v1/embeddings and
// /v1/images/generations with bearer auth, exponential backoff with jitter on
// 429/5xx, and a bound on in-flight requests. The transport is pluggable so
// tests can replay recorded response bodies from a fixture directory.

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>

#include "tmplevo/backends/backend.hpp"

namespace tmplevo {

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_backoff{500};
};

struct HttpBackendConfig {
    std::string base_url = "https://api.openai.com";
    std::string chat_model = "gpt-4o";
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dim = 1536;
    std::string image_model = "dall-e-3";
    /// Name of the environment variable holding the API key. The key itself
    /// is never stored in config or run directories.
    std::string api_key_env = "OPENAI_API_KEY";
    RetryPolicy retry;
    int max_in_flight = 4;
    std::chrono::seconds timeout{120};
};

/// Throws InvalidArgument when attempts or the concurrency bound are < 1.
void validate(const HttpBackendConfig& config);

struct HttpResponse {
    int status = 0; ///< 0 when the connection itself failed
    std::string body;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& body, const std::string& bearer_token) = 0;
    [[nodiscard]] virtual bool needs_credentials() const { return true; }
};

class HttplibTransport final : public Transport {
public:
    HttplibTransport(std::string base_url, std::chrono::seconds timeout);
    HttpResponse post(const std::string& path, const std::string& body, const std::string& bearer_token) override;

private:
    std::string mBaseUrl;
    std::chrono::seconds mTimeout;
};

/// Replays `<dir>/<fixture_key(path, body)>.json` as a 200 response. A
/// missing file is a transport failure.
class FixtureTransport final : public Transport {
public:
    explicit FixtureTransport(std::filesystem::path dir);
    HttpResponse post(const std::string& path, const std::string& body, const std::string& bearer_token) override;
    [[nodiscard]] bool needs_credentials() const override { return false; }

    static std::string fixture_key(const std::string& path, const std::string& body);

private:
    std::filesystem::path mDir;
};

class HttpBackend final : public ChatBackend, public EmbeddingProvider, public ImageGenerator {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    HttpBackend(HttpBackendConfig config, std::unique_ptr<Transport> transport, Sleeper sleeper = {});

    ChatResponse complete(const ChatRequest& request) override;

    [[nodiscard]] std::size_t dimension() const override { return mConfig.embedding_dim; }
    EmbeddingResponse embed_text(std::string_view text) override;
    EmbeddingResponse embed_image(const ImageRef& image) override;

    ImageResponse generate(std::string_view prompt, const ImageOptions& options) override;

    // Request bodies, exposed for fixture recording and tests.
    [[nodiscard]] json chat_body(const ChatRequest& request) const;
    [[nodiscard]] json image_body(std::string_view prompt, const ImageOptions& options) const;

private:
    struct Reply {
        json body;
        int attempts = 1;
    };
    Reply post_with_retry(const std::string& path, const json& body);
    std::string api_key() const;
    EmbeddingResponse parse_embedding(const Reply& reply) const;

    HttpBackendConfig mConfig;
    std::unique_ptr<Transport> mTransport;
    Sleeper mSleep;
    std::counting_semaphore<> mInFlight;
};

/// data: URL for in-memory bytes, or the URI itself for http(s) references.
std::string image_url(const ImageRef& image);

} // namespace tmplevo
