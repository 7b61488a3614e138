// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "tmplevo/backends/http.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"
#include "tmplevo/rng.hpp"

namespace tmplevo {

namespace fs = std::filesystem;

void validate(const HttpBackendConfig& config) {
    if (config.retry.max_attempts < 1) fail(ErrorKind::InvalidArgument, "retry.max_attempts must be >= 1");
    if (config.max_in_flight < 1) fail(ErrorKind::InvalidArgument, "max_in_flight must be >= 1");
    if (config.embedding_dim == 0) fail(ErrorKind::InvalidArgument, "embedding_dim must be positive");
}

HttplibTransport::HttplibTransport(std::string base_url, std::chrono::seconds timeout)
    : mBaseUrl(std::move(base_url)), mTimeout(timeout) {}

HttpResponse HttplibTransport::post(const std::string& path, const std::string& body,
                                    const std::string& bearer_token) {
    httplib::Client client(mBaseUrl);
    client.set_connection_timeout(mTimeout);
    client.set_read_timeout(mTimeout);
    httplib::Headers headers;
    if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) return HttpResponse{0, httplib::to_string(res.error())};
    return HttpResponse{res->status, res->body};
}

FixtureTransport::FixtureTransport(fs::path dir) : mDir(std::move(dir)) {}

std::string FixtureTransport::fixture_key(const std::string& path, const std::string& body) {
    return sha256_hex(path + "\n" + body);
}

HttpResponse FixtureTransport::post(const std::string& path, const std::string& body, const std::string&) {
    const fs::path file = mDir / (fixture_key(path, body) + ".json");
    std::ifstream in(file);
    if (!in) return HttpResponse{0, "no fixture for request: " + file.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return HttpResponse{200, ss.str()};
}

std::string image_url(const ImageRef& image) {
    if (image.data.empty() && (image.uri.rfind("http://", 0) == 0 || image.uri.rfind("https://", 0) == 0)) {
        return image.uri;
    }
    const std::string bytes = read_image_bytes(image);
    std::string mime = "application/octet-stream";
    if (bytes.rfind("\x89PNG", 0) == 0) mime = "image/png";
    else if (bytes.rfind("\xFF\xD8\xFF", 0) == 0) mime = "image/jpeg";
    else if (bytes.size() > 12 && bytes.compare(8, 4, "WEBP") == 0) mime = "image/webp";
    return "data:" + mime + ";base64," + base64_encode(bytes);
}

HttpBackend::HttpBackend(HttpBackendConfig config, std::unique_ptr<Transport> transport, Sleeper sleeper)
    : mConfig(std::move(config)),
      mTransport(std::move(transport)),
      mSleep(std::move(sleeper)),
      mInFlight(std::max(1, mConfig.max_in_flight)) {
    validate(mConfig);
    if (!mSleep) mSleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string HttpBackend::api_key() const {
    if (!mTransport->needs_credentials()) return {};
    const char* key = std::getenv(mConfig.api_key_env.c_str());
    if (!key || !*key) fail(ErrorKind::AuthError, "environment variable " + mConfig.api_key_env + " is not set");
    return key;
}

HttpBackend::Reply HttpBackend::post_with_retry(const std::string& path, const json& body) {
    const std::string payload = body.dump();
    const std::string key = api_key();
    SplitMix64 jitter(fnv1a64(payload));
    for (int attempt = 1;; ++attempt) {
        HttpResponse resp;
        {
            mInFlight.acquire();
            try {
                resp = mTransport->post(path, payload, key);
            } catch (const std::exception& e) {
                resp = HttpResponse{0, e.what()};
            }
            mInFlight.release();
        }
        if (resp.status >= 200 && resp.status < 300) {
            json parsed = json::parse(resp.body, nullptr, false);
            if (parsed.is_discarded()) fail(ErrorKind::TransportError, path + ": response is not JSON");
            return Reply{std::move(parsed), attempt};
        }
        if (resp.status == 401 || resp.status == 403) {
            fail(ErrorKind::AuthError, path + ": credentials rejected (HTTP " + std::to_string(resp.status) + ")");
        }
        if (resp.status == 400 && resp.body.find("content_policy_violation") != std::string::npos) {
            fail(ErrorKind::ContentRejected, path + ": prompt rejected by content policy");
        }
        const bool retryable = resp.status == 0 || resp.status == 429 || resp.status >= 500;
        if (!retryable) {
            fail(ErrorKind::TransportError, path + ": HTTP " + std::to_string(resp.status) + ": " + resp.body);
        }
        if (attempt >= mConfig.retry.max_attempts) {
            if (resp.status == 429) {
                fail(ErrorKind::RateLimited, path + ": still rate limited after " + std::to_string(attempt) + " attempts");
            }
            fail(ErrorKind::TransportError,
                 path + ": giving up after " + std::to_string(attempt) + " attempts: " +
                     (resp.status ? "HTTP " + std::to_string(resp.status) : resp.body));
        }
        const double scale = std::ldexp(1.0, attempt - 1) * (0.5 + jitter.uniform());
        mSleep(std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(mConfig.retry.base_backoff.count()) * scale)));
    }
}

json HttpBackend::chat_body(const ChatRequest& request) const {
    json messages = json::array();
    for (const auto& m : request.messages) {
        if (m.image) {
            messages.push_back({{"role", m.role},
                                {"content", json::array({{{"type", "text"}, {"text", m.text}},
                                                         {{"type", "image_url"},
                                                          {"image_url", {{"url", image_url(*m.image)}}}}})}});
        } else {
            messages.push_back({{"role", m.role}, {"content", m.text}});
        }
    }
    json body{{"model", mConfig.chat_model}, {"messages", messages}, {"temperature", request.temperature}};
    if (request.seed) body["seed"] = *request.seed;
    return body;
}

json HttpBackend::image_body(std::string_view prompt, const ImageOptions& options) const {
    return json{{"model", mConfig.image_model},
                {"prompt", prompt},
                {"n", 1},
                {"size", std::to_string(options.width) + "x" + std::to_string(options.height)},
                {"quality", to_string(options.quality)},
                {"response_format", "b64_json"}};
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
    if (request.messages.empty()) fail(ErrorKind::InvalidArgument, "chat request has no messages");
    const Reply r = post_with_retry("/v1/chat/completions", chat_body(request));
    try {
        return ChatResponse{r.body.at("choices").at(0).at("message").at("content").get<std::string>(), r.attempts};
    } catch (const json::exception& e) {
        fail(ErrorKind::TransportError, std::string("unexpected chat response shape: ") + e.what());
    }
}

EmbeddingResponse HttpBackend::parse_embedding(const Reply& reply) const {
    std::vector<double> values;
    try {
        values = reply.body.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::TransportError, std::string("unexpected embedding response shape: ") + e.what());
    }
    if (values.size() != mConfig.embedding_dim) {
        fail(ErrorKind::DimensionMismatch, "embedding endpoint returned " + std::to_string(values.size()) +
                                               " values, expected " + std::to_string(mConfig.embedding_dim));
    }
    // Endpoints usually return unit vectors already; rescale to enforce the contract.
    double sq = 0.0;
    for (double v : values) sq += v * v;
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (double& v : values) v *= inv;
    }
    return {std::move(values), reply.attempts};
}

EmbeddingResponse HttpBackend::embed_text(std::string_view text) {
    return parse_embedding(post_with_retry("/v1/embeddings", json{{"model", mConfig.embedding_model}, {"input", text}}));
}

EmbeddingResponse HttpBackend::embed_image(const ImageRef& image) {
    const json body{{"model", mConfig.embedding_model}, {"input", json::array({{{"image", image_url(image)}}})}};
    return parse_embedding(post_with_retry("/v1/embeddings", body));
}

ImageResponse HttpBackend::generate(std::string_view prompt, const ImageOptions& options) {
    const Reply r = post_with_retry("/v1/images/generations", image_body(prompt, options));
    try {
        const auto& item = r.body.at("data").at(0);
        if (item.contains("b64_json")) {
            std::string bytes = base64_decode(item.at("b64_json").get<std::string>());
            return {ImageRef{"generated://" + digest(bytes), std::move(bytes)}, r.attempts};
        }
        return {ImageRef{item.at("url").get<std::string>(), {}}, r.attempts};
    } catch (const json::exception& e) {
        fail(ErrorKind::TransportError, std::string("unexpected image response shape: ") + e.what());
    }
}

} // namespace tmplevo
