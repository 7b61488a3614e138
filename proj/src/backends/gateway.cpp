// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/backends/gateway.hpp"

#include <chrono>

#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"

namespace tmplevo {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

} // namespace

Gateway::Gateway(ChatBackend& chat, ImageGenerator& images, EmbeddingProvider& embedder, CostLedger& ledger)
    : mChat(&chat), mImages(&images), mEmbedder(&embedder), mLedger(&ledger) {}

Gateway Gateway::scoped(std::string phase, int generation, int member) const {
    Gateway g(*mChat, *mImages, *mEmbedder, *mLedger);
    g.mPhase = std::move(phase);
    g.mGeneration = generation;
    g.mMember = member;
    return g;
}

json Gateway::event_base(std::string_view type) const {
    json e{{"type", type}, {"phase", mPhase}};
    if (mGeneration >= 0) e["gen"] = mGeneration;
    if (mMember >= 0) e["member"] = mMember;
    return e;
}

void Gateway::record_call(json event, const LedgerDelta& delta) {
    mLedger->record(mPhase, delta);
    event["delta"] = to_json(delta);
    mEvents.push_back(std::move(event));
}

std::string Gateway::chat(const ChatRequest& request) {
    if (request.messages.empty()) fail(ErrorKind::InvalidArgument, "chat request has no messages");
    if (request.temperature < 0.0) fail(ErrorKind::InvalidArgument, "temperature must be >= 0");
    json e = event_base("call");
    e["call"] = "chat";
    e["op"] = to_string(request.kind);
    e["inputs_hash"] = digest(to_json(request).dump());
    const auto start = Clock::now();
    ChatResponse resp;
    try {
        resp = mChat->complete(request);
    } catch (const Error& err) {
        e["error"] = err.what();
        record_call(std::move(e), {});
        throw;
    }
    e["output_hash"] = digest(resp.text);
    e["latency_ms"] = mChat->deterministic() ? 0 : elapsed_ms(start);
    e["attempts"] = resp.attempts;
    record_call(std::move(e), LedgerDelta{.chat = 1, .tokens = estimate_tokens(request)});
    return std::move(resp.text);
}

ImageRef Gateway::generate_image(std::string_view prompt, const ImageOptions& options) {
    if (trim(prompt).empty()) fail(ErrorKind::InvalidArgument, "image prompt must be non-empty");
    json e = event_base("call");
    e["call"] = "image";
    e["op"] = "generate_image";
    e["inputs_hash"] = digest(json{{"prompt", prompt},
                                   {"size", std::to_string(options.width) + "x" + std::to_string(options.height)},
                                   {"quality", to_string(options.quality)}}
                                  .dump());
    const auto start = Clock::now();
    ImageResponse resp;
    try {
        resp = mImages->generate(prompt, options);
    } catch (const Error& err) {
        e["error"] = err.what();
        record_call(std::move(e), {});
        throw;
    }
    e["output_hash"] = digest(resp.image.data.empty() ? resp.image.uri : resp.image.data);
    e["latency_ms"] = mChat->deterministic() ? 0 : elapsed_ms(start);
    e["attempts"] = resp.attempts;
    record_call(std::move(e), LedgerDelta{.images = 1});
    return std::move(resp.image);
}

EmbeddingVector Gateway::checked_embedding(EmbeddingProvider& provider, EmbeddingResponse response) const {
    if (response.values.size() != provider.dimension()) {
        fail(ErrorKind::DimensionMismatch, "provider returned " + std::to_string(response.values.size()) +
                                               " values, declared " + std::to_string(provider.dimension()));
    }
    return EmbeddingVector(std::move(response.values));
}

EmbeddingVector Gateway::embed_text(std::string_view text, EmbeddingProvider* provider, std::string_view slot) {
    if (trim(text).empty()) fail(ErrorKind::InvalidArgument, "cannot embed empty text");
    EmbeddingProvider& p = provider ? *provider : *mEmbedder;
    json e = event_base("call");
    e["call"] = "embed";
    e["op"] = "embed_text";
    e["slot"] = slot;
    e["inputs_hash"] = digest(text);
    const auto start = Clock::now();
    auto v = checked_embedding(p, p.embed_text(text));
    e["latency_ms"] = mChat->deterministic() ? 0 : elapsed_ms(start);
    record_call(std::move(e), LedgerDelta{.embed = 1});
    return v;
}

EmbeddingVector Gateway::embed_image(const ImageRef& image, EmbeddingProvider* provider, std::string_view slot) {
    if (image.uri.empty() && image.data.empty()) fail(ErrorKind::InvalidArgument, "empty image reference");
    EmbeddingProvider& p = provider ? *provider : *mEmbedder;
    json e = event_base("call");
    e["call"] = "embed";
    e["op"] = "embed_image";
    e["slot"] = slot;
    e["inputs_hash"] = digest(image.data.empty() ? image.uri : image.data);
    const auto start = Clock::now();
    auto v = checked_embedding(p, p.embed_image(image));
    e["latency_ms"] = mChat->deterministic() ? 0 : elapsed_ms(start);
    record_call(std::move(e), LedgerDelta{.embed = 1});
    return v;
}

void Gateway::note(std::string_view type, json payload) {
    json e = event_base(type);
    e["data"] = std::move(payload);
    mEvents.push_back(std::move(e));
}

std::vector<json> Gateway::take_events() {
    std::vector<json> out;
    out.swap(mEvents);
    return out;
}

void Gateway::absorb(std::vector<json> events) {
    for (auto& e : events) mEvents.push_back(std::move(e));
}

} // namespace tmplevo
