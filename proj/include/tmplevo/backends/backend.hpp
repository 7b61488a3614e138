// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Provider interfaces for chat completion, embeddings and image generation.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmplevo/model.hpp"

namespace tmplevo {

enum class OperationKind { Extract, Synthesize, Diff, Common, Mutate, Crossover };

std::string_view to_string(OperationKind kind);
std::optional<OperationKind> parse_operation_kind(std::string_view text);

struct ChatMessage {
    std::string role;
    std::string text;
    std::optional<ImageRef> image;
};

struct ChatRequest {
    OperationKind kind = OperationKind::Extract;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::optional<std::uint64_t> seed;
};

/// Backend result plus the number of transport attempts it took.
struct ChatResponse {
    std::string text;
    int attempts = 1;
};

enum class ImageQuality { Standard, HD };

std::string_view to_string(ImageQuality q);

struct ImageOptions {
    int width = 1024;
    int height = 1024;
    ImageQuality quality = ImageQuality::Standard;
};

struct ImageResponse {
    ImageRef image;
    int attempts = 1;
};

struct EmbeddingResponse {
    std::vector<double> values;
    int attempts = 1;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    /// True when outputs (and reported latencies) must be reproducible.
    [[nodiscard]] virtual bool deterministic() const { return false; }
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    [[nodiscard]] virtual std::size_t dimension() const = 0;
    virtual EmbeddingResponse embed_text(std::string_view text) = 0;
    virtual EmbeddingResponse embed_image(const ImageRef& image) = 0;
};

class ImageGenerator {
public:
    virtual ~ImageGenerator() = default;
    virtual ImageResponse generate(std::string_view prompt, const ImageOptions& options) = 0;
};

/// Canonical JSON of a request; its digest keys the event log and fixtures.
json to_json(const ChatRequest& request);

/// Input-token estimate: UTF-8 characters across all message texts / 4, rounded up.
std::int64_t estimate_tokens(const ChatRequest& request);

} // namespace tmplevo
