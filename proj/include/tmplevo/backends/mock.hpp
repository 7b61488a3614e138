// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic "tag world" backend. An image is a record {subject, tags};
// tags carry a category prefix ("style:", "comp:", "mood:", "med:") or none
// (a supplement). Embeddings are hashed bag-of-phrases vectors and every chat
// operation is an exact set operation, so each similarity the pipeline
// computes has a closed form.

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tmplevo/backends/backend.hpp"

namespace tmplevo {

struct TagImage {
    std::string subject;
    std::vector<std::string> tags;

    /// Subject followed by every tag with its category prefix removed.
    [[nodiscard]] std::vector<std::string> phrases() const;
    [[nodiscard]] std::string serialize() const;
    static TagImage parse(std::string_view bytes);

    [[nodiscard]] ImageRef to_ref() const;
};

/// "style:watercolor" -> "watercolor"; unprefixed tags are returned as is.
std::string strip_tag_prefix(std::string_view tag);
std::optional<ModifierCategory> tag_category(std::string_view tag);
std::string make_tag(ModifierCategory category, std::string_view phrase);

/// Phrases of a rendered prompt: comma-separated pieces, trimmed.
std::vector<std::string> split_prompt(std::string_view prompt);

/// Wraps an operator payload so backends can find it inside a message.
std::string wrap_payload(const json& payload);
std::optional<json> find_payload(const ChatRequest& request);

struct MockOptions {
    std::size_t dim = 256;
    /// Image generation refuses prompts containing any of these phrases.
    std::set<std::string> rejected_phrases;
};

class MockBackend final : public ChatBackend, public EmbeddingProvider, public ImageGenerator {
public:
    explicit MockBackend(MockOptions options = {});

    ChatResponse complete(const ChatRequest& request) override;
    [[nodiscard]] bool deterministic() const override { return true; }

    [[nodiscard]] std::size_t dimension() const override { return mOptions.dim; }
    EmbeddingResponse embed_text(std::string_view text) override;
    EmbeddingResponse embed_image(const ImageRef& image) override;

    ImageResponse generate(std::string_view prompt, const ImageOptions& options) override;

private:
    MockOptions mOptions;
};

} // namespace tmplevo
