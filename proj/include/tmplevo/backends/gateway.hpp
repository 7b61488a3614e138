// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tmplevo/backends/backend.hpp"
#include "tmplevo/backends/ledger.hpp"

namespace tmplevo {

/// Instrumented access to the providers. Every call is checked against its
/// precondition, charged to the shared ledger under this gateway's phase and
/// appended to a local event buffer. Scoped copies share providers and the
/// ledger but own their buffers, so concurrent work can be logged
/// independently and merged in a fixed order afterwards.
class Gateway {
public:
    Gateway(ChatBackend& chat, ImageGenerator& images, EmbeddingProvider& embedder, CostLedger& ledger);

    [[nodiscard]] Gateway scoped(std::string phase, int generation = -1, int member = -1) const;

    std::string chat(const ChatRequest& request);
    ImageRef generate_image(std::string_view prompt, const ImageOptions& options = {});

    /// Embeds with `provider`, or the default (fitness) embedder when null.
    EmbeddingVector embed_text(std::string_view text, EmbeddingProvider* provider = nullptr,
                               std::string_view slot = "fitness");
    EmbeddingVector embed_image(const ImageRef& image, EmbeddingProvider* provider = nullptr,
                                std::string_view slot = "fitness");

    /// Logs a non-call event (fitness breakdown, selection, abort).
    void note(std::string_view type, json payload);

    [[nodiscard]] std::vector<json> take_events();
    void absorb(std::vector<json> events);

    [[nodiscard]] const std::string& phase() const { return mPhase; }
    [[nodiscard]] CostLedger& ledger() const { return *mLedger; }
    [[nodiscard]] bool deterministic() const { return mChat->deterministic(); }

private:
    json event_base(std::string_view type) const;
    void record_call(json event, const LedgerDelta& delta);
    EmbeddingVector checked_embedding(EmbeddingProvider& provider, EmbeddingResponse response) const;

    ChatBackend* mChat;
    ImageGenerator* mImages;
    EmbeddingProvider* mEmbedder;
    CostLedger* mLedger;
    std::string mPhase = "default";
    int mGeneration = -1;
    int mMember = -1;
    std::vector<json> mEvents;
};

} // namespace tmplevo
