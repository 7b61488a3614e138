// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test doubles and generators.

#pragma once

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "tmplevo/backends/backend.hpp"
#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/backends/mock.hpp"
#include "tmplevo/error.hpp"
#include "tmplevo/mock_world.hpp"
#include "tmplevo/model.hpp"
#include "tmplevo/rng.hpp"

namespace tmplevo::test {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "tmplevo-test-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        mPath = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(mPath, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return mPath; }
    fs::path operator/(const std::string& name) const { return mPath / name; }

private:
    fs::path mPath;
};

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

/// Replies from a queue; once the queue is empty, repeats the last reply.
class ScriptedChat final : public ChatBackend {
public:
    explicit ScriptedChat(std::vector<std::string> replies) : mReplies(replies.begin(), replies.end()) {}

    ChatResponse complete(const ChatRequest& request) override {
        std::lock_guard lock(mMutex);
        requests.push_back(request);
        if (mReplies.size() > 1) {
            std::string r = mReplies.front();
            mReplies.pop_front();
            return {r, 1};
        }
        return {mReplies.empty() ? std::string() : mReplies.front(), 1};
    }
    [[nodiscard]] bool deterministic() const override { return true; }

    std::vector<ChatRequest> requests;

private:
    std::mutex mMutex;
    std::deque<std::string> mReplies;
};

/// Embeddings looked up by text or image uri; unknown inputs get e_0.
class StubEmbedder final : public EmbeddingProvider {
public:
    explicit StubEmbedder(std::size_t dim) : mDim(dim) {}

    void set_text(const std::string& text, std::vector<double> v) { mText[text] = std::move(v); }
    void set_image(const std::string& uri, std::vector<double> v) { mImage[uri] = std::move(v); }

    [[nodiscard]] std::size_t dimension() const override { return mDim; }
    EmbeddingResponse embed_text(std::string_view text) override { return {lookup(mText, std::string(text)), 1}; }
    EmbeddingResponse embed_image(const ImageRef& image) override { return {lookup(mImage, image.uri), 1}; }

private:
    std::vector<double> lookup(const std::map<std::string, std::vector<double>>& m, const std::string& k) const {
        auto it = m.find(k);
        if (it != m.end()) return it->second;
        std::vector<double> v(mDim, 0.0);
        v[0] = 1.0;
        return v;
    }
    std::size_t mDim;
    std::map<std::string, std::vector<double>> mText, mImage;
};

/// Returns "probe://<prompt>" references.
class EchoImages final : public ImageGenerator {
public:
    ImageResponse generate(std::string_view prompt, const ImageOptions&) override {
        return {ImageRef{"probe://" + std::string(prompt), {}}, 1};
    }
};

/// Random unit vector of dimension `dim`.
inline std::vector<double> random_unit(SplitMix64& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double sq = 0.0;
    for (auto& x : v) {
        x = rng.uniform() * 2.0 - 1.0;
        sq += x * x;
    }
    for (auto& x : v) x /= std::sqrt(sq);
    return v;
}

/// Random template drawing phrases from `vocab`; every phrase is used at most once.
inline PromptTemplate random_template(SplitMix64& rng, const std::vector<std::string>& vocab, std::size_t max_phrases = 8) {
    Modifiers m;
    std::vector<std::string> supplements;
    const auto n = static_cast<std::size_t>(rng.below(max_phrases + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& phrase = vocab[static_cast<std::size_t>(rng.below(vocab.size()))];
        const auto slot = rng.below(5);
        if (slot == 4) append_unique(supplements, phrase);
        else m.add(kModifierCategories[slot], phrase);
    }
    return PromptTemplate(std::move(m), std::move(supplements));
}

/// Template from a small shared pool so random pairs overlap.
inline PromptTemplate random_overlapping_template(SplitMix64& rng) {
    static const std::vector<std::string> pool = [] {
        auto v = collision_free_vocabulary();
        v.resize(16);
        return v;
    }();
    return random_template(rng, pool, 10);
}

struct MockRig {
    MockBackend backend;
    CostLedger ledger;
    Gateway gw{backend, backend, backend, ledger};
};

} // namespace tmplevo::test
