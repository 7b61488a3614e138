// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/backends/mock.hpp"

#include <algorithm>

#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"
#include "tmplevo/kernels/similarity.hpp"
#include "tmplevo/rng.hpp"

namespace tmplevo {

namespace {

constexpr std::string_view kPayloadOpen = "<input>";
constexpr std::string_view kPayloadClose = "</input>";
constexpr std::string_view kSupplementTag = "supplement";

const ImageRef* last_image(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->image) return &*it->image;
    }
    return nullptr;
}

json require_payload(const ChatRequest& request) {
    auto p = find_payload(request);
    if (!p) fail(ErrorKind::InvalidArgument, "mock backend: request carries no <input> payload");
    return *p;
}

std::vector<ElementTriple> triples_from(const json& arr) {
    std::vector<ElementTriple> out;
    for (const auto& t : arr) out.push_back(parse_triple(t.dump()));
    return out;
}

bool contains(const std::vector<std::string>& list, const std::string& x) {
    return std::find(list.begin(), list.end(), x) != list.end();
}

json template_reply(const Modifiers& m, const std::vector<std::string>& supplements) {
    return json{{"modifiers", to_json(m)}, {"supplements", supplements}};
}

// Intersection across all triples (first triple's order), plus everything in
// the emphasized triple.
json mock_synthesize(const json& payload) {
    const bool include_supplements = payload.value("include_supplements", true);
    if (payload.contains("template")) {
        PromptTemplate t = template_from_json(payload.at("template"));
        if (!include_supplements) t = t.without_supplements();
        return template_reply(t.modifiers(), t.supplements());
    }
    const auto triples = triples_from(payload.at("triples"));
    if (triples.empty()) fail(ErrorKind::InvalidArgument, "mock synthesize: no triples");
    Modifiers m;
    std::vector<std::string> supplements;
    for (auto c : kModifierCategories) {
        for (const auto& p : triples.front().modifiers.at(c)) {
            if (std::all_of(triples.begin(), triples.end(),
                            [&](const ElementTriple& t) { return t.modifiers.contains(c, p); })) {
                m.add(c, p);
            }
        }
    }
    for (const auto& s : triples.front().supplements) {
        if (std::all_of(triples.begin(), triples.end(),
                        [&](const ElementTriple& t) { return contains(t.supplements, s); })) {
            append_unique(supplements, s);
        }
    }
    const auto& emphasis = payload.value("emphasis", json(nullptr));
    if (!emphasis.is_null()) {
        const auto& t = triples.at(emphasis.get<std::size_t>() % triples.size());
        m.merge(t.modifiers);
        for (const auto& s : t.supplements) append_unique(supplements, s);
    }
    if (!include_supplements) supplements.clear();
    return template_reply(m, supplements);
}

json mock_diff(const json& payload) {
    const auto a = template_from_json(payload.at("a"));
    const auto b = template_from_json(payload.at("b"));
    json diffs = json::array();
    for (auto c : kModifierCategories) {
        for (const auto& p : a.modifiers().at(c)) {
            if (!b.modifiers().contains(c, p)) diffs.push_back({{"category", display_name(c)}, {"phrase", p}, {"source", "a"}});
        }
        for (const auto& p : b.modifiers().at(c)) {
            if (!a.modifiers().contains(c, p)) diffs.push_back({{"category", display_name(c)}, {"phrase", p}, {"source", "b"}});
        }
    }
    return json{{"differences", diffs}};
}

json mock_common(const json& payload) {
    const auto a = template_from_json(payload.at("a"));
    const auto b = template_from_json(payload.at("b"));
    std::vector<std::string> common;
    for (const auto& s : a.supplements()) {
        if (contains(b.supplements(), s)) common.push_back(s);
    }
    return json{{"common", common}};
}

json mock_mutate(const json& payload, std::uint64_t seed) {
    const double f = payload.at("mutation_factor").get<double>();
    SplitMix64 rng(seed);
    Modifiers m;
    for (const auto& d : payload.at("differences")) {
        const auto c = parse_category(d.at("category").get<std::string>());
        if (!c) fail(ErrorKind::SchemaViolation, "mock mutate: unknown category");
        if (rng.uniform() < f) m.add(*c, d.at("phrase").get<std::string>());
    }
    return template_reply(m, payload.at("common").get<std::vector<std::string>>());
}

json mock_crossover(const json& payload, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Modifiers m;
    std::vector<std::string> supplements;
    for (const auto& d : payload.at("differing")) {
        const bool take = rng.uniform() < 0.5;
        if (!take) continue;
        const auto category = d.at("category").get<std::string>();
        const auto phrase = d.at("phrase").get<std::string>();
        if (category == kSupplementTag) {
            append_unique(supplements, phrase);
        } else if (const auto c = parse_category(category)) {
            m.add(*c, phrase);
        } else {
            fail(ErrorKind::SchemaViolation, "mock crossover: unknown category");
        }
    }
    return template_reply(m, supplements);
}

} // namespace

std::vector<std::string> TagImage::phrases() const {
    std::vector<std::string> out{subject};
    for (const auto& t : tags) out.push_back(strip_tag_prefix(t));
    return out;
}

std::string TagImage::serialize() const {
    return json{{"subject", subject}, {"tags", tags}}.dump();
}

TagImage TagImage::parse(std::string_view bytes) {
    const json j = json::parse(bytes, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("subject") || !j.contains("tags")) {
        fail(ErrorKind::InputError, "not a tag-world image record");
    }
    TagImage img;
    img.subject = j.at("subject").get<std::string>();
    img.tags = j.at("tags").get<std::vector<std::string>>();
    return img;
}

ImageRef TagImage::to_ref() const {
    std::string bytes = serialize();
    return ImageRef{"mock://image/" + digest(bytes), std::move(bytes)};
}

std::string strip_tag_prefix(std::string_view tag) {
    if (tag_category(tag)) return trim(tag.substr(tag.find(':') + 1));
    return trim(tag);
}

std::optional<ModifierCategory> tag_category(std::string_view tag) {
    const auto colon = tag.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const auto prefix = tag.substr(0, colon);
    for (auto c : kModifierCategories) {
        if (prefix == tag_prefix(c)) return c;
    }
    return std::nullopt;
}

std::string make_tag(ModifierCategory category, std::string_view phrase) {
    return std::string(tag_prefix(category)) + ":" + std::string(phrase);
}

std::vector<std::string> split_prompt(std::string_view prompt) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= prompt.size()) {
        const auto comma = prompt.find(',', start);
        const auto end = comma == std::string_view::npos ? prompt.size() : comma;
        std::string piece = trim(prompt.substr(start, end - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string wrap_payload(const json& payload) {
    return std::string(kPayloadOpen) + "\n" + payload.dump() + "\n" + std::string(kPayloadClose);
}

std::optional<json> find_payload(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        const auto open = it->text.find(kPayloadOpen);
        if (open == std::string::npos) continue;
        const auto begin = open + kPayloadOpen.size();
        const auto close = it->text.find(kPayloadClose, begin);
        if (close == std::string::npos) continue;
        json j = json::parse(it->text.substr(begin, close - begin), nullptr, false);
        if (!j.is_discarded()) return j;
    }
    return std::nullopt;
}

MockBackend::MockBackend(MockOptions options) : mOptions(std::move(options)) {
    if (mOptions.dim == 0) fail(ErrorKind::InvalidArgument, "mock embedding dimension must be positive");
}

ChatResponse MockBackend::complete(const ChatRequest& request) {
    if (request.messages.empty()) fail(ErrorKind::InvalidArgument, "chat request has no messages");
    const std::uint64_t seed = request.seed.value_or(0);
    json reply;
    switch (request.kind) {
        case OperationKind::Extract: {
            const ImageRef* image = last_image(request);
            if (!image) fail(ErrorKind::InvalidArgument, "mock extract: no image attached");
            const TagImage img = TagImage::parse(read_image_bytes(*image));
            ElementTriple t;
            t.subject = img.subject;
            for (const auto& tag : img.tags) {
                if (const auto c = tag_category(tag)) t.modifiers.add(*c, strip_tag_prefix(tag));
                else append_unique(t.supplements, tag);
            }
            reply = to_json(t);
            break;
        }
        case OperationKind::Synthesize: reply = mock_synthesize(require_payload(request)); break;
        case OperationKind::Diff: reply = mock_diff(require_payload(request)); break;
        case OperationKind::Common: reply = mock_common(require_payload(request)); break;
        case OperationKind::Mutate: reply = mock_mutate(require_payload(request), seed); break;
        case OperationKind::Crossover: reply = mock_crossover(require_payload(request), seed); break;
    }
    return ChatResponse{reply.dump(), 1};
}

EmbeddingResponse MockBackend::embed_text(std::string_view text) {
    const auto phrases = split_prompt(text);
    const auto v = kernels::embed_bag(phrases, mOptions.dim);
    return {std::vector<double>(v.values().begin(), v.values().end()), 1};
}

EmbeddingResponse MockBackend::embed_image(const ImageRef& image) {
    const auto phrases = TagImage::parse(read_image_bytes(image)).phrases();
    const auto v = kernels::embed_bag(phrases, mOptions.dim);
    return {std::vector<double>(v.values().begin(), v.values().end()), 1};
}

ImageResponse MockBackend::generate(std::string_view prompt, const ImageOptions&) {
    auto phrases = split_prompt(prompt);
    if (phrases.empty()) fail(ErrorKind::InvalidArgument, "image prompt must be non-empty");
    for (const auto& p : phrases) {
        if (mOptions.rejected_phrases.count(p)) {
            fail(ErrorKind::ContentRejected, "mock generator refused phrase '" + p + "'");
        }
    }
    TagImage img;
    img.subject = phrases.front();
    img.tags.assign(phrases.begin() + 1, phrases.end());
    return {img.to_ref(), 1};
}

} // namespace tmplevo
