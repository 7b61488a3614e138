// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tmplevo/backends/mock.hpp"
#include "tmplevo/kernels/similarity.hpp"

using namespace tmplevo;
using Catch::Matchers::WithinAbs;

namespace {

ChatRequest extract_request(const TagImage& img) {
    ChatRequest req;
    req.kind = OperationKind::Extract;
    req.messages.push_back({"user", "describe", img.to_ref()});
    return req;
}

double bag_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
    return d;
}

} // namespace

TEST_CASE("mock extract partitions tags by prefix") {
    MockBackend mock;
    const TagImage img{"a fox", {"style:watercolor", "mood:serene", "glowing edges"}};
    const auto t = parse_triple(mock.complete(extract_request(img)).text);
    ElementTriple expected;
    expected.subject = "a fox";
    expected.modifiers.add(ModifierCategory::ArtisticStyle, "watercolor");
    expected.modifiers.add(ModifierCategory::AestheticEmotionalAtmosphere, "serene");
    expected.supplements = {"glowing edges"};
    CHECK(t == expected);
}

TEST_CASE("mock extract of an image without tags") {
    MockBackend mock;
    const auto t = parse_triple(mock.complete(extract_request(TagImage{"a fox", {}})).text);
    CHECK(t.subject == "a fox");
    CHECK(t.modifiers.empty());
    CHECK(t.supplements.empty());
}

TEST_CASE("mock rejects requests without messages") {
    MockBackend mock;
    ChatRequest req;
    CHECK_THROWS_AS(mock.complete(req), Error);
}

TEST_CASE("mock text embedding is pure") {
    MockBackend mock;
    CHECK(mock.embed_text("watercolor").values == mock.embed_text("watercolor").values);
}

TEST_CASE("mock embeddings of disjoint and identical bags") {
    MockBackend mock;
    const auto vocab = collision_free_vocabulary();
    const TagImage a{vocab[0], {vocab[1], vocab[2]}};
    const TagImage b{vocab[3], {vocab[4]}};
    const auto ea = mock.embed_image(a.to_ref()).values;
    CHECK_THAT(bag_cosine(ea, mock.embed_image(b.to_ref()).values), WithinAbs(0.0, 1e-9));
    CHECK_THAT(bag_cosine(ea, ea), WithinAbs(1.0, 1e-9));
    // Text and image embeddings share the bag space.
    const auto et = mock.embed_text(vocab[0] + ", " + vocab[1] + ", " + vocab[2]).values;
    CHECK_THAT(bag_cosine(ea, et), WithinAbs(1.0, 1e-9));
}

TEST_CASE("mock image generation realizes the rendered template") {
    MockBackend mock;
    Modifiers m;
    m.add(ModifierCategory::ArtisticStyle, "watercolor");
    m.add(ModifierCategory::MediumMaterial, "rice paper");
    const PromptTemplate t(m, {"soft grain"});
    const auto img = TagImage::parse(read_image_bytes(mock.generate(render_template(t, "a heron"), {}).image));
    CHECK(img.subject == "a heron");
    std::set<std::string> bag(img.tags.begin(), img.tags.end());
    bag.insert(img.subject);
    auto expected = phrase_set(t);
    expected.insert("a heron");
    CHECK(bag == expected);
}

TEST_CASE("mock image generation refuses empty and rejected prompts") {
    MockOptions options;
    options.rejected_phrases = {"forbidden"};
    MockBackend mock(options);
    CHECK_THROWS_AS(mock.generate(" , ", {}), Error);
    try {
        mock.generate("a cat, forbidden", {});
        FAIL("expected ContentRejected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ContentRejected);
    }
}

TEST_CASE("prompt splitting trims and drops empty pieces") {
    CHECK(split_prompt(" a cat ,watercolor,, soft grain ") == std::vector<std::string>{"a cat", "watercolor", "soft grain"});
    CHECK(split_prompt("").empty());
}

TEST_CASE("payload wrapping round trip") {
    const json payload{{"a", 1}, {"b", {"x", "y"}}};
    ChatRequest req;
    req.messages.push_back({"user", "intro\n" + wrap_payload(payload) + "\noutro", std::nullopt});
    CHECK(find_payload(req) == payload);
}
