// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tmplevo/manifest.hpp"

using namespace tmplevo;

namespace {

json one_group() {
    json in = json::array(), out = json::array();
    for (int i = 0; i < 5; ++i) in.push_back({{"subject_index", i}, {"image_path", "img/" + std::to_string(i) + ".png"}});
    for (int i = 5; i < 9; ++i) out.push_back({{"subject_index", i}, {"image_path", "img/" + std::to_string(i) + ".png"}});
    json subjects = json::array();
    for (int i = 0; i < 9; ++i) subjects.push_back("subject " + std::to_string(i));
    return json{{"group_id", "g1"},
                {"difficulty", "hard"},
                {"ground_truth_template", nullptr},
                {"subjects", subjects},
                {"in_domain", in},
                {"out_domain", out}};
}

ErrorKind parse_kind(const json& doc) {
    try {
        parse_manifest(doc, ".", false);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("manifest parses a well-formed group") {
    const auto groups = parse_manifest(json::array({one_group()}), "/data", false);
    REQUIRE(groups.size() == 1);
    const auto& g = groups[0];
    CHECK(g.group_id == "g1");
    CHECK(g.difficulty == Difficulty::Hard);
    CHECK_FALSE(g.ground_truth_template.has_value());
    CHECK(g.in_domain.size() == 5);
    CHECK(g.out_domain.size() == 4);
    CHECK(g.subject_of(g.out_domain[0]) == "subject 5");
    CHECK(g.in_domain[2].image.uri == "/data/img/2.png");
}

TEST_CASE("manifest structural errors") {
    json doc = one_group();
    doc["subjects"].erase(0);
    CHECK(parse_kind(json::array({doc})) == ErrorKind::ManifestError);

    doc = one_group();
    doc["in_domain"][0]["subject_index"] = 6;
    CHECK(parse_kind(json::array({doc})) == ErrorKind::ManifestError);

    doc = one_group();
    doc["difficulty"] = "medium";
    CHECK(parse_kind(json::array({doc})) == ErrorKind::ManifestError);

    CHECK(parse_kind(json::array({one_group(), one_group()})) == ErrorKind::ManifestError);
    CHECK(parse_kind(json::object()) == ErrorKind::ManifestError);
}

TEST_CASE("missing image files name the path") {
    try {
        parse_manifest(json::array({one_group()}), "/nonexistent", true);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ManifestError);
        CHECK(std::string(e.what()).find("/nonexistent/img/0.png") != std::string::npos);
    }
}

TEST_CASE("unknown group ids are rejected") {
    const auto groups = parse_manifest(json::array({one_group()}), ".", false);
    CHECK(&find_group(groups, "g1") == &groups[0]);
    CHECK_THROWS_AS(find_group(groups, "g2"), Error);
}

TEST_CASE("written mock worlds load back") {
    test::TempDir dir;
    const auto world = make_mock_world({.seed = 3, .groups = 2});
    const auto path = write_mock_world(world, dir.path());
    const auto groups = load_manifest(path);
    REQUIRE(groups.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(groups[i].group_id == world[i].group.group_id);
        CHECK(groups[i].ground_truth_template == world[i].group.ground_truth_template);
        CHECK(read_image_bytes(groups[i].in_domain[4].image) == read_image_bytes(world[i].group.in_domain[4].image));
    }
}
