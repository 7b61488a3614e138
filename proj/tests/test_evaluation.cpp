// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tmplevo/evaluation.hpp"

using namespace tmplevo;
using Catch::Matchers::WithinAbs;

namespace {

// Bag cosine of two phrase sets with no bucket collisions, scaled by 100.
double bag_oracle(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t shared = 0;
    for (const auto& x : a) shared += b.count(x);
    return 100.0 * static_cast<double>(shared) / std::sqrt(static_cast<double>(a.size() * b.size()));
}

std::set<std::string> image_phrases(const ImageRef& img) {
    const auto p = TagImage::parse(read_image_bytes(img)).phrases();
    return {p.begin(), p.end()};
}

std::set<std::string> prompt_phrases(const std::string& prompt) {
    const auto p = split_prompt(prompt);
    return {p.begin(), p.end()};
}

MetricProviders providers_of(MockBackend& b) { return {&b, &b, &b}; }

} // namespace

TEST_CASE("identical inputs score 100") {
    test::MockRig rig;
    const auto img = TagImage{"a cat", {"style:watercolor", "halo"}}.to_ref();
    CHECK_THAT(subject_similarity(img, img, rig.gw, rig.backend), WithinAbs(100.0, 1e-9));
    CHECK_THAT(style_similarity(img, img, rig.gw, rig.backend), WithinAbs(100.0, 1e-9));
    CHECK_THAT(semantic_similarity("a cat, watercolor", std::string("a cat, watercolor"), rig.gw, rig.backend),
               WithinAbs(100.0, 1e-9));
}

TEST_CASE("half-shared and disjoint phrase sets") {
    test::MockRig rig;
    const auto v = collision_free_vocabulary();
    const auto a = TagImage{v[0], {v[1], v[2], v[3]}}.to_ref();
    const auto b = TagImage{v[0], {v[1], v[4], v[5]}}.to_ref();
    const auto c = TagImage{v[6], {v[7], v[8], v[9]}}.to_ref();
    CHECK_THAT(style_similarity(a, b, rig.gw, rig.backend), WithinAbs(50.0, 1e-9));
    CHECK_THAT(style_similarity(a, c, rig.gw, rig.backend), WithinAbs(0.0, 1e-9));
    CHECK_THAT(semantic_similarity(v[0] + ", " + v[1], v[0] + ", " + v[2], rig.gw, rig.backend),
               WithinAbs(50.0, 1e-9));
}

TEST_CASE("semantic similarity needs ground truth") {
    test::MockRig rig;
    try {
        semantic_similarity("a cat", std::nullopt, rig.gw, rig.backend);
        FAIL("expected MissingGroundTruth");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingGroundTruth);
    }
}

TEST_CASE("ground truth rendering") {
    CHECK(render_ground_truth("[subject], watercolor", "a fox") == "a fox, watercolor");
    CHECK(render_ground_truth("watercolor, soft light", "a fox") == "a fox, watercolor, soft light");
}

TEST_CASE("metrics match the tag-bag oracle") {
    for (std::uint64_t seed : {0u, 1u}) {
        const auto world = make_mock_world({.seed = seed});
        const auto& g = world[0].group;
        test::MockRig rig;
        SplitMix64 rng(seed + 100);
        for (const auto& tmpl : {world[0].hidden, test::random_template(rng, collision_free_vocabulary())}) {
            const auto [in, out] = evaluate_template(tmpl, g, rig.gw, providers_of(rig.backend));
            REQUIRE(in.rows.size() == kInDomainCount);
            REQUIRE(out.rows.size() == kOutDomainCount);
            std::vector<const BenchmarkImage*> targets;
            for (const auto& b : g.in_domain) targets.push_back(&b);
            for (const auto& b : g.out_domain) targets.push_back(&b);
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const auto& row = i < kInDomainCount ? in.rows[i] : out.rows[i - kInDomainCount];
                const auto generated = prompt_phrases(render_template(tmpl, row.subject));
                const double img = bag_oracle(generated, image_phrases(targets[i]->image));
                const double txt =
                    bag_oracle(generated, prompt_phrases(render_ground_truth(*g.ground_truth_template, row.subject)));
                CHECK_THAT(*row.scores[0], WithinAbs(img, 1e-9));
                CHECK_THAT(*row.scores[1], WithinAbs(img, 1e-9));
                CHECK_THAT(*row.scores[2], WithinAbs(txt, 1e-9));
                CHECK_THAT(*row.scores[3], WithinAbs(img, 1e-9));
                CHECK_THAT(*row.scores[4], WithinAbs(txt, 1e-9));
                for (const auto& s : row.scores) {
                    CHECK(*s >= -100.0);
                    CHECK(*s <= 100.0);
                }
            }
            CHECK_THAT(in.average, WithinAbs(*average_of(in.scores), 1e-12));
            CHECK_THAT(out.average, WithinAbs(*average_of(out.scores), 1e-12));
        }
    }
}

TEST_CASE("evaluation generates exactly nine images") {
    const auto world = make_mock_world({.seed = 3});
    test::MockRig rig;
    auto eval = rig.gw.scoped("eval");
    evaluate_template(world[0].hidden, world[0].group, eval, providers_of(rig.backend));
    const auto d = rig.ledger.snapshot().phase("eval");
    CHECK(d.images == 9);
    CHECK(d.chat == 0);
    CHECK(eval.take_events().size() > 9);
}

TEST_CASE("the hidden template beats a random one") {
    const auto vocab = collision_free_vocabulary();
    SplitMix64 rng(4);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto world = make_mock_world({.seed = seed});
        test::MockRig rig;
        const auto hidden = evaluate_template(world[0].hidden, world[0].group, rig.gw, providers_of(rig.backend));
        const auto random = evaluate_template(test::random_template(rng, vocab), world[0].group, rig.gw,
                                              providers_of(rig.backend));
        CHECK(hidden.first.average > random.first.average);
        CHECK(hidden.second.average > random.second.average);
    }
}

TEST_CASE("missing ground truth only drops the text metrics") {
    auto world = make_mock_world({.seed = 5});
    auto g = world[0].group;
    g.ground_truth_template.reset();
    test::MockRig rig;
    const auto [in, out] = evaluate_template(world[0].hidden, g, rig.gw, providers_of(rig.backend));
    for (const auto* r : {&in, &out}) {
        CHECK(r->scores[0].has_value());
        CHECK(r->scores[1].has_value());
        CHECK_FALSE(r->scores[2].has_value());
        CHECK(r->scores[3].has_value());
        CHECK_FALSE(r->scores[4].has_value());
        for (const auto& row : r->rows) CHECK(row.error.has_value());
    }
}

TEST_CASE("failed generations mark their rows") {
    const auto world = make_mock_world({.seed = 5});
    const auto& g = world[0].group;
    MockBackend backend(MockOptions{256, {g.subjects[0]}});
    CostLedger ledger;
    Gateway gw(backend, backend, backend, ledger);
    const auto [in, out] = evaluate_template(world[0].hidden, g, gw, providers_of(backend));
    std::size_t failed = 0;
    for (const auto& row : in.rows) {
        if (row.error) {
            ++failed;
            CHECK_FALSE(row.scores[0].has_value());
            CHECK(row.scores[2].has_value());
        }
    }
    CHECK(failed == 1);
    CHECK(in.scores[0].has_value());
}

TEST_CASE("missing providers are rejected") {
    const auto world = make_mock_world({.seed = 5});
    test::MockRig rig;
    CHECK_THROWS_AS(evaluate_template(world[0].hidden, world[0].group, rig.gw, MetricProviders{}), Error);
}

TEST_CASE("reference rows average to their stated values") {
    const auto easy = report_from_scores("easy", Difficulty::Easy, Split::InDomain, {75.83, 85.30, 74.41, 89.14, 72.75});
    CHECK_THAT(easy.average, WithinAbs(79.49, 0.01));
    const auto hard = report_from_scores("hard", Difficulty::Hard, Split::InDomain, {69.24, 81.34, 70.61, 85.28, 69.27});
    const auto summary = aggregate_benchmark(std::vector<MetricReport>{hard});
    REQUIRE(summary.aggregates.size() == 1);
    CHECK_THAT(summary.aggregates[0].average, WithinAbs(75.15, 0.01));
}

TEST_CASE("a row whose stated average disagrees with its cells gets the mean") {
    const auto r = report_from_scores("x", Difficulty::Easy, Split::InDomain, {75.14, 83.91, 74.18, 85.75, 73.53});
    CHECK_THAT(r.average, WithinAbs(78.50, 0.01));
    CHECK(std::abs(r.average - 79.10) > 0.5);
}

TEST_CASE("aggregation of one report is that report") {
    const auto r = report_from_scores("g", Difficulty::Hard, Split::OutOfDomain, {1, 2, 3, 4, 5});
    const auto s = aggregate_benchmark(std::vector<MetricReport>{r});
    REQUIRE(s.aggregates.size() == 1);
    CHECK(s.aggregates[0].scores == r.scores);
    CHECK(s.aggregates[0].average == r.average);
    CHECK(s.aggregates[0].groups == 1);
}

TEST_CASE("aggregation takes column-wise midpoints") {
    const auto a = report_from_scores("a", Difficulty::Easy, Split::InDomain, {10, 20, 30, 40, 50});
    const auto b = report_from_scores("b", Difficulty::Easy, Split::InDomain, {30, 40, 50, 60, 70});
    const auto c = report_from_scores("c", Difficulty::Hard, Split::InDomain, {0, 0, 0, 0, 0});
    const auto s = aggregate_benchmark(std::vector<MetricReport>{a, b, c});
    REQUIRE(s.aggregates.size() == 2);
    const auto& easy = s.aggregates[0];
    CHECK(easy.difficulty == Difficulty::Easy);
    for (std::size_t k = 0; k < 5; ++k) CHECK_THAT(*easy.scores[k], WithinAbs(20.0 + 10.0 * k, 1e-12));
    CHECK_THAT(easy.average, WithinAbs(40.0, 1e-12));
    CHECK(s.aggregates[1].difficulty == Difficulty::Hard);
    CHECK_THROWS_AS(aggregate_benchmark(std::vector<MetricReport>{}), Error);
}

TEST_CASE("CSV keeps the fixed column order") {
    const auto a = report_from_scores("grp", Difficulty::Easy, Split::OutOfDomain, {1, 2, 3, 4, 5});
    const auto csv = aggregate_benchmark(std::vector<MetricReport>{a}).to_csv();
    CHECK(csv ==
          "group_id,difficulty,split,DINO,CLIP_img,CLIP_txt,SigLIP_img,SigLIP_txt,Average\n"
          "grp,easy,OutOfDomain,1.0000,2.0000,3.0000,4.0000,5.0000,3.0000\n"
          "ALL,easy,OutOfDomain,1.0000,2.0000,3.0000,4.0000,5.0000,3.0000\n");
    const auto j = to_json(a);
    CHECK(j["scores"]["SigLIP_txt"] == 5.0);
    CHECK(j["split"] == "OutOfDomain");
}
