// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <catch_amalgamated.hpp>

#include "tmplevo/error.hpp"
#include "tmplevo/run_state.hpp"

using namespace tmplevo;

namespace {

RunState five_member_state() {
    RunState s;
    s.config.seed = 42;
    s.population.generation = 3;
    for (int i = 0; i < 5; ++i) {
        Modifiers m;
        m.add(ModifierCategory::ArtisticStyle, "style " + std::to_string(i));
        m.add(ModifierCategory::MediumMaterial, "medium");
        Individual ind{"g3-i" + std::to_string(i), PromptTemplate(m, {"supp"}), 0.5 + 0.01 * i, 3, {"g2-i0", "g2-i1"}};
        s.population.individuals.push_back(ind);
    }
    s.best = s.population.individuals[4];
    s.history.push_back({0, 0.5, 0.4, {"g0-i0"}});
    s.ledger.by_phase["init"] = LedgerDelta{10, 0, 0, 1600};
    s.ledger.by_phase["de"] = LedgerDelta{75, 150, 15, 30000};
    FitnessBreakdown f;
    f.text_term = 0.8;
    f.image_term = 0.6;
    f.total = 0.7;
    f.cache_key = "abc";
    f.probe_subject_index = 2;
    f.text_cosines = {0.8, 0.8, 0.8, 0.8, 0.8};
    s.fitness_cache["abc"] = f;
    s.events_written = 123;
    return s;
}

} // namespace

TEST_CASE("empty state round trip") {
    const RunState s;
    CHECK(deserialize_run_state(serialize_run_state(s)) == s);
}

TEST_CASE("five member state round trip") {
    const RunState s = five_member_state();
    const std::string bytes = serialize_run_state(s);
    CHECK(deserialize_run_state(bytes) == s);
    CHECK(serialize_run_state(deserialize_run_state(bytes)) == bytes);
}

TEST_CASE("truncated or altered bytes are corrupt state") {
    const std::string bytes = serialize_run_state(five_member_state());
    for (std::size_t cut : {std::size_t{0}, std::size_t{1}, bytes.size() / 2, bytes.size() - 3}) {
        try {
            deserialize_run_state(bytes.substr(0, cut));
            FAIL("expected CorruptState at cut " << cut);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CorruptState);
        }
    }
    std::string wrong_version = bytes;
    wrong_version.replace(wrong_version.find("\"version\": 1"), 12, "\"version\": 9");
    CHECK_THROWS_AS(deserialize_run_state(wrong_version), Error);
}
