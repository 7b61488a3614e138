// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/run_state.hpp"

#include "tmplevo/error.hpp"

namespace tmplevo {

namespace {

constexpr int kStateVersion = 1;

} // namespace

json to_json(const GenerationStats& s) {
    return json{{"generation", s.generation},
                {"best_fitness", s.best_fitness},
                {"mean_fitness", s.mean_fitness},
                {"individual_ids", s.individual_ids}};
}

GenerationStats generation_stats_from_json(const json& j) {
    GenerationStats s;
    s.generation = j.at("generation").get<int>();
    s.best_fitness = j.at("best_fitness").get<double>();
    s.mean_fitness = j.at("mean_fitness").get<double>();
    s.individual_ids = j.at("individual_ids").get<std::vector<std::string>>();
    return s;
}

std::string serialize_run_state(const RunState& state) {
    json history = json::array();
    for (const auto& h : state.history) history.push_back(to_json(h));
    json cache = json::object();
    for (const auto& [key, f] : state.fitness_cache) cache[key] = to_json(f);
    const json doc{{"version", kStateVersion},
                   {"population", to_json(state.population)},
                   {"config", to_json(state.config)},
                   {"ledger", to_json(state.ledger)},
                   {"best", state.best ? to_json(*state.best) : json(nullptr)},
                   {"history", history},
                   {"fitness_cache", cache},
                   {"events_written", state.events_written}};
    return doc.dump(1) + "\n";
}

RunState deserialize_run_state(std::string_view bytes) {
    const json doc = json::parse(bytes, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::CorruptState, "run state is not a JSON object");
    try {
        if (doc.at("version").get<int>() != kStateVersion) {
            fail(ErrorKind::CorruptState, "unsupported run state version");
        }
        RunState s;
        s.population = population_from_json(doc.at("population"));
        s.config = evolution_config_from_json(doc.at("config"));
        s.ledger = ledger_snapshot_from_json(doc.at("ledger"));
        if (!doc.at("best").is_null()) s.best = individual_from_json(doc.at("best"));
        for (const auto& h : doc.at("history")) s.history.push_back(generation_stats_from_json(h));
        for (const auto& [key, f] : doc.at("fitness_cache").items()) {
            s.fitness_cache[key] = fitness_breakdown_from_json(f);
        }
        s.events_written = doc.at("events_written").get<std::size_t>();
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::CorruptState, std::string("malformed run state: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::CorruptState) throw;
        fail(ErrorKind::CorruptState, std::string("invalid run state: ") + e.what());
    }
}

} // namespace tmplevo
