// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpointable state of an evolution run and its byte serialization.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmplevo/backends/ledger.hpp"
#include "tmplevo/config.hpp"
#include "tmplevo/fitness.hpp"
#include "tmplevo/model.hpp"

namespace tmplevo {

struct GenerationStats {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::vector<std::string> individual_ids;

    bool operator==(const GenerationStats&) const = default;
};

json to_json(const GenerationStats& s);
GenerationStats generation_stats_from_json(const json& j);

struct RunState {
    Population population;
    EvolutionConfig config;
    LedgerSnapshot ledger;
    std::optional<Individual> best;
    std::vector<GenerationStats> history;
    std::map<std::string, FitnessBreakdown> fitness_cache;
    /// Lines of events.jsonl covered by this state.
    std::size_t events_written = 0;

    bool operator==(const RunState&) const = default;
};

/// Canonical JSON bytes; equal states serialize to equal bytes.
std::string serialize_run_state(const RunState& state);

/// Inverse of serialize_run_state. CorruptState on any malformed input.
RunState deserialize_run_state(std::string_view bytes);

} // namespace tmplevo
