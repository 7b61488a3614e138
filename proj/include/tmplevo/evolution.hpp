// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synchronous differential evolution over prompt templates.
//
// Every generation, each member in turn is the base alpha. Three donors
// x1, x2, x3 are drawn from the rest of the population; the (x2, x3)
// differences and shared supplements are mutated against a randomly drawn
// in-domain image, merged into x1 to form beta, and alpha x beta is crossed
// over and refined into the offspring. After all offspring are scored, each
// replaces its alpha when its fitness is at least as high.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/config.hpp"
#include "tmplevo/fitness.hpp"
#include "tmplevo/manifest.hpp"
#include "tmplevo/rng.hpp"
#include "tmplevo/run_state.hpp"

namespace tmplevo {

struct EvolutionResult {
    Individual best;
    std::vector<GenerationStats> history;
    LedgerSnapshot ledger;

    [[nodiscard]] json to_json() const;
};

struct EvolveOptions {
    /// Called after generation 0 is scored and after every DE generation with
    /// the state at that point and the events logged since the previous call,
    /// in a fixed order.
    std::function<void(const RunState&, std::vector<json>&&)> on_generation;
    /// Continue from a checkpoint instead of initializing a population.
    const RunState* resume = nullptr;
    /// Cache contents to record in checkpoints.
    const FitnessCache* cache = nullptr;
};

/// Indices of x1, x2, x3 for base `alpha`. With `strict` they are distinct
/// from each other and from alpha (P >= 4); otherwise they are drawn with
/// replacement from the members other than alpha.
std::array<std::size_t, 3> sample_donors(std::size_t population_size, std::size_t alpha, SplitMix64& rng,
                                         bool strict);

/// One offspring of `population[alpha]`, before scoring.
PromptTemplate make_offspring(const Population& population, std::size_t alpha, const BenchmarkGroup& group,
                              const EvolutionConfig& config, int generation, Gateway& gw,
                              std::array<std::size_t, 3>* donors_out = nullptr);

EvolutionResult evolve(const BenchmarkGroup& group, const EvolutionConfig& config, Gateway& gw,
                       const FitnessFn& fitness_fn, const EvolveOptions& options = {});

} // namespace tmplevo
