// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Template fitness: lambda times the mean cross-modal cosine between the
// template rendered with each in-domain subject and that subject's image,
// plus (1 - lambda) times the cosine between one generated probe image and
// the matching in-domain image.

#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/config.hpp"
#include "tmplevo/manifest.hpp"

namespace tmplevo {

struct FitnessBreakdown {
    double text_term = 0.0;
    std::optional<double> image_term;
    double lambda = 0.5;
    double total = 0.0;
    int probe_subject_index = -1; ///< -1 when no probe image was scored
    std::string cache_key;
    /// Image generation failed and the individual fell back to the text term.
    bool partial = false;
    std::vector<double> text_cosines;

    bool operator==(const FitnessBreakdown&) const = default;
};

json to_json(const FitnessBreakdown& f);
FitnessBreakdown fitness_breakdown_from_json(const json& j);

/// lambda * text + (1 - lambda) * image, or text alone without an image term.
double combine_fitness(double text_term, std::optional<double> image_term, double lambda);

/// Digest of the template's slot form; equal templates share a key.
std::string fitness_cache_key(const PromptTemplate& tmpl);

/// Probe subject, drawn once per run seed. Every template is probed against
/// the same in-domain image, so scores stay comparable within a run.
std::size_t probe_subject_index(std::uint64_t run_seed, std::size_t n);

/// Thread-safe memo of breakdowns by cache key.
class FitnessCache {
public:
    [[nodiscard]] std::optional<FitnessBreakdown> find(const std::string& key) const;
    /// Inserts unless present; returns the stored value either way.
    FitnessBreakdown insert(const FitnessBreakdown& value);
    [[nodiscard]] std::size_t size() const;

    [[nodiscard]] std::map<std::string, FitnessBreakdown> entries() const;
    void restore(std::map<std::string, FitnessBreakdown> entries);

private:
    mutable std::mutex mMutex;
    std::map<std::string, FitnessBreakdown> mEntries;
};

/// Scores `tmpl` against `group` without consulting any cache.
FitnessBreakdown score_template(const PromptTemplate& tmpl, const BenchmarkGroup& group,
                                const EvolutionConfig& config, Gateway& gw);

/// Cached scoring. A cache hit issues no backend calls.
FitnessBreakdown fitness(const PromptTemplate& tmpl, const BenchmarkGroup& group, const EvolutionConfig& config,
                         Gateway& gw, FitnessCache& cache);

using FitnessFn = std::function<FitnessBreakdown(const PromptTemplate&, Gateway&)>;

/// Binds `fitness` to a group, config and cache. `group` and `cache` must
/// outlive the returned function.
FitnessFn make_fitness_fn(const BenchmarkGroup& group, const EvolutionConfig& config, FitnessCache& cache);

} // namespace tmplevo
