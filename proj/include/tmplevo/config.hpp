// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>

#include "tmplevo/model.hpp"

namespace tmplevo {

struct EvolutionConfig {
    int population_size = 5;
    int generations = 5;
    /// Fraction of difference items a mutation applies.
    double mutation_factor = 1.0;
    /// Weight of the text term in the fitness; 1 - lambda goes to the image term.
    double lambda = 0.5;
    std::uint64_t seed = 0;
    bool use_supplements = true;
    bool use_image_fitness = true;
    /// Base and the three donors pairwise distinct (needs P >= 4). When off,
    /// donors are drawn with replacement and P >= 2 suffices.
    bool strict_sampling = true;
    /// Serialize all backend work.
    bool deterministic = false;

    bool operator==(const EvolutionConfig&) const = default;
};

/// Throws InvalidArgument on out-of-range values.
void validate(const EvolutionConfig& config);

json to_json(const EvolutionConfig& config);
EvolutionConfig evolution_config_from_json(const json& j);

} // namespace tmplevo
