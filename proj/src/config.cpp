// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/config.hpp"

#include "tmplevo/error.hpp"

namespace tmplevo {

void validate(const EvolutionConfig& c) {
    const int min_pop = c.strict_sampling ? 4 : 2;
    if (c.population_size < min_pop) {
        fail(ErrorKind::InvalidArgument, "population_size must be >= " + std::to_string(min_pop));
    }
    if (c.generations < 0) fail(ErrorKind::InvalidArgument, "generations must be >= 0");
    if (!(c.mutation_factor > 0.0 && c.mutation_factor <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "mutation_factor must be in (0, 1]");
    }
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) fail(ErrorKind::InvalidArgument, "lambda must be in [0, 1]");
}

json to_json(const EvolutionConfig& c) {
    return json{{"population_size", c.population_size},
                {"generations", c.generations},
                {"mutation_factor", c.mutation_factor},
                {"lambda", c.lambda},
                {"seed", c.seed},
                {"use_supplements", c.use_supplements},
                {"use_image_fitness", c.use_image_fitness},
                {"strict_sampling", c.strict_sampling},
                {"deterministic", c.deterministic}};
}

EvolutionConfig evolution_config_from_json(const json& j) {
    EvolutionConfig c;
    c.population_size = j.at("population_size").get<int>();
    c.generations = j.at("generations").get<int>();
    c.mutation_factor = j.at("mutation_factor").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.use_supplements = j.at("use_supplements").get<bool>();
    c.use_image_fitness = j.at("use_image_fitness").get<bool>();
    c.strict_sampling = j.at("strict_sampling").get<bool>();
    c.deterministic = j.at("deterministic").get<bool>();
    return c;
}

} // namespace tmplevo
