// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/evolution.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "detail.hpp"
#include "tmplevo/error.hpp"
#include "tmplevo/extraction.hpp"
#include "tmplevo/operators.hpp"

namespace tmplevo {

namespace {

std::string member_id(int generation, std::size_t index) {
    return fmt::format("g{}-i{}", generation, index);
}

GenerationStats stats_of(const Population& pop) {
    GenerationStats s;
    s.generation = pop.generation;
    double sum = 0.0;
    bool first = true;
    for (const auto& ind : pop.individuals) {
        const double f = ind.fitness.value_or(0.0);
        sum += f;
        s.best_fitness = first ? f : std::max(s.best_fitness, f);
        first = false;
        s.individual_ids.push_back(ind.id);
    }
    s.mean_fitness = pop.individuals.empty() ? 0.0 : sum / static_cast<double>(pop.individuals.size());
    return s;
}

// Best-ever tracking: replaced only by a strictly fitter individual, so ties
// keep the earliest.
void update_best(std::optional<Individual>& best, const Population& pop) {
    for (const auto& ind : pop.individuals) {
        if (!ind.fitness) continue;
        if (!best || *ind.fitness > *best->fitness) best = ind;
    }
}

// Scores each distinct template once, on the gateway of the first member that
// holds it, and copies the result to the duplicates.
std::vector<FitnessBreakdown> score_unique(const std::vector<const PromptTemplate*>& templates,
                                           std::vector<Gateway>& scopes, const FitnessFn& fitness_fn,
                                           bool parallel) {
    std::vector<std::size_t> owner(templates.size());
    std::vector<std::size_t> unique;
    std::map<std::string, std::size_t> first_seen;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        if (!templates[i]) continue;
        auto [it, inserted] = first_seen.try_emplace(templates[i]->id(), i);
        owner[i] = it->second;
        if (inserted) unique.push_back(i);
    }
    std::vector<FitnessBreakdown> scores(templates.size());
    detail::for_each_index(unique.size(), parallel, [&](std::size_t k) {
        const std::size_t i = unique[k];
        scores[i] = fitness_fn(*templates[i], scopes[i]);
    });
    for (std::size_t i = 0; i < templates.size(); ++i) {
        if (templates[i] && owner[i] != i) scores[i] = scores[owner[i]];
    }
    return scores;
}

std::vector<json> drain(std::vector<Gateway>& scopes) {
    std::vector<json> out;
    for (auto& s : scopes) {
        for (auto& e : s.take_events()) out.push_back(std::move(e));
    }
    return out;
}

} // namespace

json EvolutionResult::to_json() const {
    json hist = json::array();
    for (const auto& s : history) hist.push_back(tmplevo::to_json(s));
    return json{{"best", tmplevo::to_json(best)}, {"history", hist}, {"ledger", tmplevo::to_json(ledger)}};
}

std::array<std::size_t, 3> sample_donors(std::size_t population_size, std::size_t alpha, SplitMix64& rng,
                                         bool strict) {
    if (alpha >= population_size) fail(ErrorKind::InvalidArgument, "base index out of range");
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < population_size; ++i) {
        if (i != alpha) others.push_back(i);
    }
    std::array<std::size_t, 3> out{};
    if (strict) {
        if (others.size() < 3) fail(ErrorKind::InvalidArgument, "strict donor sampling needs a population of at least 4");
        // Partial Fisher-Yates over the candidates.
        for (std::size_t k = 0; k < 3; ++k) {
            const auto j = k + static_cast<std::size_t>(rng.below(others.size() - k));
            std::swap(others[k], others[j]);
            out[k] = others[k];
        }
    } else {
        if (others.empty()) fail(ErrorKind::InvalidArgument, "donor sampling needs a population of at least 2");
        for (auto& d : out) d = others[static_cast<std::size_t>(rng.below(others.size()))];
    }
    return out;
}

PromptTemplate make_offspring(const Population& population, std::size_t alpha, const BenchmarkGroup& group,
                              const EvolutionConfig& config, int generation, Gateway& gw,
                              std::array<std::size_t, 3>* donors_out) {
    if (group.in_domain.empty()) fail(ErrorKind::InvalidArgument, "group has no in-domain images");
    const auto g = static_cast<std::uint64_t>(generation);
    SplitMix64 rng(derive_seed(config.seed, g, alpha, Stream::Sampling));
    const auto donors = sample_donors(population.size(), alpha, rng, config.strict_sampling);
    if (donors_out) *donors_out = donors;
    const auto image_index = static_cast<std::size_t>(rng.below(group.in_domain.size()));

    const PromptTemplate& base = population.individuals[alpha].tmpl;
    const PromptTemplate& x1 = population.individuals[donors[0]].tmpl;
    const PromptTemplate& x2 = population.individuals[donors[1]].tmpl;
    const PromptTemplate& x3 = population.individuals[donors[2]].tmpl;

    const DiffSet diff = identify_differences(x2, x3, gw);
    const CommonSet common = config.use_supplements ? identify_commonalities(x2, x3, gw) : CommonSet{};
    const MutationPayload payload =
        mutate(diff, common, group.in_domain[image_index].image, gw, config.mutation_factor,
               derive_seed(config.seed, g, alpha, Stream::Mutate));
    PromptTemplate beta = combine_mutation(x1, payload);
    if (!config.use_supplements) beta = beta.without_supplements();

    PromptTemplate child = crossover(base, beta, gw, derive_seed(config.seed, g, alpha, Stream::Crossover));
    child = refine_offspring(child, common_part(base, beta), gw, config.use_supplements);
    if (!config.use_supplements) child = child.without_supplements();
    return child;
}

EvolutionResult evolve(const BenchmarkGroup& group, const EvolutionConfig& config, Gateway& gw,
                       const FitnessFn& fitness_fn, const EvolveOptions& options) {
    validate(config);
    validate(group);
    if (!fitness_fn) fail(ErrorKind::InvalidArgument, "fitness function is empty");
    const bool parallel = !config.deterministic;
    const auto P = static_cast<std::size_t>(config.population_size);

    RunState state;
    auto checkpoint = [&](std::vector<json>&& events) {
        state.ledger = gw.ledger().snapshot();
        if (options.cache) state.fitness_cache = options.cache->entries();
        state.events_written += events.size();
        if (options.on_generation) options.on_generation(state, std::move(events));
    };

    if (options.resume) {
        state = *options.resume;
        if (state.config != config) fail(ErrorKind::CorruptState, "checkpoint was written with a different configuration");
        if (state.population.size() != P) fail(ErrorKind::CorruptState, "checkpoint population size does not match");
    } else {
        state.config = config;
        Gateway init = gw.scoped("init");
        state.population = init_population(group, config.population_size, init,
                                           InitOptions{config.use_supplements, parallel});
        std::vector<json> events = init.take_events();

        std::vector<Gateway> scopes;
        std::vector<const PromptTemplate*> templates;
        for (std::size_t i = 0; i < P; ++i) {
            scopes.push_back(gw.scoped("init_fitness", 0, static_cast<int>(i)));
            templates.push_back(&state.population.individuals[i].tmpl);
        }
        const auto scores = score_unique(templates, scopes, fitness_fn, parallel);
        for (std::size_t i = 0; i < P; ++i) state.population.individuals[i].fitness = scores[i].total;
        for (auto& e : drain(scopes)) events.push_back(std::move(e));

        update_best(state.best, state.population);
        state.history.push_back(stats_of(state.population));
        checkpoint(std::move(events));
    }

    for (int g = state.population.generation + 1; g <= config.generations; ++g) {
        std::vector<Gateway> scopes;
        for (std::size_t i = 0; i < P; ++i) scopes.push_back(gw.scoped("de", g, static_cast<int>(i)));

        std::vector<std::optional<Individual>> children(P);
        detail::for_each_index(P, parallel, [&](std::size_t i) {
            std::array<std::size_t, 3> donors{};
            try {
                PromptTemplate t = make_offspring(state.population, i, group, config, g, scopes[i], &donors);
                Individual child;
                child.id = member_id(g, i);
                child.tmpl = std::move(t);
                int parent_gen = 0;
                child.parent_ids.push_back(state.population.individuals[i].id);
                parent_gen = std::max(parent_gen, state.population.individuals[i].generation);
                for (auto d : donors) {
                    child.parent_ids.push_back(state.population.individuals[d].id);
                    parent_gen = std::max(parent_gen, state.population.individuals[d].generation);
                }
                child.generation = parent_gen + 1;
                children[i] = std::move(child);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::OperatorFailed) throw;
                scopes[i].note("offspring_aborted", json{{"base", state.population.individuals[i].id},
                                                         {"reason", e.what()}});
            }
        });

        const auto aborted = static_cast<std::size_t>(
            std::count_if(children.begin(), children.end(), [](const auto& c) { return !c.has_value(); }));
        if (aborted * 2 > P) {
            fail(ErrorKind::EvolutionFailed,
                 fmt::format("generation {}: {} of {} offspring aborted", g, aborted, P));
        }

        std::vector<const PromptTemplate*> templates(P, nullptr);
        for (std::size_t i = 0; i < P; ++i) {
            if (children[i]) templates[i] = &children[i]->tmpl;
        }
        const auto scores = score_unique(templates, scopes, fitness_fn, parallel);

        Population next;
        next.generation = g;
        for (std::size_t i = 0; i < P; ++i) {
            const Individual& alpha = state.population.individuals[i];
            if (!children[i]) {
                next.individuals.push_back(alpha);
                continue;
            }
            children[i]->fitness = scores[i].total;
            const bool replace = *children[i]->fitness >= alpha.fitness.value_or(0.0);
            scopes[i].note("selection", json{{"base", alpha.id},
                                             {"offspring", children[i]->id},
                                             {"base_fitness", alpha.fitness.value_or(0.0)},
                                             {"offspring_fitness", *children[i]->fitness},
                                             {"replaced", replace}});
            next.individuals.push_back(replace ? *children[i] : alpha);
        }
        state.population = std::move(next);
        update_best(state.best, state.population);
        state.history.push_back(stats_of(state.population));
        checkpoint(drain(scopes));
    }

    EvolutionResult result;
    if (!state.best) fail(ErrorKind::EvolutionFailed, "no individual was scored");
    result.best = *state.best;
    result.history = state.history;
    result.ledger = gw.ledger().snapshot();
    return result;
}

} // namespace tmplevo
