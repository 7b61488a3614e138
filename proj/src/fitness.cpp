// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/fitness.hpp"

#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"
#include "tmplevo/kernels/similarity.hpp"
#include "tmplevo/rng.hpp"

namespace tmplevo {

json to_json(const FitnessBreakdown& f) {
    return json{{"text_term", f.text_term},
                {"image_term", f.image_term ? json(*f.image_term) : json(nullptr)},
                {"lambda", f.lambda},
                {"total", f.total},
                {"probe_subject_index", f.probe_subject_index},
                {"cache_key", f.cache_key},
                {"partial", f.partial},
                {"text_cosines", f.text_cosines}};
}

FitnessBreakdown fitness_breakdown_from_json(const json& j) {
    FitnessBreakdown f;
    f.text_term = j.at("text_term").get<double>();
    if (!j.at("image_term").is_null()) f.image_term = j.at("image_term").get<double>();
    f.lambda = j.at("lambda").get<double>();
    f.total = j.at("total").get<double>();
    f.probe_subject_index = j.at("probe_subject_index").get<int>();
    f.cache_key = j.at("cache_key").get<std::string>();
    f.partial = j.at("partial").get<bool>();
    f.text_cosines = j.at("text_cosines").get<std::vector<double>>();
    return f;
}

double combine_fitness(double text_term, std::optional<double> image_term, double lambda) {
    if (!image_term) return text_term;
    return lambda * text_term + (1.0 - lambda) * *image_term;
}

std::string fitness_cache_key(const PromptTemplate& tmpl) {
    return digest(tmpl.slot_form());
}

std::size_t probe_subject_index(std::uint64_t run_seed, std::size_t n) {
    SplitMix64 rng(derive_seed(run_seed, 0, 0, Stream::Probe));
    return static_cast<std::size_t>(rng.below(n));
}

std::optional<FitnessBreakdown> FitnessCache::find(const std::string& key) const {
    std::lock_guard lock(mMutex);
    const auto it = mEntries.find(key);
    if (it == mEntries.end()) return std::nullopt;
    return it->second;
}

FitnessBreakdown FitnessCache::insert(const FitnessBreakdown& value) {
    std::lock_guard lock(mMutex);
    return mEntries.try_emplace(value.cache_key, value).first->second;
}

std::size_t FitnessCache::size() const {
    std::lock_guard lock(mMutex);
    return mEntries.size();
}

std::map<std::string, FitnessBreakdown> FitnessCache::entries() const {
    std::lock_guard lock(mMutex);
    return mEntries;
}

void FitnessCache::restore(std::map<std::string, FitnessBreakdown> entries) {
    std::lock_guard lock(mMutex);
    mEntries = std::move(entries);
}

FitnessBreakdown score_template(const PromptTemplate& tmpl, const BenchmarkGroup& group,
                                const EvolutionConfig& config, Gateway& gw) {
    if (group.in_domain.empty()) fail(ErrorKind::InvalidArgument, "fitness needs in-domain images");
    if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) fail(ErrorKind::InvalidArgument, "lambda must be in [0, 1]");

    FitnessBreakdown f;
    f.lambda = config.lambda;
    f.cache_key = fitness_cache_key(tmpl);

    const std::size_t n = group.in_domain.size();
    std::vector<std::string> prompts(n);
    std::vector<EmbeddingVector> text, truth;
    text.reserve(n);
    truth.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        prompts[i] = render_template(tmpl, group.subject_of(group.in_domain[i]));
        text.push_back(gw.embed_text(prompts[i]));
        truth.push_back(gw.embed_image(group.in_domain[i].image));
    }
    f.text_cosines = kernels::serial::pairwise_cosine(text, truth);
    f.text_term = kernels::mean(f.text_cosines);

    if (config.use_image_fitness) {
        const std::size_t j = probe_subject_index(config.seed, n);
        try {
            const ImageRef probe = gw.generate_image(prompts[j]);
            f.image_term = kernels::cosine(gw.embed_image(probe), truth[j]);
            f.probe_subject_index = static_cast<int>(j);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ContentRejected && e.kind() != ErrorKind::TransportError &&
                e.kind() != ErrorKind::RateLimited) {
                throw;
            }
            f.partial = true;
            gw.note("partial_fitness", json{{"cache_key", f.cache_key}, {"reason", e.what()}});
        }
    }
    f.total = combine_fitness(f.text_term, f.image_term, f.lambda);
    return f;
}

FitnessBreakdown fitness(const PromptTemplate& tmpl, const BenchmarkGroup& group, const EvolutionConfig& config,
                         Gateway& gw, FitnessCache& cache) {
    const std::string key = fitness_cache_key(tmpl);
    if (auto hit = cache.find(key)) {
        gw.note("fitness", json{{"template_id", tmpl.id()}, {"cached", true}, {"breakdown", to_json(*hit)}});
        return *hit;
    }
    const FitnessBreakdown stored = cache.insert(score_template(tmpl, group, config, gw));
    gw.note("fitness", json{{"template_id", tmpl.id()}, {"cached", false}, {"breakdown", to_json(stored)}});
    return stored;
}

FitnessFn make_fitness_fn(const BenchmarkGroup& group, const EvolutionConfig& config, FitnessCache& cache) {
    return [&group, config, &cache](const PromptTemplate& tmpl, Gateway& gw) {
        return fitness(tmpl, group, config, gw, cache);
    };
}

} // namespace tmplevo
