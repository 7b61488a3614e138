// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP similarity kernels.

#include <benchmark/benchmark.h>

#include "tmplevo/kernels/similarity.hpp"
#include "tmplevo/mock_world.hpp"
#include "tmplevo/rng.hpp"

using namespace tmplevo;

namespace {

constexpr std::size_t kDim = 1536;

std::vector<EmbeddingVector> random_vectors(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<EmbeddingVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(kDim);
        for (auto& x : v) x = rng.uniform() - 0.5;
        out.push_back(EmbeddingVector::normalized(std::move(v)));
    }
    return out;
}

std::vector<std::vector<std::string>> random_bags(std::size_t n) {
    const auto vocab = collision_free_vocabulary();
    SplitMix64 rng(9);
    std::vector<std::vector<std::string>> bags(n);
    for (auto& bag : bags) {
        for (int k = 0; k < 16; ++k) bag.push_back(vocab[static_cast<std::size_t>(rng.below(vocab.size()))]);
    }
    return bags;
}

template <auto Kernel>
void BM_similarity_matrix(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_vectors(n, 1), b = random_vectors(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <auto Kernel>
void BM_embed_bags(benchmark::State& state) {
    const auto bags = random_bags(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(bags, 256));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_similarity_matrix<&kernels::serial::similarity_matrix>)->Name("similarity_matrix/serial")->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_similarity_matrix<&kernels::parallel::similarity_matrix>)->Name("similarity_matrix/parallel")->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_embed_bags<&kernels::serial::embed_bags>)->Name("embed_bags/serial")->Arg(64)->Arg(1024);
BENCHMARK(BM_embed_bags<&kernels::parallel::embed_bags>)->Name("embed_bags/parallel")->Arg(64)->Arg(1024);

BENCHMARK_MAIN();
