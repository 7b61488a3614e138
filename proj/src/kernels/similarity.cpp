// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/kernels/similarity.hpp"

#include <cmath>
#include <optional>

#include <omp.h>

#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"

namespace tmplevo::kernels {

namespace {

void check_dims(std::size_t a, std::size_t b) {
    if (a != b) {
        fail(ErrorKind::DimensionMismatch,
             "embedding dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

void check_pairs(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b) {
    if (a.size() != b.size()) fail(ErrorKind::InvalidArgument, "pairwise_cosine needs equal-length batches");
}

std::vector<double> bag_counts(std::span<const std::string> phrases, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    for (const auto& p : phrases) v[phrase_bucket(p, dim)] += 1.0;
    return v;
}

} // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
    check_dims(a.size(), b.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    return cosine(a.values(), b.values());
}

std::size_t phrase_bucket(std::string_view phrase, std::size_t dim) {
    return static_cast<std::size_t>(fnv1a64(phrase) % dim);
}

EmbeddingVector embed_bag(std::span<const std::string> phrases, std::size_t dim) {
    if (phrases.empty()) fail(ErrorKind::InvalidArgument, "cannot embed an empty bag");
    return EmbeddingVector::normalized(bag_counts(phrases, dim));
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

namespace serial {

std::vector<double> pairwise_cosine(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b) {
    check_pairs(a, b);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = cosine(a[i], b[i]);
    return out;
}

std::vector<double> similarity_matrix(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b) {
    std::vector<double> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = cosine(a[i], b[j]);
    }
    return out;
}

std::vector<EmbeddingVector> embed_bags(std::span<const std::vector<std::string>> bags, std::size_t dim) {
    std::vector<EmbeddingVector> out;
    out.reserve(bags.size());
    for (const auto& bag : bags) out.push_back(embed_bag(bag, dim));
    return out;
}

} // namespace serial

namespace parallel {

std::vector<double> pairwise_cosine(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b) {
    check_pairs(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) check_dims(a[i].dim(), b[i].dim());
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    std::vector<double> out(a.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = cosine(a[i], b[i]);
    return out;
}

std::vector<double> similarity_matrix(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b) {
    for (const auto& x : a) {
        for (const auto& y : b) check_dims(x.dim(), y.dim());
    }
    const auto rows = static_cast<std::ptrdiff_t>(a.size());
    const std::size_t cols = b.size();
    std::vector<double> out(a.size() * cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = cosine(a[i], b[j]);
    }
    return out;
}

std::vector<EmbeddingVector> embed_bags(std::span<const std::vector<std::string>> bags, std::size_t dim) {
    for (const auto& bag : bags) {
        if (bag.empty()) fail(ErrorKind::InvalidArgument, "cannot embed an empty bag");
    }
    const auto n = static_cast<std::ptrdiff_t>(bags.size());
    std::vector<std::optional<EmbeddingVector>> slots(bags.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) slots[i].emplace(embed_bag(bags[i], dim));
    std::vector<EmbeddingVector> out;
    out.reserve(bags.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace parallel

} // namespace tmplevo::kernels
