// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Similarity kernels. Each batch kernel has an OpenMP version (`parallel`)
// and a plain loop (`serial`) kept as the reference the tests and the
// benchmark compare against.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tmplevo/model.hpp"

namespace tmplevo::kernels {

/// dot(a, b) / (|a| |b|). Returns 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

/// Throws DimensionMismatch on unequal dimensions.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Bucket of a phrase in the hashed bag-of-phrases space: FNV-1a 64 mod dim.
std::size_t phrase_bucket(std::string_view phrase, std::size_t dim);

/// Count vector with +1 at phrase_bucket(p) for every phrase, L2-normalized.
EmbeddingVector embed_bag(std::span<const std::string> phrases, std::size_t dim);

namespace serial {

/// out[i] = cosine(a[i], b[i])
std::vector<double> pairwise_cosine(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b);

/// Row-major |a| x |b| matrix of cosines.
std::vector<double> similarity_matrix(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b);

std::vector<EmbeddingVector> embed_bags(std::span<const std::vector<std::string>> bags, std::size_t dim);

} // namespace serial

namespace parallel {

std::vector<double> pairwise_cosine(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b);

std::vector<double> similarity_matrix(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b);

std::vector<EmbeddingVector> embed_bags(std::span<const std::vector<std::string>> bags, std::size_t dim);

} // namespace parallel

double mean(std::span<const double> values);

} // namespace tmplevo::kernels
