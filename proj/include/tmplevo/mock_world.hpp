// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic benchmark groups for the tag-world mock. Each group hides a
// template of categorized tags; every image carries its subject, all hidden
// tags and a few noise tags of its own. Phrases come from a vocabulary with
// no hash-bucket collisions at the mock embedding width, so bag cosines are
// exact set arithmetic.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tmplevo/manifest.hpp"
#include "tmplevo/model.hpp"

namespace tmplevo {

/// Phrases whose buckets modulo `dim` are pairwise distinct, chosen greedily
/// from a fixed candidate list. Deterministic.
std::vector<std::string> collision_free_vocabulary(std::size_t dim = 256);

struct MockWorldOptions {
    std::uint64_t seed = 0;
    std::size_t groups = 1;
    std::size_t hidden_tags = 12;
    std::size_t noise_tags = 3;
    std::size_t dim = 256;
};

struct MockGroup {
    BenchmarkGroup group;
    PromptTemplate hidden;
};

/// Builds the groups in memory; images carry their bytes.
std::vector<MockGroup> make_mock_world(const MockWorldOptions& options = {});

/// Writes image files under `dir/images` and `dir/manifest.json`; returns the
/// manifest path.
std::filesystem::path write_mock_world(const std::vector<MockGroup>& world, const std::filesystem::path& dir);

} // namespace tmplevo
