// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmplevo/model.hpp"

namespace tmplevo {

inline constexpr std::size_t kSubjectCount = 9;
inline constexpr std::size_t kInDomainCount = 5;
inline constexpr std::size_t kOutDomainCount = 4;

enum class Difficulty { Easy, Hard };

std::string_view to_string(Difficulty d);

struct BenchmarkImage {
    std::size_t subject_index = 0;
    ImageRef image;
};

/// One benchmark entry. The evolution loop only ever reads `subjects[0..5)`
/// and `in_domain`; `ground_truth_template` and `out_domain` are for scoring.
struct BenchmarkGroup {
    std::string group_id;
    Difficulty difficulty = Difficulty::Easy;
    std::optional<std::string> ground_truth_template;
    std::vector<std::string> subjects;
    std::vector<BenchmarkImage> in_domain;
    std::vector<BenchmarkImage> out_domain;

    [[nodiscard]] const std::string& subject_of(const BenchmarkImage& img) const {
        return subjects.at(img.subject_index);
    }
};

/// Throws ManifestError when counts or subject indices are off.
void validate(const BenchmarkGroup& group);

/// Parses a manifest document; image paths resolve against `base_dir`.
/// When `check_images` is set, every referenced image must exist on disk.
std::vector<BenchmarkGroup> parse_manifest(const json& doc, const std::filesystem::path& base_dir,
                                           bool check_images);

std::vector<BenchmarkGroup> load_manifest(const std::filesystem::path& path, bool check_images = true);

const BenchmarkGroup& find_group(const std::vector<BenchmarkGroup>& groups, std::string_view group_id);

/// Manifest document for `groups`, with image paths written relative to `base_dir`.
json manifest_to_json(const std::vector<BenchmarkGroup>& groups, const std::filesystem::path& base_dir);

} // namespace tmplevo
