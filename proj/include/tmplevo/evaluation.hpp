// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Post-hoc metrics for a stolen template: subject similarity (DINO slot),
// style similarity on images and semantic similarity on prompts (CLIP and
// SigLIP slots). Scores are cosines scaled by 100.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/manifest.hpp"
#include "tmplevo/model.hpp"

namespace tmplevo {

enum class Metric { DINO, CLIP_img, CLIP_txt, SigLIP_img, SigLIP_txt };

inline constexpr std::array<Metric, 5> kMetrics{Metric::DINO, Metric::CLIP_img, Metric::CLIP_txt,
                                                Metric::SigLIP_img, Metric::SigLIP_txt};

std::string_view metric_name(Metric m);

enum class Split { InDomain, OutOfDomain };

std::string_view to_string(Split s);

using MetricScores = std::array<std::optional<double>, 5>;

/// Mean of the scores that are present; nullopt when none are.
std::optional<double> average_of(const MetricScores& scores);

/// Embedding providers by metric slot. A provider may fill several slots.
struct MetricProviders {
    EmbeddingProvider* dino = nullptr;
    EmbeddingProvider* clip = nullptr;
    EmbeddingProvider* siglip = nullptr;
};

double subject_similarity(const ImageRef& generated, const ImageRef& target, Gateway& gw,
                          EmbeddingProvider& provider);
double style_similarity(const ImageRef& generated, const ImageRef& target, Gateway& gw, EmbeddingProvider& provider,
                        std::string_view slot = "CLIP");
/// MissingGroundTruth when `target_prompt` is absent.
double semantic_similarity(std::string_view stolen_prompt, const std::optional<std::string>& target_prompt,
                           Gateway& gw, EmbeddingProvider& provider, std::string_view slot = "CLIP");

/// Ground truth with `subject` put in the slot; a template without a slot
/// gets the subject prepended.
std::string render_ground_truth(std::string_view ground_truth, std::string_view subject);

struct MetricRow {
    std::size_t subject_index = 0;
    std::string subject;
    std::string prompt;
    MetricScores scores;
    std::optional<std::string> error;
};

struct MetricReport {
    std::string group_id;
    Difficulty difficulty = Difficulty::Easy;
    Split split = Split::InDomain;
    MetricScores scores;
    double average = 0.0;
    std::vector<MetricRow> rows;
};

/// Report carrying the given column values and their average.
MetricReport report_from_scores(std::string group_id, Difficulty difficulty, Split split,
                                const std::array<double, 5>& scores);

/// Renders the template with all 9 subjects, generates one image each (phase
/// of `gw`), and scores every metric against the benchmark image.
std::pair<MetricReport, MetricReport> evaluate_template(const PromptTemplate& tmpl, const BenchmarkGroup& group,
                                                        Gateway& gw, const MetricProviders& providers,
                                                        bool parallel = false);

struct SummaryRow {
    Difficulty difficulty = Difficulty::Easy;
    Split split = Split::InDomain;
    std::size_t groups = 0;
    MetricScores scores;
    double average = 0.0;
};

struct BenchmarkSummary {
    std::vector<MetricReport> reports;
    std::vector<SummaryRow> aggregates;

    [[nodiscard]] json to_json() const;
    /// Per-report rows followed by the aggregates.
    [[nodiscard]] std::string to_csv() const;
};

/// Column-wise means per (difficulty, split). InvalidArgument on empty input.
BenchmarkSummary aggregate_benchmark(std::span<const MetricReport> reports);

json to_json(const MetricReport& report);
std::string to_csv(std::span<const MetricReport> reports);

} // namespace tmplevo
