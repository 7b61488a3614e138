// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/evaluation.hpp"

#include <map>

#include <fmt/format.h>

#include "detail.hpp"
#include "tmplevo/error.hpp"
#include "tmplevo/kernels/similarity.hpp"

namespace tmplevo {

namespace {

constexpr std::size_t index_of(Metric m) { return static_cast<std::size_t>(m); }

EmbeddingProvider& require(EmbeddingProvider* p, std::string_view slot) {
    if (!p) fail(ErrorKind::InvalidArgument, fmt::format("no provider configured for the {} slot", slot));
    return *p;
}

json scores_json(const MetricScores& scores) {
    json j = json::object();
    for (auto m : kMetrics) {
        const auto& v = scores[index_of(m)];
        j[std::string(metric_name(m))] = v ? json(*v) : json(nullptr);
    }
    return j;
}

std::string csv_cell(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string(); }

std::string csv_line(std::string_view group, std::string_view difficulty, std::string_view split,
                     const MetricScores& scores, double average) {
    std::string line = fmt::format("{},{},{}", group, difficulty, split);
    for (const auto& v : scores) line += "," + csv_cell(v);
    line += fmt::format(",{:.4f}\n", average);
    return line;
}

MetricReport assemble(const BenchmarkGroup& group, Split split, std::vector<MetricRow> rows) {
    MetricReport r;
    r.group_id = group.group_id;
    r.difficulty = group.difficulty;
    r.split = split;
    for (std::size_t k = 0; k < kMetrics.size(); ++k) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& row : rows) {
            if (row.scores[k]) {
                sum += *row.scores[k];
                ++n;
            }
        }
        if (n > 0) r.scores[k] = sum / static_cast<double>(n);
    }
    r.average = average_of(r.scores).value_or(0.0);
    r.rows = std::move(rows);
    return r;
}

} // namespace

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::DINO: return "DINO";
        case Metric::CLIP_img: return "CLIP_img";
        case Metric::CLIP_txt: return "CLIP_txt";
        case Metric::SigLIP_img: return "SigLIP_img";
        case Metric::SigLIP_txt: return "SigLIP_txt";
    }
    return "?";
}

std::string_view to_string(Split s) { return s == Split::InDomain ? "InDomain" : "OutOfDomain"; }

std::optional<double> average_of(const MetricScores& scores) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : scores) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

double subject_similarity(const ImageRef& generated, const ImageRef& target, Gateway& gw,
                          EmbeddingProvider& provider) {
    return 100.0 * kernels::cosine(gw.embed_image(generated, &provider, "DINO"),
                                   gw.embed_image(target, &provider, "DINO"));
}

double style_similarity(const ImageRef& generated, const ImageRef& target, Gateway& gw, EmbeddingProvider& provider,
                        std::string_view slot) {
    return 100.0 * kernels::cosine(gw.embed_image(generated, &provider, slot),
                                   gw.embed_image(target, &provider, slot));
}

double semantic_similarity(std::string_view stolen_prompt, const std::optional<std::string>& target_prompt,
                           Gateway& gw, EmbeddingProvider& provider, std::string_view slot) {
    if (!target_prompt) fail(ErrorKind::MissingGroundTruth, "group has no ground-truth template");
    return 100.0 * kernels::cosine(gw.embed_text(stolen_prompt, &provider, slot),
                                   gw.embed_text(*target_prompt, &provider, slot));
}

std::string render_ground_truth(std::string_view ground_truth, std::string_view subject) {
    std::string out(ground_truth);
    const auto pos = out.find(kSubjectSlot);
    if (pos == std::string::npos) return std::string(subject) + ", " + out;
    out.replace(pos, kSubjectSlot.size(), subject);
    return out;
}

MetricReport report_from_scores(std::string group_id, Difficulty difficulty, Split split,
                                const std::array<double, 5>& scores) {
    MetricReport r;
    r.group_id = std::move(group_id);
    r.difficulty = difficulty;
    r.split = split;
    for (std::size_t k = 0; k < scores.size(); ++k) r.scores[k] = scores[k];
    r.average = *average_of(r.scores);
    return r;
}

std::pair<MetricReport, MetricReport> evaluate_template(const PromptTemplate& tmpl, const BenchmarkGroup& group,
                                                        Gateway& gw, const MetricProviders& providers,
                                                        bool parallel) {
    validate(group);
    EmbeddingProvider& dino = require(providers.dino, "DINO");
    EmbeddingProvider& clip = require(providers.clip, "CLIP");
    EmbeddingProvider& siglip = require(providers.siglip, "SigLIP");

    std::vector<const BenchmarkImage*> targets;
    for (const auto& img : group.in_domain) targets.push_back(&img);
    for (const auto& img : group.out_domain) targets.push_back(&img);

    std::vector<Gateway> scopes;
    for (std::size_t i = 0; i < targets.size(); ++i) scopes.push_back(gw.scoped(gw.phase(), -1, static_cast<int>(i)));

    std::vector<MetricRow> rows(targets.size());
    detail::for_each_index(targets.size(), parallel, [&](std::size_t i) {
        Gateway& g = scopes[i];
        MetricRow& row = rows[i];
        row.subject_index = targets[i]->subject_index;
        row.subject = group.subject_of(*targets[i]);
        row.prompt = render_template(tmpl, row.subject);

        std::optional<std::string> truth;
        if (group.ground_truth_template) truth = render_ground_truth(*group.ground_truth_template, row.subject);
        const bool have_truth = truth.has_value();

        std::optional<ImageRef> generated;
        try {
            generated = g.generate_image(row.prompt);
        } catch (const Error& e) {
            if (!is_backend_error(e.kind())) throw;
            row.error = e.what();
        }
        const ImageRef& target = targets[i]->image;
        if (generated) {
            row.scores[index_of(Metric::DINO)] = subject_similarity(*generated, target, g, dino);
            row.scores[index_of(Metric::CLIP_img)] = style_similarity(*generated, target, g, clip, "CLIP");
            row.scores[index_of(Metric::SigLIP_img)] = style_similarity(*generated, target, g, siglip, "SigLIP");
        }
        // Prompt similarity does not depend on the generated image.
        if (have_truth) {
            row.scores[index_of(Metric::CLIP_txt)] = semantic_similarity(row.prompt, truth, g, clip, "CLIP");
            row.scores[index_of(Metric::SigLIP_txt)] = semantic_similarity(row.prompt, truth, g, siglip, "SigLIP");
        } else if (!row.error) {
            row.error = "MissingGroundTruth: text metrics skipped";
        }
    });
    for (auto& s : scopes) gw.absorb(s.take_events());

    std::vector<MetricRow> in(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(group.in_domain.size()));
    std::vector<MetricRow> out(rows.begin() + static_cast<std::ptrdiff_t>(group.in_domain.size()), rows.end());
    return {assemble(group, Split::InDomain, std::move(in)), assemble(group, Split::OutOfDomain, std::move(out))};
}

BenchmarkSummary aggregate_benchmark(std::span<const MetricReport> reports) {
    if (reports.empty()) fail(ErrorKind::InvalidArgument, "aggregate_benchmark needs at least one report");
    BenchmarkSummary summary;
    summary.reports.assign(reports.begin(), reports.end());

    struct Acc {
        std::size_t groups = 0;
        std::array<double, 5> sum{};
        std::array<std::size_t, 5> count{};
        double average_sum = 0.0;
    };
    std::map<std::pair<int, int>, Acc> acc;
    for (const auto& r : reports) {
        Acc& a = acc[{static_cast<int>(r.difficulty), static_cast<int>(r.split)}];
        ++a.groups;
        a.average_sum += r.average;
        for (std::size_t k = 0; k < 5; ++k) {
            if (r.scores[k]) {
                a.sum[k] += *r.scores[k];
                ++a.count[k];
            }
        }
    }
    for (const auto& [key, a] : acc) {
        SummaryRow row;
        row.difficulty = static_cast<Difficulty>(key.first);
        row.split = static_cast<Split>(key.second);
        row.groups = a.groups;
        for (std::size_t k = 0; k < 5; ++k) {
            if (a.count[k]) row.scores[k] = a.sum[k] / static_cast<double>(a.count[k]);
        }
        row.average = a.average_sum / static_cast<double>(a.groups);
        summary.aggregates.push_back(row);
    }
    return summary;
}

json to_json(const MetricReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row{{"subject_index", r.subject_index},
                 {"subject", r.subject},
                 {"prompt", r.prompt},
                 {"scores", scores_json(r.scores)},
                 {"average", average_of(r.scores) ? json(*average_of(r.scores)) : json(nullptr)}};
        if (r.error) row["error"] = *r.error;
        rows.push_back(std::move(row));
    }
    return json{{"group_id", report.group_id},
                {"difficulty", to_string(report.difficulty)},
                {"split", to_string(report.split)},
                {"scores", scores_json(report.scores)},
                {"average", report.average},
                {"rows", rows}};
}

std::string to_csv(std::span<const MetricReport> reports) {
    std::string out = "group_id,difficulty,split,DINO,CLIP_img,CLIP_txt,SigLIP_img,SigLIP_txt,Average\n";
    for (const auto& r : reports) {
        out += csv_line(r.group_id, to_string(r.difficulty), to_string(r.split), r.scores, r.average);
    }
    return out;
}

json BenchmarkSummary::to_json() const {
    json reps = json::array();
    for (const auto& r : reports) reps.push_back(tmplevo::to_json(r));
    json agg = json::array();
    for (const auto& a : aggregates) {
        agg.push_back({{"difficulty", to_string(a.difficulty)},
                       {"split", to_string(a.split)},
                       {"groups", a.groups},
                       {"scores", scores_json(a.scores)},
                       {"average", a.average}});
    }
    return json{{"reports", reps}, {"aggregates", agg}};
}

std::string BenchmarkSummary::to_csv() const {
    std::string out = tmplevo::to_csv(reports);
    for (const auto& a : aggregates) {
        out += csv_line("ALL", to_string(a.difficulty), to_string(a.split), a.scores, a.average);
    }
    return out;
}

} // namespace tmplevo
