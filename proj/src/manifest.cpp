// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/manifest.hpp"

#include <fstream>
#include <set>

#include "tmplevo/error.hpp"

namespace tmplevo {

namespace fs = std::filesystem;

std::string_view to_string(Difficulty d) {
    return d == Difficulty::Easy ? "easy" : "hard";
}

void validate(const BenchmarkGroup& group) {
    const auto bad = [&](const std::string& why) {
        fail(ErrorKind::ManifestError, "group '" + group.group_id + "': " + why);
    };
    if (group.group_id.empty()) fail(ErrorKind::ManifestError, "group_id must be non-empty");
    if (group.subjects.size() != kSubjectCount) bad("expected 9 subjects");
    if (group.in_domain.size() != kInDomainCount) bad("expected 5 in_domain images");
    if (group.out_domain.size() != kOutDomainCount) bad("expected 4 out_domain images");
    for (const auto& s : group.subjects) {
        if (trim(s).empty()) bad("subjects must be non-empty");
    }
    std::set<std::size_t> seen;
    for (const auto& img : group.in_domain) {
        if (img.subject_index >= kInDomainCount) bad("in_domain subject_index must be in [0, 5)");
        seen.insert(img.subject_index);
    }
    for (const auto& img : group.out_domain) {
        if (img.subject_index < kInDomainCount || img.subject_index >= kSubjectCount) {
            bad("out_domain subject_index must be in [5, 9)");
        }
        seen.insert(img.subject_index);
    }
    if (seen.size() != kSubjectCount) bad("subject indices must be distinct");
}

namespace {

std::vector<BenchmarkImage> parse_images(const json& arr, const fs::path& base_dir, bool check_images,
                                         const std::string& group_id) {
    if (!arr.is_array()) fail(ErrorKind::ManifestError, "group '" + group_id + "': image list must be an array");
    std::vector<BenchmarkImage> out;
    for (const auto& e : arr) {
        BenchmarkImage img;
        img.subject_index = e.at("subject_index").get<std::size_t>();
        const fs::path rel = e.at("image_path").get<std::string>();
        const fs::path full = rel.is_absolute() ? rel : base_dir / rel;
        if (check_images && !fs::is_regular_file(full)) {
            fail(ErrorKind::ManifestError, "missing image file: " + full.string());
        }
        img.image.uri = full.string();
        out.push_back(std::move(img));
    }
    return out;
}

} // namespace

std::vector<BenchmarkGroup> parse_manifest(const json& doc, const fs::path& base_dir, bool check_images) {
    if (!doc.is_array()) fail(ErrorKind::ManifestError, "manifest must be a top-level array");
    std::vector<BenchmarkGroup> groups;
    std::set<std::string> ids;
    for (const auto& g : doc) {
        BenchmarkGroup group;
        try {
            group.group_id = g.at("group_id").get<std::string>();
            const auto diff = g.at("difficulty").get<std::string>();
            if (diff == "easy") group.difficulty = Difficulty::Easy;
            else if (diff == "hard") group.difficulty = Difficulty::Hard;
            else fail(ErrorKind::ManifestError, "difficulty must be \"easy\" or \"hard\"");
            const auto& gt = g.at("ground_truth_template");
            if (!gt.is_null()) group.ground_truth_template = gt.get<std::string>();
            group.subjects = g.at("subjects").get<std::vector<std::string>>();
            group.in_domain = parse_images(g.at("in_domain"), base_dir, check_images, group.group_id);
            group.out_domain = parse_images(g.at("out_domain"), base_dir, check_images, group.group_id);
        } catch (const json::exception& e) {
            fail(ErrorKind::ManifestError, std::string("malformed group entry: ") + e.what());
        }
        validate(group);
        if (!ids.insert(group.group_id).second) {
            fail(ErrorKind::ManifestError, "duplicate group_id '" + group.group_id + "'");
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

std::vector<BenchmarkGroup> load_manifest(const fs::path& path, bool check_images) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ManifestError, "cannot open manifest: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) fail(ErrorKind::ManifestError, "manifest is not valid JSON: " + path.string());
    return parse_manifest(doc, path.parent_path(), check_images);
}

const BenchmarkGroup& find_group(const std::vector<BenchmarkGroup>& groups, std::string_view group_id) {
    for (const auto& g : groups) {
        if (g.group_id == group_id) return g;
    }
    fail(ErrorKind::ManifestError, "unknown group id '" + std::string(group_id) + "'");
}

json manifest_to_json(const std::vector<BenchmarkGroup>& groups, const fs::path& base_dir) {
    const auto images = [&](const std::vector<BenchmarkImage>& list) {
        json arr = json::array();
        for (const auto& img : list) {
            arr.push_back({{"subject_index", img.subject_index},
                           {"image_path", fs::path(img.image.uri).lexically_relative(base_dir).generic_string()}});
        }
        return arr;
    };
    json doc = json::array();
    for (const auto& g : groups) {
        doc.push_back({{"group_id", g.group_id},
                       {"difficulty", to_string(g.difficulty)},
                       {"ground_truth_template",
                        g.ground_truth_template ? json(*g.ground_truth_template) : json(nullptr)},
                       {"subjects", g.subjects},
                       {"in_domain", images(g.in_domain)},
                       {"out_domain", images(g.out_domain)}});
    }
    return doc;
}

} // namespace tmplevo
