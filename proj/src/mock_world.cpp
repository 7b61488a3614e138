// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/mock_world.hpp"

#include <array>
#include <fstream>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "tmplevo/backends/mock.hpp"
#include "tmplevo/error.hpp"
#include "tmplevo/kernels/similarity.hpp"
#include "tmplevo/rng.hpp"

namespace tmplevo {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 24> kAdjectives{
    "amber", "ashen", "azure", "brisk", "cobalt", "copper", "dusky", "faded", "gilded", "hazy", "ivory", "jade",
    "lucid", "muted", "ochre", "pale", "quiet", "russet", "silver", "smoky", "tawny", "umber", "velvet", "woven"};

constexpr std::array<std::string_view, 24> kNouns{
    "lantern", "harbor", "meadow", "ribbon", "glacier", "orchard", "quarry", "canopy", "lattice", "mosaic",
    "thicket", "dune", "grotto", "spire", "vessel", "garden", "beacon", "cellar", "prism", "tapestry",
    "willow", "ember", "fresco", "comet"};

std::vector<std::string> shuffled(std::vector<std::string> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
    return items;
}

// Category of hidden tag i; nullopt means supplement. Cycles through the four
// categories and the supplement list.
std::optional<ModifierCategory> hidden_slot(std::size_t i) {
    const auto k = i % 5;
    if (k == 4) return std::nullopt;
    return kModifierCategories[k];
}

std::string tag_for(std::optional<ModifierCategory> c, const std::string& phrase) {
    return c ? make_tag(*c, phrase) : phrase;
}

} // namespace

std::vector<std::string> collision_free_vocabulary(std::size_t dim) {
    if (dim == 0) fail(ErrorKind::InvalidArgument, "dimension must be positive");
    std::set<std::size_t> used;
    std::vector<std::string> out;
    for (auto adj : kAdjectives) {
        for (auto noun : kNouns) {
            std::string phrase = fmt::format("{} {}", adj, noun);
            if (used.insert(kernels::phrase_bucket(phrase, dim)).second) out.push_back(std::move(phrase));
        }
    }
    return out;
}

std::vector<MockGroup> make_mock_world(const MockWorldOptions& options) {
    if (options.groups == 0) fail(ErrorKind::InvalidArgument, "mock world needs at least one group");
    const auto vocab = collision_free_vocabulary(options.dim);
    const std::size_t needed = kSubjectCount + options.hidden_tags + kSubjectCount * options.noise_tags;
    if (needed > vocab.size()) {
        fail(ErrorKind::InvalidArgument,
             fmt::format("mock world needs {} distinct phrases, vocabulary has {}", needed, vocab.size()));
    }

    std::vector<MockGroup> world;
    for (std::size_t gi = 0; gi < options.groups; ++gi) {
        SplitMix64 rng(derive_seed(options.seed, gi, 0, Stream::MockWorld));
        const auto words = shuffled(vocab, rng);
        auto next = words.begin();

        MockGroup mg;
        BenchmarkGroup& g = mg.group;
        g.group_id = fmt::format("mock-{:02}", gi);
        g.difficulty = gi % 2 == 0 ? Difficulty::Easy : Difficulty::Hard;
        g.subjects.assign(next, next + kSubjectCount);
        next += kSubjectCount;

        Modifiers modifiers;
        std::vector<std::string> supplements;
        std::vector<std::string> hidden_tags;
        for (std::size_t i = 0; i < options.hidden_tags; ++i, ++next) {
            const auto c = hidden_slot(i);
            if (c) modifiers.add(*c, *next);
            else supplements.push_back(*next);
            hidden_tags.push_back(tag_for(c, *next));
        }
        mg.hidden = PromptTemplate(std::move(modifiers), std::move(supplements));
        g.ground_truth_template = mg.hidden.slot_form();

        for (std::size_t s = 0; s < kSubjectCount; ++s) {
            TagImage img;
            img.subject = g.subjects[s];
            img.tags = hidden_tags;
            for (std::size_t k = 0; k < options.noise_tags; ++k, ++next) {
                const auto pick = rng.below(5);
                const auto c = pick < 4 ? std::optional(kModifierCategories[pick]) : std::nullopt;
                img.tags.push_back(tag_for(c, *next));
            }
            BenchmarkImage bi{s, img.to_ref()};
            (s < kInDomainCount ? g.in_domain : g.out_domain).push_back(std::move(bi));
        }
        validate(g);
        world.push_back(std::move(mg));
    }
    return world;
}

fs::path write_mock_world(const std::vector<MockGroup>& world, const fs::path& dir) {
    std::vector<BenchmarkGroup> groups;
    for (const auto& mg : world) {
        BenchmarkGroup g = mg.group;
        const fs::path image_dir = dir / "images" / g.group_id;
        fs::create_directories(image_dir);
        auto write = [&](BenchmarkImage& img, std::string_view split) {
            const fs::path file = image_dir / fmt::format("{}-{}.json", split, img.subject_index);
            std::ofstream out(file, std::ios::binary);
            out << read_image_bytes(img.image);
            if (!out) fail(ErrorKind::InputError, "cannot write " + file.string());
            img.image = ImageRef{file.string(), {}};
        };
        for (auto& img : g.in_domain) write(img, "in");
        for (auto& img : g.out_domain) write(img, "out");
        groups.push_back(std::move(g));
    }
    const fs::path manifest = dir / "manifest.json";
    std::ofstream out(manifest, std::ios::binary);
    out << manifest_to_json(groups, dir).dump(2) << "\n";
    if (!out) fail(ErrorKind::InputError, "cannot write " + manifest.string());
    return manifest;
}

} // namespace tmplevo
