// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// The text-domain differential evolution operators. The classical mutant
// x1 + F (x2 - x3) becomes: the modifier differences of (x2, x3) plus their
// shared supplements, filtered against a reference image (F is the fraction
// of differences kept), then merged into x1. Crossover inherits everything
// alpha and beta share and only recombines what differs.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/model.hpp"

namespace tmplevo {

enum class DiffSource { A, B };

struct DiffItem {
    ModifierCategory category;
    std::string phrase;
    DiffSource source;

    bool operator==(const DiffItem&) const = default;
};

struct DiffSet {
    std::vector<DiffItem> items;

    [[nodiscard]] bool empty() const { return items.empty(); }
    [[nodiscard]] std::size_t size() const { return items.size(); }
    bool operator==(const DiffSet&) const = default;
};

struct CommonSet {
    std::vector<std::string> supplements;

    [[nodiscard]] bool empty() const { return supplements.empty(); }
    bool operator==(const CommonSet&) const = default;
};

struct MutationPayload {
    Modifiers modifiers;
    std::vector<std::string> supplements;

    [[nodiscard]] bool empty() const { return modifiers.empty() && supplements.empty(); }
    bool operator==(const MutationPayload&) const = default;
};

json to_json(const DiffSet& diff);
DiffSet diff_set_from_json(const json& j);

/// Modifier phrases present in exactly one of a, b (Diff call).
DiffSet identify_differences(const PromptTemplate& a, const PromptTemplate& b, Gateway& gw);

/// Supplements shared by a and b (Common call).
CommonSet identify_commonalities(const PromptTemplate& a, const PromptTemplate& b, Gateway& gw);

/// Mutate call with `sample_image` attached. `mutation_factor` in [0, 1] is
/// the fraction of differences to apply; `seed` keys the backend's stream.
MutationPayload mutate(const DiffSet& diff, const CommonSet& common, const ImageRef& sample_image, Gateway& gw,
                       double mutation_factor, std::uint64_t seed);

/// x1 with the payload merged in (dedup, first occurrence kept). Local, no call.
PromptTemplate combine_mutation(const PromptTemplate& x1, const MutationPayload& payload);

/// Exact phrase-level intersection, in alpha's order.
PromptTemplate common_part(const PromptTemplate& alpha, const PromptTemplate& beta);

/// Common part inherited verbatim plus the differing items a Crossover call keeps.
PromptTemplate crossover(const PromptTemplate& alpha, const PromptTemplate& beta, Gateway& gw, std::uint64_t seed);

/// Synthesize call turning a raw offspring into a coherent template. Phrases of
/// `inherited` are restored if the reply dropped them.
PromptTemplate refine_offspring(const PromptTemplate& offspring, const PromptTemplate& inherited, Gateway& gw,
                                bool include_supplements);

/// a ∪ b, a's order first.
PromptTemplate merge_templates(const PromptTemplate& a, const PromptTemplate& b);

} // namespace tmplevo
