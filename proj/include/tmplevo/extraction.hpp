// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Image element extraction and initial population synthesis.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/manifest.hpp"
#include "tmplevo/model.hpp"

namespace tmplevo {

/// Repair rounds after an unparseable reply.
inline constexpr int kParseRetries = 2;

/// One Extract call with the image attached. ExtractionFailed after
/// kParseRetries failed repairs.
ElementTriple extract_elements(const ImageRef& image, Gateway& gw);

/// Extracts the group's in-domain images, in order.
std::vector<ElementTriple> extract_group(const BenchmarkGroup& group, Gateway& gw, bool parallel = false);

struct SynthesisOptions {
    /// Index of the in-domain image whose details the variant should stress.
    std::optional<std::size_t> emphasis;
    bool include_supplements = true;
};

/// Merges one triple per in-domain image into a template with one Synthesize
/// call. Requires exactly kInDomainCount triples.
PromptTemplate synthesize_template(std::span<const ElementTriple> triples, Gateway& gw,
                                   const SynthesisOptions& options = {});

struct InitOptions {
    bool include_supplements = true;
    bool parallel = false;
};

/// Extracts the in-domain triples and synthesizes `population_size` templates,
/// template k emphasizing image k mod 5: 5 + P chat calls in total.
Population init_population(const BenchmarkGroup& group, int population_size, Gateway& gw,
                           const InitOptions& options = {});

/// Same, from triples that were already extracted (P chat calls).
Population synthesize_population(std::span<const ElementTriple> triples, int population_size, Gateway& gw,
                                 const InitOptions& options = {});

} // namespace tmplevo
