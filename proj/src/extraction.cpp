// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/extraction.hpp"

#include "detail.hpp"
#include "tmplevo/backends/mock.hpp"

namespace tmplevo {

ElementTriple extract_elements(const ImageRef& image, Gateway& gw) {
    ChatRequest req;
    req.kind = OperationKind::Extract;
    req.messages.push_back(detail::system_message(
        prompts::render("extract.v1.txt", {{"categories", prompts::category_list()}})));
    req.messages.push_back({"user", "Extract the subject, modifiers and supplements of this image.", image});
    return detail::chat_with_repair(gw, std::move(req), [](const std::string& r) { return parse_triple(r); },
                                    ErrorKind::ExtractionFailed, "element extraction", kParseRetries);
}

std::vector<ElementTriple> extract_group(const BenchmarkGroup& group, Gateway& gw, bool parallel) {
    std::vector<ElementTriple> triples(group.in_domain.size());
    std::vector<Gateway> scopes;
    for (std::size_t i = 0; i < group.in_domain.size(); ++i) {
        scopes.push_back(gw.scoped(gw.phase(), -1, static_cast<int>(i)));
    }
    detail::for_each_index(triples.size(), parallel, [&](std::size_t i) {
        triples[i] = extract_elements(group.in_domain[i].image, scopes[i]);
    });
    for (auto& s : scopes) gw.absorb(s.take_events());
    return triples;
}

PromptTemplate synthesize_template(std::span<const ElementTriple> triples, Gateway& gw,
                                   const SynthesisOptions& options) {
    if (triples.size() != kInDomainCount) {
        fail(ErrorKind::InvalidArgument, "synthesis needs exactly " + std::to_string(kInDomainCount) +
                                             " triples, got " + std::to_string(triples.size()));
    }
    json list = json::array();
    for (const auto& t : triples) list.push_back(to_json(t));
    const json payload{{"triples", list},
                       {"emphasis", options.emphasis ? json(*options.emphasis) : json(nullptr)},
                       {"include_supplements", options.include_supplements}};

    std::string text;
    if (options.emphasis) {
        text += "Write a variant that gives extra weight to the style details of image " +
                std::to_string(*options.emphasis + 1) + " while keeping the shared style.\n";
    }
    if (!options.include_supplements) text += "Leave \"supplements\" empty.\n";
    text += wrap_payload(payload);

    ChatRequest req;
    req.kind = OperationKind::Synthesize;
    req.messages.push_back(detail::system_message(
        prompts::render("synthesize.v1.txt", {{"categories", prompts::category_list()}})));
    req.messages.push_back({"user", std::move(text), std::nullopt});
    PromptTemplate t = detail::chat_with_repair(gw, std::move(req),
                                                [](const std::string& r) { return parse_template(r); },
                                                ErrorKind::SynthesisFailed, "template synthesis", kParseRetries);
    return options.include_supplements ? t : t.without_supplements();
}

Population synthesize_population(std::span<const ElementTriple> triples, int population_size, Gateway& gw,
                                 const InitOptions& options) {
    if (population_size < 2) fail(ErrorKind::InvalidArgument, "population size must be >= 2");
    const auto n = static_cast<std::size_t>(population_size);
    std::vector<PromptTemplate> templates(n);
    std::vector<Gateway> scopes;
    for (std::size_t k = 0; k < n; ++k) scopes.push_back(gw.scoped(gw.phase(), 0, static_cast<int>(k)));
    detail::for_each_index(n, options.parallel, [&](std::size_t k) {
        templates[k] = synthesize_template(
            triples, scopes[k], SynthesisOptions{k % triples.size(), options.include_supplements});
    });
    for (auto& s : scopes) gw.absorb(s.take_events());

    Population pop;
    pop.generation = 0;
    for (std::size_t k = 0; k < n; ++k) {
        Individual ind;
        ind.id = "g0-i" + std::to_string(k);
        ind.tmpl = std::move(templates[k]);
        ind.generation = 0;
        pop.individuals.push_back(std::move(ind));
    }
    return pop;
}

Population init_population(const BenchmarkGroup& group, int population_size, Gateway& gw,
                           const InitOptions& options) {
    if (population_size < 2) fail(ErrorKind::InvalidArgument, "population size must be >= 2");
    const auto triples = extract_group(group, gw, options.parallel);
    return synthesize_population(triples, population_size, gw, options);
}

} // namespace tmplevo
