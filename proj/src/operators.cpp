// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/operators.hpp"

#include <algorithm>
#include <fmt/core.h>

#include "detail.hpp"
#include "tmplevo/backends/mock.hpp"
#include "tmplevo/extraction.hpp"

namespace tmplevo {

namespace {

constexpr std::string_view kSupplement = "supplement";

bool contains(const std::vector<std::string>& list, const std::string& x) {
    return std::find(list.begin(), list.end(), x) != list.end();
}

ChatRequest operator_request(OperationKind kind, std::string instructions, const json& payload,
                             std::optional<ImageRef> image = std::nullopt) {
    ChatRequest req;
    req.kind = kind;
    req.messages.push_back(detail::system_message(std::move(instructions)));
    req.messages.push_back({"user", wrap_payload(payload), std::move(image)});
    return req;
}

template <class Parse>
auto run_operator(Gateway& gw, ChatRequest req, Parse&& parse) {
    const std::string what = std::string(to_string(req.kind)) + " operator";
    return detail::chat_with_repair(gw, std::move(req), std::forward<Parse>(parse), ErrorKind::OperatorFailed,
                                    what, kParseRetries);
}

json reply_object(const std::string& reply) {
    auto j = find_json_object(reply);
    if (!j) fail(ErrorKind::MalformedOutput, "no JSON object found in model output");
    return *j;
}

} // namespace

json to_json(const DiffSet& diff) {
    json items = json::array();
    for (const auto& d : diff.items) {
        items.push_back({{"category", display_name(d.category)},
                         {"phrase", d.phrase},
                         {"source", d.source == DiffSource::A ? "a" : "b"}});
    }
    return items;
}

DiffSet diff_set_from_json(const json& j) {
    if (!j.is_array()) fail(ErrorKind::SchemaViolation, "differences must be an array");
    DiffSet out;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("category") || !item.contains("phrase") || !item.contains("source")) {
            fail(ErrorKind::SchemaViolation, "difference entries need category, phrase and source");
        }
        const auto c = parse_category(item.at("category").get<std::string>());
        if (!c) fail(ErrorKind::SchemaViolation, "unknown modifier category in difference");
        const auto src = item.at("source").get<std::string>();
        if (src != "a" && src != "b") fail(ErrorKind::SchemaViolation, "difference source must be \"a\" or \"b\"");
        std::string phrase = trim(item.at("phrase").get<std::string>());
        if (phrase.empty()) continue;
        DiffItem d{*c, std::move(phrase), src == "a" ? DiffSource::A : DiffSource::B};
        if (std::find(out.items.begin(), out.items.end(), d) == out.items.end()) out.items.push_back(std::move(d));
    }
    return out;
}

DiffSet identify_differences(const PromptTemplate& a, const PromptTemplate& b, Gateway& gw) {
    const json payload{{"a", to_json(a)}, {"b", to_json(b)}};
    return run_operator(gw, operator_request(OperationKind::Diff, prompts::render("diff.v1.txt"), payload),
                        [](const std::string& r) {
                            const json j = reply_object(r);
                            if (!j.contains("differences")) fail(ErrorKind::SchemaViolation, "missing 'differences'");
                            return diff_set_from_json(j.at("differences"));
                        });
}

CommonSet identify_commonalities(const PromptTemplate& a, const PromptTemplate& b, Gateway& gw) {
    const json payload{{"a", to_json(a)}, {"b", to_json(b)}};
    return run_operator(gw, operator_request(OperationKind::Common, prompts::render("common.v1.txt"), payload),
                        [](const std::string& r) {
                            const json j = reply_object(r);
                            if (!j.contains("common") || !j.at("common").is_array()) {
                                fail(ErrorKind::SchemaViolation, "missing 'common' array");
                            }
                            CommonSet out;
                            for (const auto& s : j.at("common")) {
                                if (!s.is_string()) fail(ErrorKind::SchemaViolation, "common entries must be strings");
                                append_unique(out.supplements, s.get<std::string>());
                            }
                            return out;
                        });
}

MutationPayload mutate(const DiffSet& diff, const CommonSet& common, const ImageRef& sample_image, Gateway& gw,
                       double mutation_factor, std::uint64_t seed) {
    if (!(mutation_factor >= 0.0 && mutation_factor <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "mutation factor must be in [0, 1]");
    }
    const json payload{{"differences", to_json(diff)},
                       {"common", common.supplements},
                       {"mutation_factor", mutation_factor}};
    auto req = operator_request(OperationKind::Mutate,
                                prompts::render("mutate.v1.txt", {{"mutation_factor", fmt::format("{:g}", mutation_factor)}}),
                                payload, sample_image);
    req.seed = seed;
    return run_operator(gw, std::move(req), [](const std::string& r) {
        const PromptTemplate t = parse_template(r);
        return MutationPayload{t.modifiers(), t.supplements()};
    });
}

PromptTemplate combine_mutation(const PromptTemplate& x1, const MutationPayload& payload) {
    Modifiers m = x1.modifiers();
    m.merge(payload.modifiers);
    auto supplements = x1.supplements();
    for (const auto& s : payload.supplements) append_unique(supplements, s);
    return PromptTemplate(std::move(m), std::move(supplements));
}

PromptTemplate common_part(const PromptTemplate& alpha, const PromptTemplate& beta) {
    Modifiers m;
    for (auto c : kModifierCategories) {
        for (const auto& p : alpha.modifiers().at(c)) {
            if (beta.modifiers().contains(c, p)) m.add(c, p);
        }
    }
    std::vector<std::string> supplements;
    for (const auto& s : alpha.supplements()) {
        if (contains(beta.supplements(), s)) supplements.push_back(s);
    }
    return PromptTemplate(std::move(m), std::move(supplements));
}

PromptTemplate merge_templates(const PromptTemplate& a, const PromptTemplate& b) {
    Modifiers m = a.modifiers();
    m.merge(b.modifiers());
    auto supplements = a.supplements();
    for (const auto& s : b.supplements()) append_unique(supplements, s);
    return PromptTemplate(std::move(m), std::move(supplements));
}

PromptTemplate crossover(const PromptTemplate& alpha, const PromptTemplate& beta, Gateway& gw, std::uint64_t seed) {
    const PromptTemplate common = common_part(alpha, beta);
    json differing = json::array();
    const auto add_side = [&](const PromptTemplate& from, const PromptTemplate& other, std::string_view source) {
        for (auto c : kModifierCategories) {
            for (const auto& p : from.modifiers().at(c)) {
                if (!other.modifiers().contains(c, p)) {
                    differing.push_back({{"category", display_name(c)}, {"phrase", p}, {"source", source}});
                }
            }
        }
    };
    add_side(alpha, beta, "alpha");
    add_side(beta, alpha, "beta");
    for (const auto& s : alpha.supplements()) {
        if (!contains(beta.supplements(), s)) differing.push_back({{"category", kSupplement}, {"phrase", s}, {"source", "alpha"}});
    }
    for (const auto& s : beta.supplements()) {
        if (!contains(alpha.supplements(), s)) differing.push_back({{"category", kSupplement}, {"phrase", s}, {"source", "beta"}});
    }
    const json payload{{"alpha", to_json(alpha)},
                       {"beta", to_json(beta)},
                       {"common", to_json(common)},
                       {"differing", differing}};
    auto req = operator_request(OperationKind::Crossover, prompts::render("crossover.v1.txt"), payload);
    req.seed = seed;
    const PromptTemplate chosen =
        run_operator(gw, std::move(req), [](const std::string& r) { return parse_template(r); });
    return merge_templates(common, chosen);
}

PromptTemplate refine_offspring(const PromptTemplate& offspring, const PromptTemplate& inherited, Gateway& gw,
                                bool include_supplements) {
    const json payload{{"template", to_json(offspring)}, {"include_supplements", include_supplements}};
    std::string instructions = prompts::render("refine.v1.txt", {{"categories", prompts::category_list()}});
    if (!include_supplements) instructions += "\nLeave \"supplements\" empty.\n";
    const PromptTemplate refined = detail::chat_with_repair(
        gw, operator_request(OperationKind::Synthesize, std::move(instructions), payload),
        [](const std::string& r) { return parse_template(r); }, ErrorKind::OperatorFailed, "offspring synthesis",
        kParseRetries);
    const PromptTemplate kept = merge_templates(refined, inherited);
    return include_supplements ? kept : kept.without_supplements();
}

} // namespace tmplevo
