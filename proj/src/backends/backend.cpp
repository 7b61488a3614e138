// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/backends/backend.hpp"

#include <array>

#include "tmplevo/hashing.hpp"

namespace tmplevo {

namespace {

constexpr std::array<std::pair<OperationKind, std::string_view>, 6> kKinds{{
    {OperationKind::Extract, "Extract"},
    {OperationKind::Synthesize, "Synthesize"},
    {OperationKind::Diff, "Diff"},
    {OperationKind::Common, "Common"},
    {OperationKind::Mutate, "Mutate"},
    {OperationKind::Crossover, "Crossover"},
}};

} // namespace

std::string_view to_string(OperationKind kind) {
    for (const auto& [k, name] : kKinds) {
        if (k == kind) return name;
    }
    return "Unknown";
}

std::optional<OperationKind> parse_operation_kind(std::string_view text) {
    for (const auto& [k, name] : kKinds) {
        if (name == text) return k;
    }
    return std::nullopt;
}

std::string_view to_string(ImageQuality q) {
    return q == ImageQuality::Standard ? "standard" : "hd";
}

json to_json(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        json jm{{"role", m.role}, {"text", m.text}};
        if (m.image) {
            jm["image"] = {{"uri", m.image->uri}, {"digest", digest(m.image->data)}};
        }
        messages.push_back(std::move(jm));
    }
    return json{{"kind", to_string(request.kind)},
                {"messages", messages},
                {"temperature", request.temperature},
                {"seed", request.seed ? json(*request.seed) : json(nullptr)}};
}

std::int64_t estimate_tokens(const ChatRequest& request) {
    std::int64_t chars = 0;
    for (const auto& m : request.messages) {
        for (unsigned char c : m.text) {
            if ((c & 0xC0) != 0x80) ++chars;
        }
    }
    return (chars + 3) / 4;
}

} // namespace tmplevo
