// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/prompts.hpp"

#include "prompt_assets.hpp"
#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"

namespace tmplevo::prompts {

std::span<const Asset> all() {
    return generated::kAssets;
}

std::string_view get(std::string_view name) {
    for (const auto& a : all()) {
        if (a.name == name) return a.text;
    }
    fail(ErrorKind::InvalidArgument, "unknown prompt asset '" + std::string(name) + "'");
}

std::string render(std::string_view name, const std::map<std::string, std::string>& vars) {
    std::string out(get(name));
    for (const auto& [key, value] : vars) {
        const std::string marker = "{{" + key + "}}";
        for (auto pos = out.find(marker); pos != std::string::npos; pos = out.find(marker, pos + value.size())) {
            out.replace(pos, marker.size(), value);
        }
    }
    return out;
}

std::string category_list() {
    return "- Artistic Style: genre, era or historical style, cultural and technological style.\n"
           "- Visual Composition and Structure: composition and layout, form and structure, scale, movement, "
           "perspective, pattern and ornamentation, level of detail.\n"
           "- Aesthetic and Emotional Atmosphere: tone and atmosphere, emotional atmosphere, lighting and shadow "
           "effects.\n"
           "- Medium and Material: medium, material, technique, texture, surface, color palette, brushwork, line "
           "quality, strokes, layering, transparency, opacity, resolution.";
}

json digests() {
    json out = json::array();
    for (const auto& a : all()) out.push_back({{"name", a.name}, {"sha256", sha256_hex(a.text)}});
    return out;
}

} // namespace tmplevo::prompts
