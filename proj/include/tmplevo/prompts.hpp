// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Instruction texts for the chat operations. The sources live under
// assets/prompts/ as versioned plain-text files and are compiled in.

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "tmplevo/model.hpp"

namespace tmplevo::prompts {

struct Asset {
    std::string_view name; ///< file name, e.g. "extract.v1.txt"
    std::string_view text;
};

std::span<const Asset> all();

/// Asset text by file name; InvalidArgument if unknown.
std::string_view get(std::string_view name);

/// Asset text with every "{{key}}" replaced by its value.
std::string render(std::string_view name, const std::map<std::string, std::string>& vars = {});

/// The four modifier categories as a bullet list with their scope.
std::string category_list();

/// [{"name": ..., "sha256": ...}] for the run log.
json digests();

} // namespace tmplevo::prompts
