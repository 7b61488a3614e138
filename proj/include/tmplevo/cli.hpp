// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: extract | steal | eval | bench | cost.
// Exit codes: 0 ok, 2 input error, 3 backend error, 4 corrupt state.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tmplevo/settings.hpp"

namespace tmplevo::cli {

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

/// Rewrites events.jsonl in `run_dir` to its first `lines` lines.
/// CorruptState when the file holds fewer.
void truncate_events(const std::filesystem::path& events_file, std::size_t lines);

} // namespace tmplevo::cli
