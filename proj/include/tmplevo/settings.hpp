// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration. Sources are layered: built-in defaults, then the TOML
// file, then TMPLEVO_* environment variables, then command-line flags.
//
//   profile = "mock"
//   [evolution]   population_size, generations, mutation_factor, lambda,
//                 seed, use_supplements, use_image_fitness, strict_sampling,
//                 deterministic
//   [pricing]     chat_call, embed_call, image, token
//   [metrics]     dino, clip, siglip  (profile names; default: active profile)
//   [backends.<name>]
//       kind = "mock" | "http"
//       mock: dim, rejected_phrases
//       http: base_url, chat_model, embedding_model, embedding_dim,
//             image_model, api_key_env, max_attempts, backoff_ms,
//             max_in_flight, timeout_s, fixtures

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "tmplevo/backends/http.hpp"
#include "tmplevo/backends/ledger.hpp"
#include "tmplevo/backends/mock.hpp"
#include "tmplevo/config.hpp"

namespace tmplevo {

struct BackendProfile {
    std::string name;
    std::string kind = "mock";
    MockOptions mock;
    HttpBackendConfig http;
    /// Replay recorded responses from this directory instead of the network.
    std::optional<std::filesystem::path> fixtures;
};

struct Settings {
    EvolutionConfig evolution;
    std::string profile = "mock";
    std::map<std::string, BackendProfile> profiles;
    Pricing pricing;
    std::optional<std::string> dino_profile;
    std::optional<std::string> clip_profile;
    std::optional<std::string> siglip_profile;

    [[nodiscard]] const BackendProfile& active() const;
    [[nodiscard]] const BackendProfile& profile_named(const std::string& name) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Defaults with the built-in "mock" profile.
Settings default_settings();

/// Applies a TOML document. InputError on syntax or type errors.
void apply_toml(Settings& settings, std::string_view toml_text, std::string_view source_name = "config");
void apply_config_file(Settings& settings, const std::filesystem::path& path);

/// TMPLEVO_PROFILE, TMPLEVO_SEED, TMPLEVO_POP, TMPLEVO_GENS,
/// TMPLEVO_MUTATION_FACTOR, TMPLEVO_LAMBDA, TMPLEVO_DETERMINISTIC,
/// TMPLEVO_NO_SUPPLEMENTS, TMPLEVO_NO_IMAGE_FITNESS.
void apply_env(Settings& settings, const EnvLookup& env);

/// Snapshot for the run directory. Names the key variables, never their values.
json to_json(const Settings& settings);

/// Backends instantiated from a profile.
struct BackendSet {
    std::unique_ptr<ChatBackend> chat_owner;
    ChatBackend* chat = nullptr;
    ImageGenerator* images = nullptr;
    EmbeddingProvider* embedder = nullptr;
};

BackendSet make_backends(const BackendProfile& profile);

} // namespace tmplevo
