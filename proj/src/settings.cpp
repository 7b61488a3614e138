// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/settings.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "tmplevo/error.hpp"

namespace tmplevo {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_key(std::string_view source, std::string_view key, std::string_view want) {
    fail(ErrorKind::InputError, fmt::format("{}: '{}' must be {}", source, key, want));
}

// Each reader leaves `out` untouched when the key is absent.
void read(const toml::table& t, std::string_view key, std::string& out, std::string_view src) {
    if (const auto* n = t.get(key)) {
        if (auto v = n->value<std::string>()) out = *v;
        else bad_key(src, key, "a string");
    }
}

void read(const toml::table& t, std::string_view key, double& out, std::string_view src) {
    if (const auto* n = t.get(key)) {
        if (auto v = n->value<double>()) out = *v;
        else bad_key(src, key, "a number");
    }
}

void read(const toml::table& t, std::string_view key, bool& out, std::string_view src) {
    if (const auto* n = t.get(key)) {
        if (auto v = n->value<bool>()) out = *v;
        else bad_key(src, key, "a boolean");
    }
}

template <class Int>
void read_int(const toml::table& t, std::string_view key, Int& out, std::string_view src) {
    if (const auto* n = t.get(key)) {
        const auto v = n->value<std::int64_t>();
        if (!v || *v < 0) bad_key(src, key, "a non-negative integer");
        out = static_cast<Int>(*v);
    }
}

void read_profile(const toml::table& t, BackendProfile& p, std::string_view src) {
    read(t, "kind", p.kind, src);
    if (p.kind != "mock" && p.kind != "http") bad_key(src, "kind", "\"mock\" or \"http\"");
    read_int(t, "dim", p.mock.dim, src);
    if (const auto* arr = t.get_as<toml::array>("rejected_phrases")) {
        p.mock.rejected_phrases.clear();
        for (const auto& e : *arr) {
            auto v = e.value<std::string>();
            if (!v) bad_key(src, "rejected_phrases", "a list of strings");
            p.mock.rejected_phrases.insert(*v);
        }
    }
    read(t, "base_url", p.http.base_url, src);
    read(t, "chat_model", p.http.chat_model, src);
    read(t, "embedding_model", p.http.embedding_model, src);
    read_int(t, "embedding_dim", p.http.embedding_dim, src);
    read(t, "image_model", p.http.image_model, src);
    read(t, "api_key_env", p.http.api_key_env, src);
    if (t.contains("api_key")) {
        fail(ErrorKind::InputError, fmt::format("{}: API keys are read from the environment only; set api_key_env", src));
    }
    read_int(t, "max_attempts", p.http.retry.max_attempts, src);
    std::int64_t backoff = p.http.retry.base_backoff.count();
    read_int(t, "backoff_ms", backoff, src);
    p.http.retry.base_backoff = std::chrono::milliseconds(backoff);
    read_int(t, "max_in_flight", p.http.max_in_flight, src);
    std::int64_t timeout = p.http.timeout.count();
    read_int(t, "timeout_s", timeout, src);
    p.http.timeout = std::chrono::seconds(timeout);
    std::string fixtures;
    read(t, "fixtures", fixtures, src);
    if (!fixtures.empty()) p.fixtures = fs::path(fixtures);
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

template <class T>
T parse_number(const std::string& name, const std::string& text) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (in.fail() || !in.eof()) fail(ErrorKind::InputError, fmt::format("{}: cannot parse '{}'", name, text));
    return value;
}

} // namespace

const BackendProfile& Settings::profile_named(const std::string& name) const {
    auto it = profiles.find(name);
    if (it == profiles.end()) fail(ErrorKind::InputError, "unknown backend profile '" + name + "'");
    return it->second;
}

const BackendProfile& Settings::active() const { return profile_named(profile); }

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

Settings default_settings() {
    Settings s;
    BackendProfile mock;
    mock.name = "mock";
    s.profiles.emplace("mock", mock);
    return s;
}

void apply_toml(Settings& s, std::string_view text, std::string_view source_name) {
    toml::table doc;
    try {
        doc = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        fail(ErrorKind::InputError, fmt::format("{}: {}", source_name, e.description()));
    }
    read(doc, "profile", s.profile, source_name);

    if (const auto* ev = doc.get_as<toml::table>("evolution")) {
        auto& c = s.evolution;
        read_int(*ev, "population_size", c.population_size, source_name);
        read_int(*ev, "generations", c.generations, source_name);
        read(*ev, "mutation_factor", c.mutation_factor, source_name);
        read(*ev, "lambda", c.lambda, source_name);
        read_int(*ev, "seed", c.seed, source_name);
        read(*ev, "use_supplements", c.use_supplements, source_name);
        read(*ev, "use_image_fitness", c.use_image_fitness, source_name);
        read(*ev, "strict_sampling", c.strict_sampling, source_name);
        read(*ev, "deterministic", c.deterministic, source_name);
    }
    if (const auto* pr = doc.get_as<toml::table>("pricing")) {
        read(*pr, "chat_call", s.pricing.chat_call, source_name);
        read(*pr, "embed_call", s.pricing.embed_call, source_name);
        read(*pr, "image", s.pricing.image, source_name);
        read(*pr, "token", s.pricing.token, source_name);
    }
    if (const auto* m = doc.get_as<toml::table>("metrics")) {
        auto slot = [&](std::string_view key, std::optional<std::string>& out) {
            std::string v;
            read(*m, key, v, source_name);
            if (!v.empty()) out = v;
        };
        slot("dino", s.dino_profile);
        slot("clip", s.clip_profile);
        slot("siglip", s.siglip_profile);
    }
    if (const auto* backends = doc.get_as<toml::table>("backends")) {
        for (const auto& [key, node] : *backends) {
            const auto* t = node.as_table();
            const std::string name(key.str());
            if (!t) fail(ErrorKind::InputError, fmt::format("{}: backends.{} must be a table", source_name, name));
            auto [it, inserted] = s.profiles.try_emplace(name);
            it->second.name = name;
            read_profile(*t, it->second, fmt::format("{}: backends.{}", source_name, name));
        }
    }
}

void apply_config_file(Settings& s, const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InputError, "cannot read config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_toml(s, ss.str(), path.string());
}

void apply_env(Settings& s, const EnvLookup& env) {
    if (!env) return;
    auto& c = s.evolution;
    if (auto v = env("TMPLEVO_PROFILE")) s.profile = *v;
    if (auto v = env("TMPLEVO_SEED")) c.seed = parse_number<std::uint64_t>("TMPLEVO_SEED", *v);
    if (auto v = env("TMPLEVO_POP")) c.population_size = parse_number<int>("TMPLEVO_POP", *v);
    if (auto v = env("TMPLEVO_GENS")) c.generations = parse_number<int>("TMPLEVO_GENS", *v);
    if (auto v = env("TMPLEVO_MUTATION_FACTOR")) c.mutation_factor = parse_number<double>("TMPLEVO_MUTATION_FACTOR", *v);
    if (auto v = env("TMPLEVO_LAMBDA")) c.lambda = parse_number<double>("TMPLEVO_LAMBDA", *v);
    if (auto v = env("TMPLEVO_DETERMINISTIC")) c.deterministic = truthy(*v);
    if (auto v = env("TMPLEVO_NO_SUPPLEMENTS")) c.use_supplements = !truthy(*v);
    if (auto v = env("TMPLEVO_NO_IMAGE_FITNESS")) c.use_image_fitness = !truthy(*v);
}

json to_json(const Settings& s) {
    json profiles = json::object();
    for (const auto& [name, p] : s.profiles) {
        json j{{"kind", p.kind}};
        if (p.kind == "mock") {
            j["dim"] = p.mock.dim;
            j["rejected_phrases"] = p.mock.rejected_phrases;
        } else {
            j["base_url"] = p.http.base_url;
            j["chat_model"] = p.http.chat_model;
            j["embedding_model"] = p.http.embedding_model;
            j["embedding_dim"] = p.http.embedding_dim;
            j["image_model"] = p.http.image_model;
            j["api_key_env"] = p.http.api_key_env;
            j["max_attempts"] = p.http.retry.max_attempts;
            j["backoff_ms"] = p.http.retry.base_backoff.count();
            j["max_in_flight"] = p.http.max_in_flight;
            j["timeout_s"] = p.http.timeout.count();
            if (p.fixtures) j["fixtures"] = p.fixtures->generic_string();
        }
        profiles[name] = std::move(j);
    }
    json metrics = json::object();
    metrics["dino"] = s.dino_profile.value_or(s.profile);
    metrics["clip"] = s.clip_profile.value_or(s.profile);
    metrics["siglip"] = s.siglip_profile.value_or(s.profile);
    return json{{"profile", s.profile},
                {"evolution", to_json(s.evolution)},
                {"pricing",
                 {{"chat_call", s.pricing.chat_call},
                  {"embed_call", s.pricing.embed_call},
                  {"image", s.pricing.image},
                  {"token", s.pricing.token}}},
                {"metrics", metrics},
                {"backends", profiles}};
}

BackendSet make_backends(const BackendProfile& profile) {
    BackendSet set;
    if (profile.kind == "mock") {
        auto mock = std::make_unique<MockBackend>(profile.mock);
        set.images = mock.get();
        set.embedder = mock.get();
        set.chat = mock.get();
        set.chat_owner = std::move(mock);
    } else {
        std::unique_ptr<Transport> transport;
        if (profile.fixtures) transport = std::make_unique<FixtureTransport>(*profile.fixtures);
        else transport = std::make_unique<HttplibTransport>(profile.http.base_url, profile.http.timeout);
        auto http = std::make_unique<HttpBackend>(profile.http, std::move(transport));
        set.images = http.get();
        set.embedder = http.get();
        set.chat = http.get();
        set.chat_owner = std::move(http);
    }
    return set;
}

} // namespace tmplevo
