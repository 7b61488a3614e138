// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Writes a tag-world benchmark (manifest plus image records) for the mock profile.

#include <iostream>

#include <CLI11.hpp>

#include "tmplevo/error.hpp"
#include "tmplevo/mock_world.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a tag-world mock benchmark"};
    tmplevo::MockWorldOptions options;
    std::string out = "mock-world";
    bool vocab = false;
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", options.seed, "world seed");
    app.add_option("--groups", options.groups, "number of groups");
    app.add_option("--hidden-tags", options.hidden_tags, "tags in each hidden template");
    app.add_option("--noise-tags", options.noise_tags, "noise tags per image");
    app.add_flag("--print-vocabulary", vocab, "print the collision-free vocabulary and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        if (vocab) {
            for (const auto& w : tmplevo::collision_free_vocabulary(options.dim)) std::cout << w << "\n";
            return 0;
        }
        const auto world = tmplevo::make_mock_world(options);
        const auto manifest = tmplevo::write_mock_world(world, out);
        for (const auto& g : world) std::cout << g.group.group_id << ": " << g.hidden.slot_form() << "\n";
        std::cout << "manifest: " << manifest.string() << "\n";
    } catch (const tmplevo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tmplevo::exit_code_for(e.kind());
    }
    return 0;
}
