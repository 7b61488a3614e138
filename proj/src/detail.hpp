// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Internal helpers shared by the pipeline stages.

#pragma once

#include <cstddef>
#include <exception>
#include <string>
#include <vector>

#include "tmplevo/backends/gateway.hpp"
#include "tmplevo/error.hpp"
#include "tmplevo/prompts.hpp"

namespace tmplevo::detail {

/// Runs fn(i) for i in [0, n), across OpenMP threads when `parallel`. The
/// first failure by index is rethrown after all tasks finish.
template <class Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Sends `request` and parses the reply. Parse failures (MalformedOutput,
/// SchemaViolation) trigger up to `retries` repair rounds, each a separate
/// logical call; after that the call fails with `failure`.
template <class Parse>
auto chat_with_repair(Gateway& gw, ChatRequest request, Parse&& parse, ErrorKind failure,
                      const std::string& what, int retries) {
    for (int attempt = 0;; ++attempt) {
        std::string reply = gw.chat(request);
        try {
            return parse(reply);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MalformedOutput && e.kind() != ErrorKind::SchemaViolation) throw;
            if (attempt >= retries) {
                fail(failure, what + " failed after " + std::to_string(attempt + 1) + " attempts: " + e.what());
            }
            request.messages.push_back({"assistant", std::move(reply), std::nullopt});
            request.messages.push_back(
                {"user", prompts::render("repair.v1.txt", {{"reason", e.what()}}), std::nullopt});
        }
    }
}

inline ChatMessage system_message(std::string text) {
    return {"system", std::move(text), std::nullopt};
}

} // namespace tmplevo::detail
