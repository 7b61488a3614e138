// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmplevo {

enum class ErrorKind {
    InvalidArgument,
    EmptySubject,
    MalformedOutput,
    SchemaViolation,
    CorruptState,
    ManifestError,
    InputError,
    TransportError,
    AuthError,
    RateLimited,
    ContentRejected,
    DimensionMismatch,
    ExtractionFailed,
    SynthesisFailed,
    OperatorFailed,
    EvolutionFailed,
    MissingGroundTruth,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return mKind; }

private:
    ErrorKind mKind;
};

/// Process exit code for an error kind: 2 input, 3 backend, 4 corrupt state.
int exit_code_for(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline bool is_backend_error(ErrorKind kind) {
    return exit_code_for(kind) == 3;
}

} // namespace tmplevo
