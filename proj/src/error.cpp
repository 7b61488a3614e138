// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/error.hpp"

namespace tmplevo {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::EmptySubject: return "EmptySubject";
        case ErrorKind::MalformedOutput: return "MalformedOutput";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
        case ErrorKind::CorruptState: return "CorruptState";
        case ErrorKind::ManifestError: return "ManifestError";
        case ErrorKind::InputError: return "InputError";
        case ErrorKind::TransportError: return "TransportError";
        case ErrorKind::AuthError: return "AuthError";
        case ErrorKind::RateLimited: return "RateLimited";
        case ErrorKind::ContentRejected: return "ContentRejected";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ExtractionFailed: return "ExtractionFailed";
        case ErrorKind::SynthesisFailed: return "SynthesisFailed";
        case ErrorKind::OperatorFailed: return "OperatorFailed";
        case ErrorKind::EvolutionFailed: return "EvolutionFailed";
        case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), mKind(kind) {}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::CorruptState:
            return 4;
        case ErrorKind::TransportError:
        case ErrorKind::AuthError:
        case ErrorKind::RateLimited:
        case ErrorKind::ContentRejected:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ExtractionFailed:
        case ErrorKind::SynthesisFailed:
        case ErrorKind::OperatorFailed:
        case ErrorKind::EvolutionFailed:
            return 3;
        default:
            return 2;
    }
}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace tmplevo
