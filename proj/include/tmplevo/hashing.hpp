// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tmplevo {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// FNV-1a 64-bit over the raw bytes of `data`.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = kFnvOffsetBasis;
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

/// Lower-case, zero-padded 16 digit hex.
std::string hex64(std::uint64_t value);

/// Short content digest used for event-log input/output hashes and cache keys.
inline std::string digest(std::string_view data) { return hex64(fnv1a64(data)); }

std::string sha256_hex(std::string_view data);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

} // namespace tmplevo
