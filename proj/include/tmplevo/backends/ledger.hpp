// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cost accounting. Every backend call lands in the ledger under a phase tag
// ("init", "init_fitness", "de", "eval", ...). Totals are a pure fold over
// recorded deltas, so replaying events.jsonl reconstructs a ledger exactly.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "tmplevo/model.hpp"

namespace tmplevo {

struct LedgerDelta {
    std::int64_t chat = 0;
    std::int64_t embed = 0;
    std::int64_t images = 0;
    std::int64_t tokens = 0;

    LedgerDelta& operator+=(const LedgerDelta& o) {
        chat += o.chat;
        embed += o.embed;
        images += o.images;
        tokens += o.tokens;
        return *this;
    }
    bool operator==(const LedgerDelta&) const = default;
};

json to_json(const LedgerDelta& d);
LedgerDelta ledger_delta_from_json(const json& j);

/// Unit prices in USD. The defaults are back-solved from reference per-phase
/// totals: they reproduce a $1.70 run for 144 chat calls and 34 images, and
/// $0.36 for a 9-call, 9-image final phase.
struct Pricing {
    double chat_call = 0.0031;
    double embed_call = 0.0;
    double image = 0.0369;
    double token = 0.0;

    [[nodiscard]] double cost(const LedgerDelta& d) const {
        return static_cast<double>(d.chat) * chat_call + static_cast<double>(d.embed) * embed_call +
               static_cast<double>(d.images) * image + static_cast<double>(d.tokens) * token;
    }
};

struct LedgerSnapshot {
    std::map<std::string, LedgerDelta> by_phase;

    [[nodiscard]] LedgerDelta total() const;
    [[nodiscard]] LedgerDelta phase(std::string_view name) const;

    bool operator==(const LedgerSnapshot&) const = default;
};

json to_json(const LedgerSnapshot& s);
LedgerSnapshot ledger_snapshot_from_json(const json& j);

/// Thread-safe accumulator. Counters only ever grow.
class CostLedger {
public:
    CostLedger() = default;
    explicit CostLedger(LedgerSnapshot initial) : mState(std::move(initial)) {}

    void record(std::string_view phase, const LedgerDelta& delta);
    [[nodiscard]] LedgerSnapshot snapshot() const;

private:
    mutable std::mutex mMutex;
    LedgerSnapshot mState;
};

struct CostReport {
    struct Row {
        std::string phase;
        LedgerDelta usage;
        double cost = 0.0;
    };
    std::vector<Row> phases;
    LedgerDelta totals;
    double total_cost = 0.0;

    /// API calls as counted in the cost breakdown: chat completions.
    [[nodiscard]] std::int64_t api_calls() const { return totals.chat; }

    /// "144 calls, 34 images, 119.1k tokens, $1.70"
    [[nodiscard]] std::string summary_line() const;
    [[nodiscard]] std::string to_text() const;
    [[nodiscard]] json to_json() const;
};

CostReport ledger_report(const LedgerSnapshot& ledger, const Pricing& pricing = {});

/// Folds the "delta" of every event in a JSON-lines stream, keyed by "phase".
LedgerSnapshot replay_events(std::istream& events_jsonl);

} // namespace tmplevo
