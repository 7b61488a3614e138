// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/backends/ledger.hpp"

#include <algorithm>
#include <array>

#include <fmt/core.h>

#include "tmplevo/error.hpp"

namespace tmplevo {

json to_json(const LedgerDelta& d) {
    return json{{"chat", d.chat}, {"embed", d.embed}, {"images", d.images}, {"tokens", d.tokens}};
}

LedgerDelta ledger_delta_from_json(const json& j) {
    LedgerDelta d;
    d.chat = j.value("chat", std::int64_t{0});
    d.embed = j.value("embed", std::int64_t{0});
    d.images = j.value("images", std::int64_t{0});
    d.tokens = j.value("tokens", std::int64_t{0});
    if (d.chat < 0 || d.embed < 0 || d.images < 0 || d.tokens < 0) {
        fail(ErrorKind::CorruptState, "ledger counters must be non-negative");
    }
    return d;
}

LedgerDelta LedgerSnapshot::total() const {
    LedgerDelta t;
    for (const auto& [_, d] : by_phase) t += d;
    return t;
}

LedgerDelta LedgerSnapshot::phase(std::string_view name) const {
    const auto it = by_phase.find(std::string(name));
    return it == by_phase.end() ? LedgerDelta{} : it->second;
}

json to_json(const LedgerSnapshot& s) {
    json j = json::object();
    for (const auto& [phase, d] : s.by_phase) j[phase] = to_json(d);
    return j;
}

LedgerSnapshot ledger_snapshot_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorKind::CorruptState, "ledger must be an object");
    LedgerSnapshot s;
    for (const auto& [phase, d] : j.items()) s.by_phase[phase] = ledger_delta_from_json(d);
    return s;
}

void CostLedger::record(std::string_view phase, const LedgerDelta& delta) {
    std::lock_guard lock(mMutex);
    mState.by_phase[std::string(phase)] += delta;
}

LedgerSnapshot CostLedger::snapshot() const {
    std::lock_guard lock(mMutex);
    return mState;
}

namespace {

// Pipeline order first, anything else alphabetically after.
int phase_rank(const std::string& phase) {
    static constexpr std::array<std::string_view, 5> kOrder{"init", "init_fitness", "de", "eval", "final"};
    const auto it = std::find(kOrder.begin(), kOrder.end(), phase);
    return it == kOrder.end() ? static_cast<int>(kOrder.size()) : static_cast<int>(it - kOrder.begin());
}

std::string format_tokens(std::int64_t tokens) {
    return fmt::format("{:.1f}k", static_cast<double>(tokens) / 1000.0);
}

} // namespace

CostReport ledger_report(const LedgerSnapshot& ledger, const Pricing& pricing) {
    CostReport r;
    for (const auto& [phase, d] : ledger.by_phase) r.phases.push_back({phase, d, pricing.cost(d)});
    std::stable_sort(r.phases.begin(), r.phases.end(), [](const auto& a, const auto& b) {
        return phase_rank(a.phase) < phase_rank(b.phase);
    });
    r.totals = ledger.total();
    for (const auto& row : r.phases) r.total_cost += row.cost;
    return r;
}

std::string CostReport::summary_line() const {
    return fmt::format("{} calls, {} images, {} tokens, ${:.2f}", api_calls(), totals.images,
                       format_tokens(totals.tokens), total_cost);
}

std::string CostReport::to_text() const {
    std::string out = fmt::format("{:<14} {:>6} {:>6} {:>7} {:>10} {:>8}\n", "phase", "calls", "embed",
                                  "images", "tokens", "cost");
    for (const auto& row : phases) {
        out += fmt::format("{:<14} {:>6} {:>6} {:>7} {:>10} {:>8}\n", row.phase, row.usage.chat,
                           row.usage.embed, row.usage.images, format_tokens(row.usage.tokens),
                           fmt::format("${:.2f}", row.cost));
    }
    out += "total: " + summary_line() + "\n";
    return out;
}

json CostReport::to_json() const {
    json rows = json::array();
    for (const auto& row : phases) {
        rows.push_back({{"phase", row.phase}, {"usage", tmplevo::to_json(row.usage)}, {"cost_usd", row.cost}});
    }
    return json{{"phases", rows},
                {"api_calls", api_calls()},
                {"totals", tmplevo::to_json(totals)},
                {"total_cost_usd", total_cost},
                {"summary", summary_line()}};
}

LedgerSnapshot replay_events(std::istream& events_jsonl) {
    LedgerSnapshot s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(events_jsonl, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json e = json::parse(line, nullptr, false);
        if (e.is_discarded() || !e.is_object()) {
            fail(ErrorKind::CorruptState, "events line " + std::to_string(lineno) + " is not a JSON object");
        }
        if (!e.contains("delta")) continue;
        s.by_phase[e.value("phase", std::string("unknown"))] += ledger_delta_from_json(e.at("delta"));
    }
    return s;
}

} // namespace tmplevo
