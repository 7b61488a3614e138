// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tmplevo/error.hpp"
#include "tmplevo/evaluation.hpp"
#include "tmplevo/evolution.hpp"
#include "tmplevo/extraction.hpp"
#include "tmplevo/manifest.hpp"
#include "tmplevo/prompts.hpp"
#include "tmplevo/run_state.hpp"

namespace tmplevo::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
    std::optional<std::string> config;
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
};

struct StealFlags {
    std::string manifest;
    std::string group;
    std::string out;
    std::optional<int> pop;
    std::optional<int> gens;
    std::optional<double> mutation_factor;
    std::optional<double> lambda;
    bool no_supplements = false;
    bool no_image_fitness = false;
    bool resume = false;
    bool force = false;
    bool skip_eval = false;
    std::optional<int> stop_after;
};

// Thrown from the checkpoint hook to end a run early, after the checkpoint
// for the requested generation is on disk.
struct StopRequested {
    int generation;
};

/// Exclusive advisory lock on <dir>/.lock, held for the object's lifetime.
class RunLock {
public:
    explicit RunLock(const fs::path& dir) {
        fs::create_directories(dir);
        const fs::path file = dir / ".lock";
        mFd = ::open(file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (mFd < 0) fail(ErrorKind::InputError, "cannot open lock file " + file.string());
        if (::flock(mFd, LOCK_EX | LOCK_NB) != 0) {
            ::close(mFd);
            fail(ErrorKind::InputError, "run directory is in use by another process: " + dir.string());
        }
    }
    ~RunLock() {
        ::flock(mFd, LOCK_UN);
        ::close(mFd);
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    int mFd = -1;
};

std::string read_file(const fs::path& path, ErrorKind kind, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kind, fmt::format("{} not found: {}", what, path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write-then-rename so readers never see a partial file.
void write_file(const fs::path& path, std::string_view bytes) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << bytes;
        out.flush();
        if (!out) fail(ErrorKind::InputError, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void append_events(const fs::path& path, const std::vector<json>& events) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    for (const auto& e : events) out << e.dump() << '\n';
    out.flush();
    if (!out) fail(ErrorKind::InputError, "cannot append to " + path.string());
}

Settings resolve(const GlobalFlags& g, const EnvLookup& env) {
    Settings s = default_settings();
    std::optional<std::string> config = g.config;
    if (!config && env) config = env("TMPLEVO_CONFIG");
    if (config) apply_config_file(s, *config);
    apply_env(s, env);
    if (g.profile) s.profile = *g.profile;
    if (g.seed) s.evolution.seed = *g.seed;
    if (g.deterministic) s.evolution.deterministic = true;
    (void)s.active();
    return s;
}

void apply_steal_flags(Settings& s, const StealFlags& f) {
    auto& c = s.evolution;
    if (f.pop) c.population_size = *f.pop;
    if (f.gens) c.generations = *f.gens;
    if (f.mutation_factor) c.mutation_factor = *f.mutation_factor;
    if (f.lambda) c.lambda = *f.lambda;
    if (f.no_supplements) c.use_supplements = false;
    if (f.no_image_fitness) c.use_image_fitness = false;
    validate(c);
}

/// Backends for the active profile plus any extra profiles the metric slots name.
struct Providers {
    BackendSet main;
    std::map<std::string, BackendSet> extra;
    MetricProviders metrics;

    explicit Providers(const Settings& s) : main(make_backends(s.active())) {
        auto slot = [&](const std::optional<std::string>& name) -> EmbeddingProvider* {
            if (!name || *name == s.profile) return main.embedder;
            auto it = extra.find(*name);
            if (it == extra.end()) it = extra.emplace(*name, make_backends(s.profile_named(*name))).first;
            return it->second.embedder;
        };
        metrics.dino = slot(s.dino_profile);
        metrics.clip = slot(s.clip_profile);
        metrics.siglip = slot(s.siglip_profile);
    }
};

const BenchmarkGroup& load_group(std::vector<BenchmarkGroup>& storage, const std::string& manifest,
                                 const std::string& group_id) {
    storage = load_manifest(manifest);
    return find_group(storage, group_id);
}

std::optional<fs::path> latest_checkpoint(const fs::path& dir) {
    std::optional<fs::path> best;
    int best_gen = -1;
    if (!fs::exists(dir)) return best;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("gen-", 0) != 0 || entry.path().extension() != ".json") continue;
        const std::string digits = name.substr(4, name.size() - 4 - 5);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
        const int gen = std::stoi(digits);
        if (gen > best_gen) {
            best_gen = gen;
            best = entry.path();
        }
    }
    return best;
}

void print_reports(std::ostream& out, const MetricReport& in, const MetricReport& ood) {
    const std::array<MetricReport, 2> both{in, ood};
    out << to_csv(both);
}

json evaluation_json(const MetricReport& in, const MetricReport& ood) {
    return json{{"in_domain", to_json(in)}, {"out_of_domain", to_json(ood)}};
}

int cmd_extract(const GlobalFlags& g, const std::string& manifest, const std::string& group_id,
                const std::string& out_dir, std::ostream& out, const EnvLookup& env) {
    Settings s = resolve(g, env);
    std::vector<BenchmarkGroup> groups;
    const BenchmarkGroup& group = load_group(groups, manifest, group_id);
    const fs::path dir = out_dir.empty() ? fs::path("runs") / (group_id + "-extract") : fs::path(out_dir);
    RunLock lock(dir);

    Providers p(s);
    CostLedger ledger;
    Gateway gw(*p.main.chat, *p.main.images, *p.main.embedder, ledger);
    Gateway init = gw.scoped("init");
    const auto triples = extract_group(group, init, !s.evolution.deterministic);

    fs::remove(dir / "events.jsonl");
    append_events(dir / "events.jsonl", init.take_events());
    for (std::size_t k = 0; k < triples.size(); ++k) {
        write_json(dir / "triples" / fmt::format("triple-{}.json", k), to_json(triples[k]));
    }
    const CostReport report = ledger_report(ledger.snapshot(), s.pricing);
    write_json(dir / "ledger.json", report.to_json());
    out << fmt::format("wrote {} triples to {}\n", triples.size(), (dir / "triples").string());
    out << report.summary_line() << "\n";
    return 0;
}

int cmd_steal(const GlobalFlags& g, const StealFlags& f, std::ostream& out, std::ostream& err,
              const EnvLookup& env) {
    Settings s = resolve(g, env);
    apply_steal_flags(s, f);
    std::vector<BenchmarkGroup> groups;
    const BenchmarkGroup& group = load_group(groups, f.manifest, f.group);
    const fs::path dir = f.out.empty()
                             ? fs::path("runs") / fmt::format("{}-seed{}", f.group, s.evolution.seed)
                             : fs::path(f.out);
    RunLock lock(dir);
    const fs::path events_file = dir / "events.jsonl";
    const fs::path checkpoints = dir / "checkpoints";

    std::optional<RunState> resumed;
    if (f.resume) {
        if (auto cp = latest_checkpoint(checkpoints)) {
            resumed = deserialize_run_state(read_file(*cp, ErrorKind::CorruptState, "checkpoint"));
            if (resumed->config != s.evolution) {
                err << "note: resuming with the configuration stored in the checkpoint\n";
            }
            s.evolution = resumed->config;
            truncate_events(events_file, resumed->events_written);
        } else {
            err << "note: no checkpoint found, starting a new run\n";
        }
    }
    if (!resumed) {
        const bool occupied = fs::exists(events_file) || fs::exists(checkpoints) || fs::exists(dir / "result.json");
        if (occupied && !f.force) {
            fail(ErrorKind::InputError,
                 "run directory already holds a run: " + dir.string() + " (use --resume or --force)");
        }
        fs::remove(events_file);
        fs::remove_all(checkpoints);
        fs::remove(dir / "result.json");
    }
    const EvolutionConfig& cfg = s.evolution;
    json config_doc = to_json(s);
    config_doc["manifest"] = f.manifest;
    config_doc["group"] = f.group;
    config_doc["prompt_assets"] = prompts::digests();
    write_json(dir / "config.json", config_doc);

    Providers p(s);
    CostLedger ledger(resumed ? resumed->ledger : LedgerSnapshot{});
    FitnessCache cache;
    if (resumed) cache.restore(resumed->fitness_cache);
    Gateway gw(*p.main.chat, *p.main.images, *p.main.embedder, ledger);

    EvolveOptions options;
    options.cache = &cache;
    options.resume = resumed ? &*resumed : nullptr;
    options.on_generation = [&](const RunState& state, std::vector<json>&& events) {
        append_events(events_file, events);
        write_file(checkpoints / fmt::format("gen-{}.json", state.population.generation), serialize_run_state(state));
        if (f.stop_after && state.population.generation >= *f.stop_after) throw StopRequested{state.population.generation};
    };

    EvolutionResult result;
    try {
        result = evolve(group, cfg, gw, make_fitness_fn(group, cfg, cache), options);
    } catch (const StopRequested& stop) {
        out << fmt::format("stopped after generation {}; continue with --resume\n", stop.generation);
        return 0;
    }

    json doc{{"group_id", group.group_id}, {"config", to_json(cfg)}};
    const json evo = result.to_json();
    doc["best"] = evo["best"];
    doc["history"] = evo["history"];
    if (auto hit = cache.find(fitness_cache_key(result.best.tmpl))) doc["best_fitness"] = to_json(*hit);

    if (!f.skip_eval) {
        Gateway eval = gw.scoped("eval");
        const auto [in, ood] = evaluate_template(result.best.tmpl, group, eval, p.metrics, !cfg.deterministic);
        append_events(events_file, eval.take_events());
        write_json(dir / "eval" / "in_domain.json", to_json(in));
        write_json(dir / "eval" / "out_of_domain.json", to_json(ood));
        const std::array<MetricReport, 2> both{in, ood};
        write_file(dir / "eval" / "report.csv", to_csv(both));
        doc["evaluation"] = evaluation_json(in, ood);
    }
    const LedgerSnapshot final_ledger = ledger.snapshot();
    const CostReport report = ledger_report(final_ledger, s.pricing);
    doc["ledger"] = to_json(final_ledger);
    doc["cost"] = report.to_json();

    write_json(dir / "best_template.json", to_json(result.best.tmpl));
    write_json(dir / "ledger.json", report.to_json());
    write_json(dir / "result.json", doc);

    out << "best template: " << result.best.tmpl.slot_form() << "\n";
    out << fmt::format("fitness: {:.6f} ({})\n", result.best.fitness.value_or(0.0), result.best.id);
    out << report.summary_line() << "\n";
    out << "run directory: " << dir.string() << "\n";
    return 0;
}

int cmd_eval(const GlobalFlags& g, const std::string& manifest, const std::string& group_id,
             const std::string& template_file, const std::string& out_dir, std::ostream& out, const EnvLookup& env) {
    Settings s = resolve(g, env);
    const std::string text = read_file(template_file, ErrorKind::InputError, "template file");
    std::vector<BenchmarkGroup> groups;
    const BenchmarkGroup& group = load_group(groups, manifest, group_id);
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::InputError, "template file is not JSON: " + template_file);
    PromptTemplate tmpl;
    try {
        tmpl = template_from_json(j);
    } catch (const Error& e) {
        fail(ErrorKind::InputError, std::string("bad template file: ") + e.what());
    }

    Providers p(s);
    CostLedger ledger;
    Gateway gw(*p.main.chat, *p.main.images, *p.main.embedder, ledger);
    Gateway eval = gw.scoped("eval");
    const auto [in, ood] = evaluate_template(tmpl, group, eval, p.metrics, !s.evolution.deterministic);
    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        RunLock lock(dir);
        write_json(dir / "in_domain.json", to_json(in));
        write_json(dir / "out_of_domain.json", to_json(ood));
        const std::array<MetricReport, 2> both{in, ood};
        write_file(dir / "report.csv", to_csv(both));
        fs::remove(dir / "events.jsonl");
        append_events(dir / "events.jsonl", eval.take_events());
        write_json(dir / "ledger.json", ledger_report(ledger.snapshot(), s.pricing).to_json());
    }
    print_reports(out, in, ood);
    out << ledger_report(ledger.snapshot(), s.pricing).summary_line() << "\n";
    return 0;
}

int cmd_bench(const GlobalFlags& g, const StealFlags& f, std::ostream& out, const EnvLookup& env) {
    Settings s = resolve(g, env);
    apply_steal_flags(s, f);
    const auto groups = load_manifest(f.manifest);
    if (groups.empty()) fail(ErrorKind::ManifestError, "manifest has no groups");
    const EvolutionConfig& cfg = s.evolution;

    Providers p(s);
    CostLedger ledger;
    Gateway gw(*p.main.chat, *p.main.images, *p.main.embedder, ledger);
    std::vector<MetricReport> reports;
    std::vector<json> events;
    for (const auto& group : groups) {
        FitnessCache cache;
        EvolveOptions options;
        options.on_generation = [&](const RunState&, std::vector<json>&& ev) {
            for (auto& e : ev) events.push_back(std::move(e));
        };
        const auto result = evolve(group, cfg, gw, make_fitness_fn(group, cfg, cache), options);
        Gateway eval = gw.scoped("eval");
        auto [in, ood] = evaluate_template(result.best.tmpl, group, eval, p.metrics, !cfg.deterministic);
        for (auto& e : eval.take_events()) events.push_back(std::move(e));
        reports.push_back(std::move(in));
        reports.push_back(std::move(ood));
    }
    const BenchmarkSummary summary = aggregate_benchmark(reports);
    const CostReport cost = ledger_report(ledger.snapshot(), s.pricing);
    if (!f.out.empty()) {
        const fs::path dir(f.out);
        RunLock lock(dir);
        json doc = summary.to_json();
        doc["cost"] = cost.to_json();
        write_json(dir / "summary.json", doc);
        write_file(dir / "summary.csv", summary.to_csv());
        fs::remove(dir / "events.jsonl");
        append_events(dir / "events.jsonl", events);
    }
    out << summary.to_csv();
    out << cost.summary_line() << "\n";
    return 0;
}

int cmd_cost(const GlobalFlags& g, const std::string& target, bool as_json, std::ostream& out, const EnvLookup& env) {
    Settings s = resolve(g, env);
    fs::path events = target;
    if (fs::is_directory(events)) events /= "events.jsonl";
    std::ifstream in(events, std::ios::binary);
    if (!in) fail(ErrorKind::InputError, "events file not found: " + events.string());
    const CostReport report = ledger_report(replay_events(in), s.pricing);
    if (as_json) out << report.to_json().dump(2) << "\n";
    else out << report.to_text();
    return 0;
}

void add_global_flags(CLI::App& app, GlobalFlags& g) {
    app.add_option("--config", g.config, "TOML config file (env: TMPLEVO_CONFIG)");
    app.add_option("--profile", g.profile, "backend profile (default: mock)");
    app.add_option("--seed", g.seed, "run seed");
    app.add_flag("--deterministic", g.deterministic, "serialize all backend work");
}

void add_evolution_flags(CLI::App& cmd, StealFlags& f) {
    cmd.add_option("--pop", f.pop, "population size");
    cmd.add_option("--gens", f.gens, "number of generations");
    cmd.add_option("--mutation-factor", f.mutation_factor, "fraction of differences applied, in (0, 1]");
    cmd.add_option("--lambda", f.lambda, "weight of the text term, in [0, 1]");
    cmd.add_flag("--no-supplements", f.no_supplements, "evolve modifiers only");
    cmd.add_flag("--no-image-fitness", f.no_image_fitness, "drop the probe-image fitness term");
}

} // namespace

void truncate_events(const fs::path& events_file, std::size_t lines) {
    std::vector<std::string> kept;
    {
        std::ifstream in(events_file, std::ios::binary);
        if (!in && lines > 0) fail(ErrorKind::CorruptState, "events log missing: " + events_file.string());
        std::string line;
        while (kept.size() < lines && std::getline(in, line)) kept.push_back(line);
    }
    if (kept.size() < lines) {
        fail(ErrorKind::CorruptState, fmt::format("events log has {} lines, checkpoint expects {}", kept.size(), lines));
    }
    std::string bytes;
    for (const auto& l : kept) bytes += l + "\n";
    write_file(events_file, bytes);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Prompt template extraction by differential evolution"};
    app.name("tmplevo");
    app.require_subcommand(1);
    GlobalFlags g;
    add_global_flags(app, g);

    std::string manifest, group, out_dir, template_file, cost_target;
    bool cost_json = false;
    StealFlags steal;

    auto* extract = app.add_subcommand("extract", "extract element triples from a group's in-domain images");
    extract->add_option("--manifest", manifest, "benchmark manifest")->required();
    extract->add_option("--group", group, "group id")->required();
    extract->add_option("--out", out_dir, "output directory");

    auto* steal_cmd = app.add_subcommand("steal", "evolve a template for one group");
    steal_cmd->add_option("--manifest", steal.manifest, "benchmark manifest")->required();
    steal_cmd->add_option("--group", steal.group, "group id")->required();
    steal_cmd->add_option("--out", steal.out, "run directory");
    add_evolution_flags(*steal_cmd, steal);
    steal_cmd->add_flag("--resume", steal.resume, "continue from the latest checkpoint");
    steal_cmd->add_flag("--force", steal.force, "replace an existing run in the directory");
    steal_cmd->add_flag("--skip-eval", steal.skip_eval, "skip the final 9-image evaluation");
    steal_cmd->add_option("--stop-after", steal.stop_after, "stop once generation N is checkpointed");

    auto* eval = app.add_subcommand("eval", "score a template on a group");
    eval->add_option("--manifest", manifest, "benchmark manifest")->required();
    eval->add_option("--group", group, "group id")->required();
    eval->add_option("--template", template_file, "template JSON file")->required();
    eval->add_option("--out", out_dir, "report directory");

    auto* bench = app.add_subcommand("bench", "steal and evaluate every group, then aggregate");
    bench->add_option("--manifest", steal.manifest, "benchmark manifest")->required();
    bench->add_option("--out", steal.out, "summary directory");
    add_evolution_flags(*bench, steal);

    auto* cost = app.add_subcommand("cost", "replay a run's events into a cost report");
    cost->add_option("run", cost_target, "run directory or events.jsonl")->required();
    cost->add_flag("--json", cost_json, "print JSON");

    for (auto* sub : {extract, steal_cmd, eval, bench, cost}) sub->fallthrough();

    std::vector<std::string> argv_storage{"tmplevo"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*extract) return cmd_extract(g, manifest, group, out_dir, out, env);
        if (*steal_cmd) return cmd_steal(g, steal, out, err, env);
        if (*eval) return cmd_eval(g, manifest, group, template_file, out_dir, out, env);
        if (*bench) return cmd_bench(g, steal, out, env);
        if (*cost) return cmd_cost(g, cost_target, cost_json, out, env);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace tmplevo::cli
