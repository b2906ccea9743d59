#pragma once

// Experiment orchestration: run manifests for the experiment sets,
// baselines, the Hebbian ablation and behavioural probes.
//
// Manifest schema (JSON):
//   {
//     "name":       "set1-desk",                 run directory name
//     "set":        "set1",                      see set_ids()
//     "seeds":      [1, 2, 3],                   distinct
//     "overrides":  { ExperimentConfig keys },   optional, applied over the set defaults
//     "output_dir": "runs",                      optional, relative to $BRAINLAB_OUTPUT_ROOT
//     "checkpoint": "path/population.json",      ablation-hebbian only
//     "opponents":  ["opponent-A", ...]          ablation-hebbian only
//   }

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "brainlab/brain.hpp"
#include "brainlab/cartridge.hpp"
#include "brainlab/evolution.hpp"
#include "brainlab/neat.hpp"
#include "brainlab/stats.hpp"

namespace brainlab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

inline constexpr const char* kOutputRootEnv = "BRAINLAB_OUTPUT_ROOT";

inline fs::path output_root() {
    const char* env = std::getenv(kOutputRootEnv);
    return env && *env ? fs::path(env) : fs::path(".");
}

/// Desk-scale settings used unless a manifest overrides them.
inline ExperimentConfig desk_config() {
    ExperimentConfig c;
    c.population = 10;
    c.generations = 15;
    c.games = 10;
    c.ply_cap = 120;
    return c;
}

inline const std::vector<std::string>& set_ids() {
    static const std::vector<std::string> ids{
        "set1",          "set1-on",         "set1-off",        "set2-mirror",          "set2-dominant",
        "set3-hetero",   "set4-equal",      "set5-noimag",     "baseline-null",        "baseline-random",
        "baseline-temperature", "ablation-hebbian"};
    return ids;
}

struct RunManifest {
    std::string name;
    std::string set;
    std::vector<std::uint64_t> seeds;
    ojson overrides = ojson::object();
    std::string output_dir = "runs";
    std::string checkpoint;
    std::vector<std::string> opponents;

    void validate() const {
        if (name.empty()) throw std::invalid_argument("manifest needs a name");
        if (std::find(set_ids().begin(), set_ids().end(), set) == set_ids().end())
            throw std::invalid_argument("unknown set id '" + set + "'");
        if (seeds.empty()) throw std::invalid_argument("manifest needs at least one seed");
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
            throw std::invalid_argument("manifest seeds must be distinct");
        if (set == "ablation-hebbian" && (checkpoint.empty() || opponents.empty()))
            throw std::invalid_argument("ablation-hebbian needs a checkpoint and opponents");
    }
};

inline ojson to_json(const RunManifest& m) {
    ojson j;
    j["name"] = m.name;
    j["set"] = m.set;
    j["seeds"] = m.seeds;
    j["overrides"] = m.overrides;
    j["output_dir"] = m.output_dir;
    if (!m.checkpoint.empty()) j["checkpoint"] = m.checkpoint;
    if (!m.opponents.empty()) j["opponents"] = m.opponents;
    return j;
}

inline RunManifest manifest_from_json(const ojson& j) {
    RunManifest m;
    for (const auto& [key, v] : j.items()) {
        if (key == "name") m.name = v.get<std::string>();
        else if (key == "set") m.set = v.get<std::string>();
        else if (key == "seeds") m.seeds = v.get<std::vector<std::uint64_t>>();
        else if (key == "overrides") m.overrides = v;
        else if (key == "output_dir") m.output_dir = v.get<std::string>();
        else if (key == "checkpoint") m.checkpoint = v.get<std::string>();
        else if (key == "opponents") m.opponents = v.get<std::vector<std::string>>();
        else throw std::invalid_argument("unknown manifest key '" + key + "'");
    }
    m.validate();
    return m;
}

inline ojson read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return ojson::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + " is not valid JSON: " + e.what());
    }
}

inline void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// FNV-1a, used to fingerprint the manifest a run was produced from.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// Set definitions

/// One experimental condition of a set: a name and its config.
struct Condition {
    std::string name;
    ExperimentConfig config;
};

inline std::vector<Condition> set_conditions(const std::string& set, const ExperimentConfig& base) {
    auto with = [&](auto edit) {
        ExperimentConfig c = base;
        edit(c);
        return c;
    };
    auto on = [](ExperimentConfig& c) { c.hebbian = true; };
    auto off = [](ExperimentConfig& c) { c.hebbian = false; };
    if (set == "set1") return {{"on", with(on)}, {"off", with(off)}};
    if (set == "set1-on") return {{"on", with(on)}};
    if (set == "set1-off") return {{"off", with(off)}};
    if (set == "set2-mirror") return {{"mirror", base}};
    if (set == "set2-dominant") return {{"dominant", base}};
    if (set == "set3-hetero") return {{"hetero", base}};
    if (set == "set4-equal") {
        auto eq = [](ExperimentConfig& c) { c.fitness_mode = FitnessMode::Equal; };
        return {{"equal-on", with([&](auto& c) { eq(c); on(c); })}, {"equal-off", with([&](auto& c) { eq(c); off(c); })}};
    }
    if (set == "set5-noimag")
        return {{"imagination", with([](auto& c) { c.imagination = true; })},
                {"no-imagination", with([](auto& c) { c.imagination = false; })}};
    throw std::invalid_argument("set '" + set + "' is not an evolution set");
}

/// Set-specific matchup defaults, applied before manifest overrides.
inline ExperimentConfig set_defaults(const std::string& set) {
    ExperimentConfig c = desk_config();
    c.cartridge = "expressive";
    c.opponent = "opponent-A";
    if (set == "set2-mirror") c.cartridge = c.opponent = "opponent-A";
    if (set == "set2-dominant") {
        c.cartridge = "opponent-A";
        c.opponent = "opponent-A-lite";
    }
    if (set == "set3-hetero") {
        c.cartridge = "opponent-A";
        c.opponent = "opponent-B";
    }
    return c;
}

inline ExperimentConfig manifest_config(const RunManifest& m) {
    return config_from_json(m.overrides, set_defaults(m.set));
}

// ---------------------------------------------------------------------------
// Baselines

struct BaselineRow {
    std::string name;
    double delta_t = 0.0;
    EvalResult result;
};

struct BaselineReport {
    std::vector<BaselineRow> rows;
    double null_overlap = 0.0;         // overlap() on the null brain's own positions
    std::size_t null_positions = 0;
};

inline ojson to_json(const BaselineReport& r) {
    ojson j;
    auto& rows = j["baselines"] = ojson::array();
    for (const auto& row : r.rows) {
        ojson o{{"name", row.name}, {"A", row.result.A}, {"W", row.result.W}, {"C", row.result.C},
                {"games", row.result.games}, {"moves", row.result.moves}};
        if (row.name == "temperature") o["delta_t"] = row.delta_t;
        rows.push_back(o);
    }
    j["null_overlap"] = r.null_overlap;
    j["null_positions"] = r.null_positions;
    return j;
}

inline const std::vector<double>& temperature_grid() {
    static const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
    return grid;
}

/// Null brain, random-parameter chain, and the temperature-only sweep, each
/// over cfg.games games against cfg.opponent.
inline BaselineReport run_baselines(const ExperimentConfig& cfg) {
    cfg.validate();
    const Evaluator ev(cfg);
    PlayConfig pc = play_config(cfg);
    pc.hebbian = false;
    pc.imagination = false;
    BaselineReport report;

    pc.source = ParamSource::Neutral;
    pc.keep_games = true;
    const EvalReport null = ev.run(nullptr, pc, stream_id(cfg.seed, {0xBA5E, 0}));
    report.rows.push_back({"null", 0.0, null.result});
    std::vector<Position> positions;
    for (const auto& g : null.games) positions.insert(positions.end(), g.brain_positions.begin(), g.brain_positions.end());
    report.null_positions = positions.size();
    report.null_overlap = overlap(profile_by_id(cfg.cartridge), profile_by_id(cfg.opponent), positions);
    pc.keep_games = false;

    pc.source = ParamSource::Random;
    report.rows.push_back({"random", 0.0, ev.run(nullptr, pc, stream_id(cfg.seed, {0xBA5E, 1})).result});

    pc.source = ParamSource::TemperatureOnly;
    for (double dt : temperature_grid()) {
        pc.delta_t = dt;
        report.rows.push_back({"temperature", dt, ev.run(nullptr, pc, stream_id(cfg.seed, {0xBA5E, 2})).result});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Hebbian ablation

struct AblationCell {
    std::string opponent;
    bool hebbian = false;
    EvalResult result;
    std::vector<std::vector<Move>> moves;  // per game
};

struct AblationReport {
    std::vector<AblationCell> cells;  // per opponent: off, then on
};

inline ojson to_json(const AblationReport& r) {
    ojson j;
    auto& table = j["table"] = ojson::array();
    for (std::size_t i = 0; i + 1 < r.cells.size(); i += 2) {
        const auto& off = r.cells[i];
        const auto& on = r.cells[i + 1];
        table.push_back({{"opponent", off.opponent},
                         {"off", {{"W", off.result.W}, {"A", off.result.A}}},
                         {"on", {{"W", on.result.W}, {"A", on.result.A}}}});
    }
    return j;
}

/// Plays the genome with plasticity off and then on, over the same openings,
/// against each opponent profile.
inline AblationReport run_hebbian_ablation(const BrainGenome& genome, const std::vector<std::string>& opponents,
                                           int games, ExperimentConfig base = desk_config(),
                                           bool reset_each_move = false) {
    AblationReport report;
    const Brain brain(genome);
    for (const auto& opp : opponents) {
        ExperimentConfig cfg = base;
        cfg.opponent = opp;
        cfg.games = games;
        cfg.validate();
        const Evaluator ev(cfg);
        for (bool hebbian : {false, true}) {
            PlayConfig pc = play_config(cfg);
            pc.hebbian = hebbian;
            pc.keep_games = true;
            pc.reset_each_move = reset_each_move;
            const EvalReport r = ev.run(&brain, pc, stream_id(cfg.seed, {0xAB1A}));
            AblationCell cell{opp, hebbian, r.result, {}};
            for (const auto& g : r.games) cell.moves.push_back(g.moves);
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Behavioural probe

inline std::vector<Position> read_fen_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<Position> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(Position::from_fen(line));
    }
    return out;
}

/// Single-position decision of a genome from a fresh game state.
inline Move brain_decision(const Brain& brain, const Cartridge& cartridge, const Position& pos, bool imagination) {
    const CartridgeOutput out = cartridge.evaluate(pos);
    GameState gs{0, 200, false, out.moves.size()};
    const SignalPool pool = assemble_pool(extract_sensors(pos), extract_context(pos, gs), out);
    const BrainStep step = brain.run(pool, out.piece_attention, MemoryState{});
    std::vector<PieceType> movers;
    for (const Move& m : out.moves) movers.push_back(pos.at(m.from).type());
    const ReshapeResult rr = reshape_detailed({out.logits, out.probs, movers, step.params});
    std::size_t chosen = argmax_index(rr.probs);
    if (imagination) chosen = imagine(brain, brain.base_weights(), pos, rr.probs, out.moves, rr.survived).chosen;
    return out.moves[chosen];
}

/// Plays cfg.games games and answers the position probe. Reports first-move
/// choice as White, piece usage, game lengths and per-position decisions.
inline ojson run_probe(const BrainGenome& genome, const std::vector<Position>& positions, const ExperimentConfig& cfg) {
    cfg.validate();
    const Brain brain(genome);
    const Evaluator ev(cfg);
    PlayConfig pc = play_config(cfg);
    pc.keep_games = true;
    const EvalReport r = ev.run(&brain, pc, stream_id(cfg.seed, {0x9B0BE}));

    ojson j;
    j["result"] = {{"A", r.result.A}, {"C", r.result.C}, {"W", r.result.W}, {"F", r.result.F}};
    std::array<int, kPieceTypeCount> usage{};
    auto& games = j["games"] = ojson::array();
    for (const auto& g : r.games) {
        for (std::size_t i = 0; i < g.brain_positions.size(); ++i) {
            const Position& p = g.brain_positions[i];
            ++usage[index_of(p.at(legal_moves(p)[g.chosen[i]].from).type())];
        }
        std::string first;
        if (g.brain_color == Color::White && !g.brain_positions.empty())
            first = legal_moves(g.brain_positions.front())[g.chosen.front()].uci();
        games.push_back({{"start", g.start.fen()},
                         {"brain", g.brain_color == Color::White ? "white" : "black"},
                         {"plies", g.moves.size()},
                         {"result", result_token(g.result.outcome)},
                         {"termination", to_string(g.result.reason)},
                         {"first_brain_move_as_white", first}});
    }
    static constexpr const char* kPieceNames[] = {"pawn", "knight", "bishop", "rook", "queen", "king"};
    for (int t = 0; t < kPieceTypeCount; ++t) j["piece_usage"][kPieceNames[t]] = usage[static_cast<std::size_t>(t)];

    auto& probe = j["positions"] = ojson::array();
    for (const Position& p : positions) {
        const CartridgeOutput out = ev.cartridge().evaluate(p);
        const Move m = brain_decision(brain, ev.cartridge(), p, cfg.imagination);
        const Move c = out.moves[out.argmax()];
        probe.push_back({{"fen", p.fen()}, {"brain", m.uci()}, {"cartridge", c.uci()}, {"agrees", m == c}});
    }
    return j;
}

// ---------------------------------------------------------------------------
// Set reports

struct SeedRun {
    std::string condition;
    std::uint64_t seed = 0;
    stats::SeedSeries series;
    std::vector<EvalResult> best;  // best genome per generation
};

inline std::vector<double> endpoints(const std::vector<SeedRun>& runs, const std::string& condition) {
    std::vector<double> v;
    for (const auto& r : runs)
        if (r.condition == condition && !r.series.agreement.empty()) v.push_back(r.series.agreement.back());
    return v;
}

inline std::vector<stats::SeedSeries> series_of(const std::vector<SeedRun>& runs, const std::string& condition) {
    std::vector<stats::SeedSeries> v;
    for (const auto& r : runs)
        if (r.condition == condition) v.push_back(r.series);
    return v;
}

/// Longest stretch of generations over which the best fitness is unchanged.
inline std::size_t longest_lock(const std::vector<double>& best_fitness) {
    std::size_t longest = best_fitness.empty() ? 0 : 1, run = 1;
    for (std::size_t g = 1; g < best_fitness.size(); ++g) {
        run = best_fitness[g] == best_fitness[g - 1] ? run + 1 : 1;
        longest = std::max(longest, run);
    }
    return longest;
}

inline std::optional<std::size_t> first_at_least(const std::vector<double>& v, double threshold) {
    for (std::size_t g = 0; g < v.size(); ++g)
        if (v[g] >= threshold) return g;
    return std::nullopt;
}

inline ojson optional_json(const std::optional<std::size_t>& v) { return v ? ojson(*v) : ojson(); }

inline ojson seed_summary(const SeedRun& r) {
    ojson s;
    s["condition"] = r.condition;
    s["seed"] = r.seed;
    const auto& a = r.series.agreement;
    const auto& f = r.series.best_fitness;
    if (!a.empty()) {
        s["final_agreement"] = a.back();
        s["final_best_fitness"] = f.back();
        s["final_win_rate"] = r.best.back().W;
        const std::size_t window = std::min<std::size_t>(10, f.size());
        s["convergence_generation"] = optional_json(stats::convergence_generation(f, 0.01, window));
        if (window >= 2) s["late_slope"] = stats::late_slope(f, window);
        s["first_generation_agreement_ge_0_95"] = optional_json(first_at_least(a, 0.95));
        s["longest_elite_lock"] = longest_lock(f);
    }
    return s;
}

/// Two-condition comparison of endpoint agreement.
inline ojson compare_conditions(const std::vector<SeedRun>& runs, const std::string& a, const std::string& b,
                                std::uint64_t seed) {
    ojson j;
    const auto ea = endpoints(runs, a), eb = endpoints(runs, b);
    j["conditions"] = {a, b};
    j["endpoint_mean"] = {stats::mean(ea), stats::mean(eb)};
    if (ea.size() < 2 || eb.size() < 2) return j;
    j["endpoint_variance"] = {stats::variance(ea), stats::variance(eb)};
    Rng rng(stream_id(seed, {0x57A7}));
    j["permutation_variance"] = stats::to_json(stats::permutation_variance_test(ea, eb, 100000, rng));
    j["bootstrap_ratio"] = stats::to_json(stats::bootstrap_ratio_ci(ea, eb, 100000, 0.95, rng));
    j["welch"] = stats::to_json(stats::welch_t(ea, eb));
    j["levene"] = stats::to_json(stats::levene(ea, eb));
    j["cohen_d"] = stats::to_json(stats::cohen_d(ea, eb));
    return j;
}

inline ojson icc_last(const std::vector<SeedRun>& runs, const std::string& condition, std::size_t last = 20) {
    std::vector<std::vector<double>> m;
    for (const auto& s : series_of(runs, condition)) {
        const auto& a = s.agreement;
        const std::size_t n = std::min(last, a.size());
        m.emplace_back(a.end() - static_cast<std::ptrdiff_t>(n), a.end());
    }
    if (m.size() < 2 || m.front().size() < 2) return ojson();
    return stats::icc1(m);
}

inline ojson set_report(const std::string& set, const std::vector<SeedRun>& runs, std::uint64_t seed,
                        const fs::path& dir) {
    ojson j;
    j["set"] = set;
    auto& seeds = j["seeds"] = ojson::array();
    for (const auto& r : runs) seeds.push_back(seed_summary(r));

    auto two = [&](const std::string& a, const std::string& b) {
        return !endpoints(runs, a).empty() && !endpoints(runs, b).empty();
    };
    if (set == "set1" && two("on", "off")) {
        j["comparison"] = compare_conditions(runs, "on", "off", seed);
        j["icc1_last20"] = {{"on", icc_last(runs, "on")}, {"off", icc_last(runs, "off")}};
        const auto on = series_of(runs, "on"), off = series_of(runs, "off");
        if (on.size() >= 2 && off.size() >= 2) {
            const auto vc = stats::variance_crossover(on, off);
            j["variance_crossover"] = stats::to_json(vc);
            std::ostringstream csv;
            stats::write_variance_csv(csv, vc);
            write_text(dir / "variance_ratio.csv", csv.str());
        }
        // Elite lock-in: best fitness unchanged for at least half the run.
        std::int64_t lock_on = 0, free_on = 0, lock_off = 0, free_off = 0;
        for (const auto& r : runs) {
            const auto& f = r.series.best_fitness;
            const bool locked = !f.empty() && 2 * longest_lock(f) >= f.size();
            (r.condition == "on" ? (locked ? lock_on : free_on) : (locked ? lock_off : free_off)) += 1;
        }
        j["lock_in_fisher"] = stats::to_json(stats::fisher_exact(lock_off, free_off, lock_on, free_on));
        j["lock_in_table"] = {{"off", {lock_off, free_off}}, {"on", {lock_on, free_on}}};
    }
    if (set == "set4-equal" && two("equal-on", "equal-off"))
        j["comparison"] = compare_conditions(runs, "equal-on", "equal-off", seed);
    if (set == "set5-noimag" && two("imagination", "no-imagination")) {
        const auto with = endpoints(runs, "imagination"), without = endpoints(runs, "no-imagination");
        j["agreement_delta"] = stats::mean(with) - stats::mean(without);
        double w_with = 0.0, w_without = 0.0;
        std::size_t n_with = 0, n_without = 0;
        for (const auto& r : runs) {
            if (r.best.empty()) continue;
            if (r.condition == "imagination") w_with += r.best.back().W, ++n_with;
            else w_without += r.best.back().W, ++n_without;
        }
        if (n_with && n_without) j["win_rate_delta"] = w_with / n_with - w_without / n_without;
    }
    if (set == "set3-hetero" || set == "set2-dominant" || set == "set2-mirror") {
        const auto e = endpoints(runs, runs.empty() ? "" : runs.front().condition);
        if (!e.empty()) j["endpoint_agreement"] = {{"mean", stats::mean(e)},
                                                   {"min", *std::min_element(e.begin(), e.end())},
                                                   {"max", *std::max_element(e.begin(), e.end())}};
        if (e.size() >= 2) j["endpoint_agreement"]["variance"] = stats::variance(e);
        const ExperimentConfig c = set_defaults(set);
        j["null_overlap_pinned"] =
            overlap(profile_by_id(c.cartridge), profile_by_id(c.opponent), null_overlap_positions());
    }
    return j;
}

// ---------------------------------------------------------------------------
// Entry points

inline fs::path run_directory(const RunManifest& m) { return output_root() / m.output_dir / m.name; }

inline void write_run_preamble(const RunManifest& m, const fs::path& dir) {
    const std::string manifest = to_json(m).dump(2);
    write_text(dir / "manifest.json", manifest + "\n");
    write_text(dir / "config_hash.txt", hex64(fnv1a(manifest)) + "\n");
}

/// Runs every seed of every condition of the set, then writes report.json.
/// Returns the run directory.
inline fs::path run_set(const RunManifest& m, std::ostream* progress = nullptr) {
    m.validate();
    const fs::path dir = run_directory(m);
    write_run_preamble(m, dir);
    const ExperimentConfig base = manifest_config(m);

    if (m.set.rfind("baseline-", 0) == 0) {
        ojson report;
        report["set"] = m.set;
        auto& per_seed = report["seeds"] = ojson::array();
        for (std::uint64_t seed : m.seeds) {
            ExperimentConfig cfg = base;
            cfg.seed = seed;
            ojson r = to_json(run_baselines(cfg));
            r["seed"] = seed;
            per_seed.push_back(r);
            if (progress) *progress << m.set << " seed " << seed << " done\n";
        }
        write_text(dir / "report.json", report.dump(2) + "\n");
        return dir;
    }
    if (m.set == "ablation-hebbian") {
        const BrainGenome genome = load_genome(m.checkpoint);
        ojson report;
        report["set"] = m.set;
        auto& per_seed = report["seeds"] = ojson::array();
        for (std::uint64_t seed : m.seeds) {
            ExperimentConfig cfg = base;
            cfg.seed = seed;
            ojson r = to_json(run_hebbian_ablation(genome, m.opponents, cfg.games, cfg));
            r["seed"] = seed;
            per_seed.push_back(r);
        }
        write_text(dir / "report.json", report.dump(2) + "\n");
        return dir;
    }

    std::vector<SeedRun> runs;
    for (const auto& cond : set_conditions(m.set, base)) {
        for (std::uint64_t seed : m.seeds) {
            ExperimentConfig cfg = cond.config;
            cfg.seed = seed;
            const fs::path seed_dir = dir / cond.name / ("seed-" + std::to_string(seed));
            const ExperimentOutput out = run_experiment(cfg, seed_dir);
            SeedRun run{cond.name, seed, {}, {}};
            run.series.seed = seed;
            for (const auto& rec : out.records) {
                run.series.agreement.push_back(rec.best_agreement());
                run.series.best_fitness.push_back(rec.best_fitness);
                run.best.push_back(rec.results[rec.best_index]);
            }
            runs.push_back(std::move(run));
            if (progress) *progress << m.set << " " << cond.name << " seed " << seed << " done\n";
        }
    }
    write_text(dir / "report.json", set_report(m.set, runs, m.seeds.front(), dir).dump(2) + "\n");
    return dir;
}

/// Analyses every <condition>/seed-<n>/log.csv below `dir`.
inline ojson stats_from_logs(const fs::path& dir) {
    std::map<std::string, std::vector<stats::SeedSeries>> by_condition;
    std::vector<fs::path> logs;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() == "log.csv") logs.push_back(e.path());
    std::sort(logs.begin(), logs.end());
    if (logs.empty()) throw std::runtime_error("no log.csv files under " + dir.string());
    for (const auto& p : logs) {
        const std::string seed_name = p.parent_path().filename().string();
        const std::string condition = p.parent_path().parent_path().filename().string();
        std::uint64_t seed = 0;
        if (seed_name.rfind("seed-", 0) == 0) seed = std::stoull(seed_name.substr(5));
        by_condition[condition].push_back(stats::read_series(p, seed));
    }
    ojson j;
    for (const auto& [cond, series] : by_condition) {
        ojson c;
        c["seeds"] = series.size();
        std::vector<double> ends;
        for (const auto& s : series)
            if (!s.agreement.empty()) ends.push_back(s.agreement.back());
        if (!ends.empty()) c["endpoint_agreement_mean"] = stats::mean(ends);
        if (ends.size() >= 2) c["endpoint_agreement_variance"] = stats::variance(ends);
        j["conditions"][cond] = c;
    }
    if (by_condition.count("on") && by_condition.count("off") && by_condition["on"].size() >= 2 &&
        by_condition["off"].size() >= 2)
        j["variance_crossover"] = stats::to_json(stats::variance_crossover(by_condition["on"], by_condition["off"]));
    return j;
}

}  // namespace brainlab
