#pragma once

// Genome evaluation through games, fitness, truncation selection with
// elitism, reproduction, and generation logging.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "brainlab/board.hpp"
#include "brainlab/brain.hpp"
#include "brainlab/cartridge.hpp"
#include "brainlab/features.hpp"
#include "brainlab/hebbian.hpp"
#include "brainlab/neat.hpp"
#include "brainlab/rng.hpp"
#include "brainlab/signal_chain.hpp"

namespace brainlab {

inline constexpr const char* kCodeVersion = "brainlab 0.1.0";

enum class FitnessMode { Multi, Equal };

inline double fitness(double a, double c, double w, FitnessMode mode) {
    if (mode == FitnessMode::Equal) return (a + c + w) / 3.0;
    return 0.6 * a + 0.2 * c + 0.2 * w;
}

inline std::string to_string(FitnessMode m) { return m == FitnessMode::Equal ? "equal" : "multi"; }

inline FitnessMode fitness_mode_from_string(const std::string& s) {
    if (s == "multi") return FitnessMode::Multi;
    if (s == "equal") return FitnessMode::Equal;
    throw std::invalid_argument("unknown fitness mode '" + s + "'");
}

struct EvalResult {
    double A = 0.0;
    double C = 0.0;
    double W = 0.0;
    double F = 0.0;
    int games = 0;
    int moves = 0;  // brain moves over all games
    friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

struct ExperimentConfig {
    int population = 20;
    int generations = 50;
    int games = 20;
    FitnessMode fitness_mode = FitnessMode::Multi;
    bool hebbian = true;
    bool imagination = true;
    std::string cartridge = "expressive";
    std::string opponent = "opponent-A";
    std::uint64_t seed = 1;
    int ply_cap = 200;
    int opening_plies = 4;  // random plies played before each opening pair
    MutationConfig mutation;

    void validate() const {
        if (population < 2 || population % 2 != 0) throw std::invalid_argument("population must be even and at least 2");
        if (generations < 0) throw std::invalid_argument("generations must be non-negative");
        if (games < 1) throw std::invalid_argument("games must be at least 1");
        if (ply_cap < 1) throw std::invalid_argument("ply cap must be positive");
        if (opening_plies < 0) throw std::invalid_argument("opening plies must be non-negative");
        mutation.validate();
        profile_by_id(cartridge);
        profile_by_id(opponent);
    }
};

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["population"] = c.population;
    j["generations"] = c.generations;
    j["games"] = c.games;
    j["fitness"] = to_string(c.fitness_mode);
    j["hebbian"] = c.hebbian;
    j["imagination"] = c.imagination;
    j["cartridge"] = c.cartridge;
    j["opponent"] = c.opponent;
    j["seed"] = c.seed;
    j["ply_cap"] = c.ply_cap;
    j["opening_plies"] = c.opening_plies;
    j["mutation"] = {{"weight_perturb_fraction", c.mutation.weight_perturb_fraction},
                     {"perturb_sigma", c.mutation.perturb_sigma},
                     {"add_node_prob", c.mutation.add_node_prob},
                     {"add_connection_prob", c.mutation.add_connection_prob},
                     {"wiring_perturb_prob", c.mutation.wiring_perturb_prob}};
    return j;
}

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::ordered_json& j, ExperimentConfig base = {}) {
    if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "population") base.population = v.get<int>();
        else if (key == "generations") base.generations = v.get<int>();
        else if (key == "games") base.games = v.get<int>();
        else if (key == "fitness") base.fitness_mode = fitness_mode_from_string(v.get<std::string>());
        else if (key == "hebbian") base.hebbian = v.get<bool>();
        else if (key == "imagination") base.imagination = v.get<bool>();
        else if (key == "cartridge") base.cartridge = v.get<std::string>();
        else if (key == "opponent") base.opponent = v.get<std::string>();
        else if (key == "seed") base.seed = v.get<std::uint64_t>();
        else if (key == "ply_cap") base.ply_cap = v.get<int>();
        else if (key == "opening_plies") base.opening_plies = v.get<int>();
        else if (key == "mutation") {
            auto& m = base.mutation;
            m.weight_perturb_fraction = v.value("weight_perturb_fraction", m.weight_perturb_fraction);
            m.perturb_sigma = v.value("perturb_sigma", m.perturb_sigma);
            m.add_node_prob = v.value("add_node_prob", m.add_node_prob);
            m.add_connection_prob = v.value("add_connection_prob", m.add_connection_prob);
            m.wiring_perturb_prob = v.value("wiring_perturb_prob", m.wiring_perturb_prob);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    return base;
}

// ---------------------------------------------------------------------------
// Cartridge memoization. Outputs depend only on the position's Zobrist
// identity, so repeated positions across genomes skip re-evaluation. Not
// thread-safe.

class CachedCartridge final : public Cartridge {
public:
    explicit CachedCartridge(std::shared_ptr<const Cartridge> inner, std::size_t capacity = 50'000)
        : inner_(std::move(inner)), capacity_(capacity) {}

    std::string id() const override { return inner_->id(); }

    CartridgeOutput evaluate(const Position& pos) const override {
        const std::uint64_t key = pos.key();
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
        CartridgeOutput out = inner_->evaluate(pos);
        if (cache_.size() >= capacity_) cache_.clear();
        cache_.emplace(key, out);
        return out;
    }

private:
    std::shared_ptr<const Cartridge> inner_;
    std::size_t capacity_;
    mutable std::unordered_map<std::uint64_t, CartridgeOutput> cache_;
};

inline std::shared_ptr<const Cartridge> make_cartridge(const std::string& profile_id) {
    return std::make_shared<CachedCartridge>(std::make_shared<HeuristicCartridge>(profile_by_id(profile_id)));
}

// ---------------------------------------------------------------------------
// Games

/// Opening p is shared by games 2p (brain White) and 2p+1 (brain Black). It
/// depends only on the experiment seed, so every genome of every generation
/// faces the same openings.
inline std::vector<Position> opening_positions(std::uint64_t seed, std::size_t pairs, int plies) {
    std::vector<Position> out;
    out.reserve(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(stream_id(seed, {0x0BE1, p, attempt}));
            Position pos = Position::start();
            bool ok = true;
            for (int i = 0; i < plies && ok; ++i) {
                const auto moves = legal_moves(pos);
                if (moves.empty()) ok = false;
                else pos = pos.after(moves[rng.below(moves.size())]);
            }
            if (ok && !legal_moves(pos).empty()) {
                out.push_back(pos);
                break;
            }
        }
    }
    return out;
}

/// Where the chain parameters come from on each brain move.
enum class ParamSource {
    Brain,            // the evolved brain
    Neutral,          // identity chain: plays the cartridge argmax
    Random,           // uniform over every parameter range, redrawn per position
    TemperatureOnly,  // identity except delta_t
};

struct PlayConfig {
    int games = 20;
    int ply_cap = 200;
    bool hebbian = true;
    bool imagination = true;
    FitnessMode fitness_mode = FitnessMode::Multi;
    ParamSource source = ParamSource::Brain;
    double delta_t = 0.0;            // TemperatureOnly
    bool reset_each_move = false;    // restore genetic weights before every brain move
    bool keep_games = false;         // fill EvalReport::games
    std::function<void(const PlasticState&)> on_plastic_step;  // called after every plasticity update
};

struct GameLog {
    Position start;
    Color brain_color = Color::White;
    std::vector<Move> moves;
    GameResult result;
    std::vector<Position> brain_positions;
    std::vector<std::size_t> chosen;           // index into legal_moves at each brain position
    std::vector<std::size_t> reshaped_argmax;
    std::vector<bool> agree;
};

struct EvalReport {
    EvalResult result;
    std::vector<GameLog> games;  // only with PlayConfig::keep_games
};

inline ChainParams random_params(Rng& rng) {
    ChainParams p;
    p.alpha = rng.uniform(ranges::kAlpha.lo, ranges::kAlpha.hi);
    p.tau = rng.uniform(ranges::kTau.lo, ranges::kTau.hi);
    for (double& g : p.eq_gains) g = rng.uniform(ranges::kGain.lo, ranges::kGain.hi);
    p.delta_t = rng.uniform(ranges::kDeltaT.lo, ranges::kDeltaT.hi);
    p.sat_ceiling = rng.uniform(ranges::kSatCeiling.lo, ranges::kSatCeiling.hi);
    p.explore_eps = rng.uniform(ranges::kExploreEps.lo, ranges::kExploreEps.hi);
    for (double& w : p.piece_weights) w = rng.uniform(ranges::kPieceWeight.lo, ranges::kPieceWeight.hi);
    return p;
}

/// Plays pc.games games. `brain` may be null unless pc.source is Brain.
/// Agreement compares the brain's move with the opponent model's argmax at
/// the brain's own positions.
inline EvalReport play_evaluation(const Brain* brain, const Cartridge& cartridge, const Cartridge& opponent,
                                  std::span<const Position> openings, const PlayConfig& pc, std::uint64_t rng_stream,
                                  const TraceSink& trace = {}) {
    if (pc.source == ParamSource::Brain && brain == nullptr) throw std::invalid_argument("brain required");
    if (openings.size() * 2 < static_cast<std::size_t>(pc.games)) throw std::invalid_argument("not enough openings");
    const bool use_brain = pc.source == ParamSource::Brain;
    const bool plastic = use_brain && pc.hebbian;
    const bool mirror = &cartridge == &opponent || cartridge.id() == opponent.id();

    Rng rng(rng_stream);
    PlasticState state = use_brain ? PlasticState::for_brain(*brain) : PlasticState{};
    EvalReport report;
    double agree_sum = 0.0, calib_sum = 0.0, points = 0.0;
    int brain_moves = 0;

    for (int g = 0; g < pc.games; ++g) {
        GameLog log;
        log.start = openings[static_cast<std::size_t>(g / 2)];
        log.brain_color = g % 2 == 0 ? Color::White : Color::Black;
        if (use_brain) state = reset(state);

        Position pos = log.start;
        GameHistory history;
        MemoryState memory;
        RewardTracker tracker(pc.ply_cap / 2);
        bool last_capture = false;
        int material_prev = 0;
        bool have_prev = false;
        double game_agree = 0.0, game_conf = 0.0;
        int game_moves = 0;

        for (;;) {
            if (const auto status = game_status(pos, history, pc.ply_cap)) {
                log.result = *status;
                break;
            }
            Move move;
            if (pos.side_to_move() == log.brain_color) {
                const CartridgeOutput out = cartridge.evaluate(pos);
                if (plastic && pc.reset_each_move) state = reset(state);

                ChainParams params;
                BrainStep step;
                if (use_brain) {
                    GameState gs{history.ply(), pc.ply_cap, last_capture, out.moves.size()};
                    const SignalPool pool = assemble_pool(extract_sensors(pos), extract_context(pos, gs), out);
                    step = brain->run(pool, out.piece_attention, memory, state.current);
                    memory = step.memory;
                    params = step.params;
                } else if (pc.source == ParamSource::Random) {
                    params = random_params(rng);
                } else if (pc.source == ParamSource::TemperatureOnly) {
                    params.delta_t = pc.delta_t;
                }

                std::vector<PieceType> movers;
                movers.reserve(out.moves.size());
                for (const Move& m : out.moves) movers.push_back(pos.at(m.from).type());
                const ReshapeResult rr = reshape_detailed({out.logits, out.probs, movers, params});
                const std::size_t ram = argmax_index(rr.probs);
                std::size_t chosen = ram;
                if (use_brain && pc.imagination)
                    chosen = imagine(*brain, state.current, pos, rr.probs, out.moves, rr.survived).chosen;

                const std::size_t reference = mirror ? out.argmax() : opponent.evaluate(pos).argmax();
                const bool agree = chosen == reference;
                const double conf = out.top1();
                agree_sum += agree ? 1.0 : 0.0;
                calib_sum += calibration_score(agree, conf);
                game_agree += agree ? 1.0 : 0.0;
                game_conf += conf;
                ++brain_moves;
                ++game_moves;

                if (plastic) {
                    const int material = material_diff(pos);
                    const double delta = have_prev ? static_cast<double>(material - material_prev) : 0.0;
                    material_prev = material;
                    have_prev = true;
                    const auto& affect = step.phases.affect;
                    const double affect_mean = std::accumulate(affect.begin(), affect.end(), 0.0) /
                                               static_cast<double>(affect.size());
                    const MoveRecord record = tracker.record(agree, conf, affect_mean, delta, history.ply());
                    hebbian_step(state, *brain, step.activity, record);
                    if (pc.on_plastic_step) pc.on_plastic_step(state);
                }
                if (trace) trace(ChainTrace{history.ply(), params, out.probs, rr.probs, chosen, ram, out.argmax()});
                if (pc.keep_games) {
                    log.brain_positions.push_back(pos);
                    log.chosen.push_back(chosen);
                    log.reshaped_argmax.push_back(ram);
                    log.agree.push_back(agree);
                }
                move = out.moves[chosen];
            } else {
                const CartridgeOutput out = opponent.evaluate(pos);
                move = out.moves[out.argmax()];
            }
            last_capture = pos.is_capture(move);
            history.keys.push_back(pos.key());
            pos = pos.after(move);
            log.moves.push_back(move);
        }

        double score = 0.5;
        if (log.result.outcome != Outcome::Draw) {
            const Color winner = log.result.outcome == Outcome::WhiteWin ? Color::White : Color::Black;
            score = winner == log.brain_color ? 1.0 : 0.0;
        }
        points += score;

        if (plastic) {
            GameSummary summary;
            summary.result = score;
            const int own = material_diff(pos) * (pos.side_to_move() == log.brain_color ? 1 : -1);
            summary.final_material = clamp01(0.5 + own / 20.0);
            summary.mean_agreement = game_moves ? game_agree / game_moves : 0.0;
            summary.mean_confidence = game_moves ? game_conf / game_moves : 0.0;
            learning_module_pass(*brain, state, summary);
        }
        if (pc.keep_games) report.games.push_back(std::move(log));
    }

    auto& r = report.result;
    r.games = pc.games;
    r.moves = brain_moves;
    r.A = brain_moves ? agree_sum / brain_moves : 0.0;
    r.C = brain_moves ? calib_sum / brain_moves : 0.0;
    r.W = points / pc.games;
    r.F = fitness(r.A, r.C, r.W, pc.fitness_mode);
    return report;
}

inline PlayConfig play_config(const ExperimentConfig& cfg) {
    PlayConfig pc;
    pc.games = cfg.games;
    pc.ply_cap = cfg.ply_cap;
    pc.hebbian = cfg.hebbian;
    pc.imagination = cfg.imagination;
    pc.fitness_mode = cfg.fitness_mode;
    return pc;
}

/// Cartridges and openings for one experiment.
class Evaluator {
public:
    explicit Evaluator(const ExperimentConfig& cfg)
        : cfg_(cfg),
          cartridge_(make_cartridge(cfg.cartridge)),
          opponent_(cfg.opponent == cfg.cartridge ? cartridge_ : make_cartridge(cfg.opponent)),
          openings_(opening_positions(cfg.seed, static_cast<std::size_t>((cfg.games + 1) / 2), cfg.opening_plies)) {}

    const ExperimentConfig& config() const noexcept { return cfg_; }
    const Cartridge& cartridge() const noexcept { return *cartridge_; }
    const Cartridge& opponent() const noexcept { return *opponent_; }
    std::span<const Position> openings() const noexcept { return openings_; }

    EvalReport run(const Brain* brain, const PlayConfig& pc, std::uint64_t rng_stream, const TraceSink& trace = {}) const {
        return play_evaluation(brain, *cartridge_, *opponent_, openings_, pc, rng_stream, trace);
    }

    EvalResult evaluate(const BrainGenome& genome, std::uint64_t rng_stream) const {
        const Brain brain(genome);
        return run(&brain, play_config(cfg_), rng_stream).result;
    }

private:
    ExperimentConfig cfg_;
    std::shared_ptr<const Cartridge> cartridge_;
    std::shared_ptr<const Cartridge> opponent_;
    std::vector<Position> openings_;
};

inline EvalResult evaluate_genome(const BrainGenome& genome, const ExperimentConfig& cfg, std::uint64_t rng_stream) {
    return Evaluator(cfg).evaluate(genome, rng_stream);
}

// ---------------------------------------------------------------------------
// Generations

struct Individual {
    BrainGenome genome;
    std::optional<EvalResult> eval;  // carried forward for the elite
};

struct GenerationRecord {
    int generation = 0;
    std::vector<EvalResult> results;          // by genome index
    std::vector<std::uint64_t> genome_ids;    // lineage ids, by genome index
    std::vector<std::uint64_t> rng_streams;   // evaluation stream per genome index
    std::size_t best_index = 0;
    std::uint64_t best_id = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;

    double best_agreement() const { return results.at(best_index).A; }
};

inline std::uint64_t eval_stream(std::uint64_t seed, int gen, std::size_t idx) {
    return stream_id(seed, {static_cast<std::uint64_t>(gen), idx});
}

/// Ranks genome indices by fitness descending, then lineage id ascending.
inline std::vector<std::size_t> rank_population(const std::vector<Individual>& pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pop[a].eval->F != pop[b].eval->F) return pop[a].eval->F > pop[b].eval->F;
        return pop[a].genome.lineage < pop[b].genome.lineage;
    });
    return order;
}

inline std::size_t crossover_count(int population) {
    return static_cast<std::size_t>(std::lround(0.75 * (population - 1)));
}

/// Evaluates every genome without a carried result, records the generation
/// and builds the next population: the elite unchanged, then crossover
/// children, then mutated clones. New genomes take ids from `next_id`.
inline std::pair<std::vector<Individual>, GenerationRecord> step_generation(std::vector<Individual> population,
                                                                            const ExperimentConfig& cfg, int gen,
                                                                            const Evaluator& evaluator,
                                                                            InnovationCounter& counter,
                                                                            std::uint64_t& next_id) {
    if (population.size() != static_cast<std::size_t>(cfg.population))
        throw std::invalid_argument("population size does not match config");

    GenerationRecord rec;
    rec.generation = gen;
    for (std::size_t i = 0; i < population.size(); ++i) {
        const std::uint64_t stream = eval_stream(cfg.seed, gen, i);
        if (!population[i].eval) population[i].eval = evaluator.evaluate(population[i].genome, stream);
        rec.results.push_back(*population[i].eval);
        rec.genome_ids.push_back(population[i].genome.lineage);
        rec.rng_streams.push_back(stream);
    }
    const auto order = rank_population(population);
    rec.best_index = order.front();
    rec.best_id = population[rec.best_index].genome.lineage;
    rec.best_fitness = rec.results[rec.best_index].F;
    double sum = 0.0;
    for (const auto& r : rec.results) sum += r.F;
    rec.mean_fitness = sum / static_cast<double>(rec.results.size());

    const std::size_t survivors = population.size() / 2;
    std::vector<const Individual*> pool;
    for (std::size_t r = 0; r < survivors; ++r) pool.push_back(&population[order[r]]);

    Rng rng(stream_id(cfg.seed, {0xB4EED, static_cast<std::uint64_t>(gen)}));
    std::vector<Individual> next;
    next.reserve(population.size());
    next.push_back(*pool.front());

    const std::size_t n_cross = survivors >= 2 ? crossover_count(cfg.population) : 0;
    for (std::size_t k = 0; k < n_cross; ++k) {
        const std::size_t i = rng.below(pool.size());
        std::size_t j = rng.below(pool.size() - 1);
        if (j >= i) ++j;
        BrainGenome child = crossover(pool[i]->genome, pool[j]->genome, pool[i]->eval->F, pool[j]->eval->F, rng);
        child = mutate(child, cfg.mutation, counter, rng);
        child.lineage = next_id++;
        next.push_back({std::move(child), std::nullopt});
    }
    while (next.size() < population.size()) {
        BrainGenome child = mutate(pool[rng.below(pool.size())]->genome, cfg.mutation, counter, rng);
        child.lineage = next_id++;
        next.push_back({std::move(child), std::nullopt});
    }
    return {std::move(next), std::move(rec)};
}

inline std::vector<Individual> initial_population(const ExperimentConfig& cfg) {
    Rng rng(stream_id(cfg.seed, {0x1417}));
    std::vector<Individual> pop;
    for (int i = 0; i < cfg.population; ++i) pop.push_back({random_brain(rng, static_cast<std::uint64_t>(i)), std::nullopt});
    return pop;
}

/// Shortest round-trip decimal form.
inline std::string format_number(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string timestamp_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline constexpr const char* kLogHeader = "gen,genome_idx,A,C,W,F,is_elite";

inline void write_generation_rows(std::ostream& os, const GenerationRecord& rec) {
    for (std::size_t i = 0; i < rec.results.size(); ++i) {
        const auto& r = rec.results[i];
        os << rec.generation << ',' << i << ',' << format_number(r.A) << ',' << format_number(r.C) << ','
           << format_number(r.W) << ',' << format_number(r.F) << ',' << (i == rec.best_index ? 1 : 0) << '\n';
    }
}

struct ExperimentOutput {
    std::vector<GenerationRecord> records;
    std::vector<Individual> final_population;
};

/// Runs cfg.generations steps. With an output directory it writes
///   log.csv          timestamp comment line, header, one row per genome per generation
///   header.json      config and code version
///   population.json  final population checkpoint (elite first)
/// Rows are flushed as each generation completes.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                       const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                                       const std::function<void(const GenerationRecord&)>& on_generation = {}) {
    cfg.validate();
    std::ofstream log;
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        std::ofstream header(*out_dir / "header.json");
        nlohmann::ordered_json h;
        h["code_version"] = kCodeVersion;
        h["config"] = to_json(cfg);
        header << h.dump(2) << '\n';
        if (!header) throw std::runtime_error("cannot write " + (*out_dir / "header.json").string());
        log.open(*out_dir / "log.csv");
        if (!log) throw std::runtime_error("cannot write " + (*out_dir / "log.csv").string());
        log << "# started: " << timestamp_utc() << '\n' << kLogHeader << '\n' << std::flush;
    }

    const Evaluator evaluator(cfg);
    InnovationCounter counter;
    std::uint64_t next_id = static_cast<std::uint64_t>(cfg.population);
    ExperimentOutput result;
    result.final_population = initial_population(cfg);
    for (int gen = 0; gen < cfg.generations; ++gen) {
        auto [next, rec] = step_generation(std::move(result.final_population), cfg, gen, evaluator, counter, next_id);
        result.final_population = std::move(next);
        if (log.is_open()) {
            write_generation_rows(log, rec);
            log.flush();
            if (!log) throw std::runtime_error("write to generation log failed");
        }
        if (on_generation) on_generation(rec);
        result.records.push_back(std::move(rec));
    }

    if (out_dir) {
        std::vector<BrainGenome> genomes;
        for (const auto& ind : result.final_population) genomes.push_back(ind.genome);
        std::ofstream ck(*out_dir / "population.json");
        ck << population_to_json(genomes, cfg.generations).dump(1) << '\n';
        if (!ck) throw std::runtime_error("cannot write population checkpoint");
    }
    return result;
}

}  // namespace brainlab
