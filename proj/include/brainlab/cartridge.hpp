#pragma once

// Move predictors ("cartridges"). A cartridge maps a position to per-move
// logits and probabilities in canonical move order, a win/draw/loss estimate
// and a per-piece-type attention vector. The brain reshapes this output; it
// never replaces it.
//
// Shipped predictors are deterministic sensor-weighted evaluators. A replay
// cartridge serves distributions recorded in a file, so externally produced
// model outputs can be used without code changes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "brainlab/board.hpp"
#include "brainlab/features.hpp"

namespace brainlab {

struct CartridgeOutput {
    std::vector<Move> moves;     // canonical order
    std::vector<double> logits;  // one per move
    std::vector<double> probs;   // softmax(logits)
    std::array<double, 3> wdl{};  // win, draw, loss for the side to move
    std::array<double, kPieceTypeCount> piece_attention{};

    std::size_t argmax() const {
        return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
    double top1() const { return probs[argmax()]; }
};

class NoLegalMovesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ReplayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum += out[i] = std::exp(logits[i] - mx);
    for (double& p : out) p /= sum;
    return out;
}

/// piece_attention[t] is the probability mass on moves made by piece type t,
/// scaled so the largest entry is 1.
inline std::array<double, kPieceTypeCount> piece_attention(const Position& pos, std::span<const Move> moves,
                                                           std::span<const double> probs) {
    std::array<double, kPieceTypeCount> mass{};
    for (std::size_t i = 0; i < moves.size(); ++i) mass[index_of(pos.at(moves[i].from).type())] += probs[i];
    const double mx = *std::max_element(mass.begin(), mass.end());
    if (mx > 0.0)
        for (double& m : mass) m = clamp01(m / mx);
    return mass;
}

class Cartridge {
public:
    virtual ~Cartridge() = default;
    virtual std::string id() const = 0;
    /// Throws NoLegalMovesError when the position has no legal move.
    virtual CartridgeOutput evaluate(const Position& pos) const = 0;
};

struct CartridgeProfile {
    std::string id;
    SensorVector weights{};
    double sharpness = 4.0;        // logit scale k
    double wdl_temperature = 3.0;  // pawns
};

/// Profile-weighted successor score for the mover: the successor's sensors
/// are seen from the opponent's side, hence the negation.
inline double successor_score(const CartridgeProfile& profile, const Position& successor) {
    const SensorVector s = extract_sensors(successor);
    double dot = 0.0;
    for (std::size_t i = 0; i < kSensorCount; ++i) dot += profile.weights[i] * s[i];
    return -dot;
}

inline std::array<double, 3> material_wdl(const Position& pos, double temperature) {
    const double x = material_diff(pos) / temperature;
    const double win = 1.0 / (1.0 + std::exp(-x));
    const double loss = 1.0 / (1.0 + std::exp(x));
    const double draw = 1.0 - std::abs(win - loss);
    const double sum = win + draw + loss;
    return {win / sum, draw / sum, loss / sum};
}

inline CartridgeOutput evaluate(const CartridgeProfile& profile, const Position& pos) {
    CartridgeOutput out;
    out.moves = legal_moves(pos);
    if (out.moves.empty()) throw NoLegalMovesError("no legal moves in " + pos.fen());
    out.logits.reserve(out.moves.size());
    for (const Move& m : out.moves) out.logits.push_back(profile.sharpness * successor_score(profile, pos.after(m)));
    out.probs = softmax(out.logits);
    out.wdl = material_wdl(pos, profile.wdl_temperature);
    out.piece_attention = piece_attention(pos, out.moves, out.probs);
    return out;
}

/// Argmax of the profile's distribution; ties go to the earliest canonical move.
inline Move opponent_move(const CartridgeProfile& profile, const Position& pos) {
    const CartridgeOutput out = evaluate(profile, pos);
    return out.moves[out.argmax()];
}

/// Fraction of positions where both profiles pick the same argmax move.
inline double overlap(const CartridgeProfile& a, const CartridgeProfile& b, std::span<const Position> positions) {
    if (positions.empty()) return 0.0;
    std::size_t same = 0;
    for (const Position& p : positions)
        if (opponent_move(a, p) == opponent_move(b, p)) ++same;
    return static_cast<double>(same) / static_cast<double>(positions.size());
}

/// Fixed benchmark used to check that shipped profiles differ in play.
inline const std::vector<Position>& benchmark_positions() {
    static const std::vector<Position> positions = sample_positions(100, 0xBE4C4ULL, 8, 40);
    return positions;
}

/// Midgame sample on which the null overlap between profiles is pinned.
inline const std::vector<Position>& null_overlap_positions() {
    static const std::vector<Position> positions = sample_positions(500, 0x0A11ULL, 16, 40);
    return positions;
}

/// Throws std::invalid_argument if any two profiles agree on every
/// benchmark position.
inline void check_distinct(std::span<const CartridgeProfile> profiles) {
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j)
            if (overlap(profiles[i], profiles[j], benchmark_positions()) >= 1.0)
                throw std::invalid_argument("profiles '" + profiles[i].id + "' and '" + profiles[j].id +
                                            "' play identically on the benchmark set");
}

namespace profiles {

// Successor-sensor weights (see features.hpp for the index layout). Material
// carries 20 per unit, i.e. 1.0 score per pawn.
inline CartridgeProfile expressive() {
    return {"expressive",
            {20.0, -1.5, 2.0, -1.0, -1.0, 3.0, 4.0, -4.0, 1.0, 1.0,
             1.0, 1.0, 1.0, -1.5, 0.5, 0.3, 0.0, 1.5, -3.0, 8.0},
            4.0, 3.0};
}

inline CartridgeProfile opponent_a() {
    return {"opponent-A",
            {20.0, -0.5, 1.0, 0.0, 0.0, 6.0, 2.0, -6.0, 0.0, 2.0,
             2.0, 2.0, 0.0, -3.0, 0.0, 0.0, 0.0, 3.0, -4.0, 10.0},
            8.0, 3.0};
}

inline CartridgeProfile opponent_b() {
    return {"opponent-B",
            {20.0, -5.0, 3.0, -2.0, -2.0, 1.0, 1.0, -2.0, 0.0, 0.0,
             0.0, 0.5, 2.0, -0.5, 1.0, 0.5, 0.0, 0.5, -6.0, 6.0},
            8.0, 3.0};
}

/// Reduced member of opponent-A's family (material, mobility and hanging
/// terms only); the weaker side of same-family matchups.
inline CartridgeProfile opponent_a_lite() {
    return {"opponent-A-lite",
            {20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, -6.0, 0.0, 0.0,
             0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -4.0, 10.0},
            8.0, 3.0};
}

}  // namespace profiles

/// Shipped profiles, validated for pairwise distinctness on first use.
inline const std::vector<CartridgeProfile>& shipped_profiles() {
    static const std::vector<CartridgeProfile> all = [] {
        std::vector<CartridgeProfile> v{profiles::expressive(), profiles::opponent_a(), profiles::opponent_b(),
                                        profiles::opponent_a_lite()};
        check_distinct(v);
        return v;
    }();
    return all;
}

inline const CartridgeProfile& profile_by_id(const std::string& id) {
    for (const auto& p : shipped_profiles())
        if (p.id == id) return p;
    throw std::invalid_argument("unknown cartridge profile '" + id + "'");
}

class HeuristicCartridge final : public Cartridge {
public:
    explicit HeuristicCartridge(CartridgeProfile profile) : profile_(std::move(profile)) {}
    std::string id() const override { return profile_.id; }
    CartridgeOutput evaluate(const Position& pos) const override { return brainlab::evaluate(profile_, pos); }
    const CartridgeProfile& profile() const { return profile_; }

private:
    CartridgeProfile profile_;
};

/// Serves recorded distributions. File format, one record per line,
/// tab-separated: FEN, then (uci move, logit) pairs, then 3 WDL values, then
/// 6 attention values (pawn .. king).
class ReplayCartridge final : public Cartridge {
public:
    struct Record {
        std::vector<std::pair<std::string, double>> move_logits;
        std::array<double, 3> wdl{};
        std::array<double, kPieceTypeCount> attention{};
    };

    static ReplayCartridge parse(std::istream& in, std::string id = "replay") {
        ReplayCartridge c;
        c.id_ = std::move(id);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string f;
            while (std::getline(ss, f, '\t')) fields.push_back(f);
            const std::size_t tail = 3 + kPieceTypeCount;
            if (fields.size() < 1 + 2 + tail || (fields.size() - 1 - tail) % 2 != 0)
                throw ReplayError("replay line " + std::to_string(lineno) + ": malformed record");
            Record r;
            try {
                for (std::size_t i = 1; i + tail < fields.size(); i += 2)
                    r.move_logits.emplace_back(fields[i], std::stod(fields[i + 1]));
                const std::size_t t0 = fields.size() - tail;
                for (std::size_t i = 0; i < 3; ++i) r.wdl[i] = std::stod(fields[t0 + i]);
                for (std::size_t i = 0; i < kPieceTypeCount; ++i) r.attention[i] = std::stod(fields[t0 + 3 + i]);
            } catch (const std::logic_error&) {
                throw ReplayError("replay line " + std::to_string(lineno) + ": bad number");
            }
            c.records_[canonical_key(fields[0])] = std::move(r);
        }
        return c;
    }

    static ReplayCartridge load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ReplayError("cannot open replay file " + path);
        return parse(in, path);
    }

    std::string id() const override { return id_; }
    std::size_t size() const { return records_.size(); }

    CartridgeOutput evaluate(const Position& pos) const override {
        const auto it = records_.find(canonical_key(pos.fen()));
        if (it == records_.end()) throw ReplayError("replay has no record for " + pos.fen());
        CartridgeOutput out;
        out.moves = legal_moves(pos);
        if (out.moves.empty()) throw NoLegalMovesError("no legal moves in " + pos.fen());
        if (it->second.move_logits.size() != out.moves.size())
            throw ReplayError("replay move count mismatch for " + pos.fen());
        out.logits.assign(out.moves.size(), 0.0);
        std::vector<bool> seen(out.moves.size(), false);
        for (const auto& [uci, logit] : it->second.move_logits) {
            const auto m = std::find_if(out.moves.begin(), out.moves.end(),
                                        [&uci](const Move& mv) { return mv.uci() == uci; });
            if (m == out.moves.end()) throw ReplayError("replay move " + uci + " is not legal in " + pos.fen());
            const auto idx = static_cast<std::size_t>(m - out.moves.begin());
            if (seen[idx]) throw ReplayError("replay move " + uci + " repeated");
            seen[idx] = true;
            out.logits[idx] = logit;
        }
        out.probs = softmax(out.logits);
        out.wdl = it->second.wdl;
        out.piece_attention = it->second.attention;
        return out;
    }

    /// Writes one record for `pos` from another cartridge's output.
    static std::string format_record(const Position& pos, const CartridgeOutput& out) {
        std::ostringstream os;
        os.precision(17);
        os << pos.fen();
        for (std::size_t i = 0; i < out.moves.size(); ++i) os << '\t' << out.moves[i].uci() << '\t' << out.logits[i];
        for (double w : out.wdl) os << '\t' << w;
        for (double a : out.piece_attention) os << '\t' << a;
        return os.str();
    }

private:
    // Placement, side, castling and en-passant; clocks do not identify a position.
    static std::string canonical_key(const std::string& fen) {
        std::istringstream in(fen);
        std::string a, b, c, d;
        in >> a >> b >> c >> d;
        return a + ' ' + b + ' ' + c + ' ' + d;
    }

    std::string id_;
    std::map<std::string, Record> records_;
};

}  // namespace brainlab
