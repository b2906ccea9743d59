#pragma once

// Feature extractors feeding the brain's signal pool: 20 board sensors,
// 8 game-context values and 4 distribution-shape values, each in [0, 1].
//
// Sensor layout (perspective: side to move = "own"):
//   0  material balance            0.5 + (own - opp) / 20 pawns, clamped
//   1  own king exposure           opponent-attacked squares in own king zone / zone size
//   2  own passed pawns            count / 8
//   3  own isolated pawns          count / 8
//   4  own doubled pawns           extra pawns per file / 8
//   5  center control              own / (own + opp) attacks+occupancy on d4 e4 d5 e5
//   6  own mobility                pseudo-legal piece moves / 64
//   7  opponent mobility           same, for the opponent
//   8  rook activity               mean own rook mobility / 14
//   9  bishop pair                 1 if own side has two or more bishops
//   10 knight outposts             own knights on pawn-guarded outposts / 2
//   11 piece coordination          fraction of own non-king pieces defended
//   12 own king pawn shield        own pawns in front of own king / 3
//   13 opponent king pawn shield   same for the opponent king
//   14 rooks on open files         own rooks on files with no pawns / 2
//   15 rooks on semi-open files    own rooks on files with only enemy pawns / 2
//   16 game phase                  non-pawn material / starting non-pawn material
//   17 opponent king exposure      own-attacked squares in opponent king zone / zone size
//   18 own hanging pieces          attacked, undefended own pieces / 4
//   19 opponent hanging pieces     attacked, undefended opponent pieces / 4

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "brainlab/board.hpp"

namespace brainlab {

inline constexpr std::size_t kSensorCount = 20;
inline constexpr std::size_t kContextCount = 8;
inline constexpr std::size_t kDistShapeCount = 4;

using SensorVector = std::array<double, kSensorCount>;
using GameContext = std::array<double, kContextCount>;
using DistShape = std::array<double, kDistShapeCount>;

namespace sensor {
inline constexpr std::size_t kMaterial = 0;
inline constexpr std::size_t kBishopPair = 9;
inline constexpr std::size_t kGamePhase = 16;
}  // namespace sensor

namespace context {
inline constexpr std::size_t kPly = 0;
inline constexpr std::size_t kPhase = 1;
inline constexpr std::size_t kWhiteToMove = 2;
inline constexpr std::size_t kInCheck = 3;
inline constexpr std::size_t kMaterial = 4;
inline constexpr std::size_t kLastCapture = 5;
inline constexpr std::size_t kHalfmove = 6;
inline constexpr std::size_t kLegalCount = 7;
}  // namespace context

inline constexpr int piece_value(PieceType t) noexcept {
    constexpr int values[] = {1, 3, 3, 5, 9, 0};
    return values[index_of(t)];
}

inline constexpr double clamp01(double x) noexcept { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

/// Own minus opponent material in pawns, from the side to move.
inline int material_diff(const Position& pos) {
    int diff = 0;
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty()) continue;
        diff += pc.color() == pos.side_to_move() ? piece_value(pc.type()) : -piece_value(pc.type());
    }
    return diff;
}

inline double material_balance01(const Position& pos) { return clamp01(0.5 + material_diff(pos) / 20.0); }

namespace detail {

struct AttackInfo {
    std::array<std::array<int, 64>, 2> count{};  // attackers per square, by color
    std::array<int, 2> mobility{};               // pseudo-legal non-pawn moves
    std::array<int, 2> rook_mobility{};
    std::array<int, 2> rooks{};
};

inline AttackInfo compute_attacks(const Position& pos) {
    AttackInfo info;
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty()) continue;
        const int c = index_of(pc.color());
        const int f = file_of(s), r = rank_of(s);
        auto touch = [&](Square t) {
            ++info.count[c][t];
            const Piece occ = pos.at(t);
            return occ.empty() || occ.color() != pc.color();
        };
        int moves = 0;
        switch (pc.type()) {
            case PieceType::Pawn: {
                const int dr = pc.color() == Color::White ? 1 : -1;
                for (int df : {-1, 1})
                    if (on_board(f + df, r + dr)) ++info.count[c][make_square(f + df, r + dr)];
                break;
            }
            case PieceType::Knight:
                for (auto [df, dr] : kKnightSteps)
                    if (on_board(f + df, r + dr) && touch(make_square(f + df, r + dr))) ++moves;
                break;
            case PieceType::King:
                for (auto [df, dr] : kKingSteps)
                    if (on_board(f + df, r + dr)) touch(make_square(f + df, r + dr));
                break;
            default: {
                auto slide = [&](auto dirs) {
                    for (auto [df, dr] : dirs) {
                        int ff = f + df, rr = r + dr;
                        while (on_board(ff, rr)) {
                            const Square t = make_square(ff, rr);
                            if (touch(t)) ++moves;
                            if (!pos.at(t).empty()) break;
                            ff += df;
                            rr += dr;
                        }
                    }
                };
                if (pc.type() != PieceType::Rook) slide(kBishopDirs);
                if (pc.type() != PieceType::Bishop) slide(kRookDirs);
                if (pc.type() == PieceType::Rook) {
                    info.rook_mobility[c] += moves;
                    ++info.rooks[c];
                }
                break;
            }
        }
        info.mobility[c] += moves;
    }
    return info;
}

inline double king_exposure(const Position& pos, const AttackInfo& a, Color king_color) {
    const Square k = pos.king_square(king_color);
    const int enemy = index_of(opposite(king_color));
    int zone = 1, hit = a.count[enemy][k] > 0 ? 1 : 0;
    for (auto [df, dr] : kKingSteps) {
        const int f = file_of(k) + df, r = rank_of(k) + dr;
        if (!on_board(f, r)) continue;
        ++zone;
        if (a.count[enemy][make_square(f, r)] > 0) ++hit;
    }
    return static_cast<double>(hit) / zone;
}

inline double pawn_shield(const Position& pos, Color c) {
    const Square k = pos.king_square(c);
    const int dir = c == Color::White ? 1 : -1;
    int n = 0;
    for (int df = -1; df <= 1; ++df) {
        for (int step = 1; step <= 2; ++step) {
            const int f = file_of(k) + df, r = rank_of(k) + dir * step;
            if (on_board(f, r) && pos.at(make_square(f, r)).is(c, PieceType::Pawn)) {
                ++n;
                break;
            }
        }
    }
    return clamp01(n / 3.0);
}

inline int hanging(const Position& pos, const AttackInfo& a, Color c) {
    int n = 0;
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty() || pc.color() != c || pc.type() == PieceType::King) continue;
        if (a.count[index_of(opposite(c))][s] > 0 && a.count[index_of(c)][s] == 0) ++n;
    }
    return n;
}

}  // namespace detail

inline SensorVector extract_sensors(const Position& pos) {
    using detail::on_board;
    const Color us = pos.side_to_move(), them = opposite(us);
    const int own = index_of(us), opp = index_of(them);
    const auto a = detail::compute_attacks(pos);

    // Pawn files and ranks.
    std::array<std::array<int, 8>, 2> pawns_on_file{};
    int bishops = 0, phase = 0;
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty()) continue;
        if (pc.type() == PieceType::Pawn) ++pawns_on_file[index_of(pc.color())][file_of(s)];
        if (pc.type() == PieceType::Bishop && pc.color() == us) ++bishops;
        if (pc.type() == PieceType::Knight || pc.type() == PieceType::Bishop) phase += 1;
        if (pc.type() == PieceType::Rook) phase += 2;
        if (pc.type() == PieceType::Queen) phase += 4;
    }

    int passed = 0, isolated = 0, doubled = 0, outposts = 0, rooks_open = 0, rooks_semi = 0;
    int own_pieces = 0, defended = 0;
    const int fwd = us == Color::White ? 1 : -1;
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty() || pc.color() != us) continue;
        const int f = file_of(s), r = rank_of(s);
        if (pc.type() != PieceType::King) {
            ++own_pieces;
            if (a.count[own][s] > 0) ++defended;
        }
        switch (pc.type()) {
            case PieceType::Pawn: {
                bool blocked = false;
                for (int df = -1; df <= 1 && !blocked; ++df) {
                    if (!on_board(f + df, 0)) continue;
                    for (int rr = r + fwd; rr >= 0 && rr < 8; rr += fwd)
                        if (pos.at(make_square(f + df, rr)).is(them, PieceType::Pawn)) blocked = true;
                }
                if (!blocked) ++passed;
                const bool left = f > 0 && pawns_on_file[own][f - 1] > 0;
                const bool right = f < 7 && pawns_on_file[own][f + 1] > 0;
                if (!left && !right) ++isolated;
                break;
            }
            case PieceType::Knight: {
                const int rel_rank = us == Color::White ? r : 7 - r;
                if (rel_rank < 3 || rel_rank > 5) break;
                bool guarded = false;
                for (int df : {-1, 1}) {
                    if (on_board(f + df, r - fwd) && pos.at(make_square(f + df, r - fwd)).is(us, PieceType::Pawn))
                        guarded = true;
                }
                bool chased = false;
                for (int df : {-1, 1}) {
                    if (!on_board(f + df, 0)) continue;
                    for (int rr = r + fwd; rr >= 0 && rr < 8; rr += fwd)
                        if (pos.at(make_square(f + df, rr)).is(them, PieceType::Pawn)) chased = true;
                }
                if (guarded && !chased) ++outposts;
                break;
            }
            case PieceType::Rook:
                if (pawns_on_file[own][f] == 0 && pawns_on_file[opp][f] == 0) ++rooks_open;
                else if (pawns_on_file[own][f] == 0) ++rooks_semi;
                break;
            default: break;
        }
    }
    for (int f = 0; f < 8; ++f) doubled += std::max(0, pawns_on_file[own][f] - 1);

    int center_own = 0, center_opp = 0;
    for (Square s : {27, 28, 35, 36}) {
        center_own += a.count[own][s];
        center_opp += a.count[opp][s];
        const Piece pc = pos.at(s);
        if (!pc.empty()) (pc.color() == us ? center_own : center_opp) += 1;
    }

    SensorVector v{};
    v[0] = material_balance01(pos);
    v[1] = detail::king_exposure(pos, a, us);
    v[2] = clamp01(passed / 8.0);
    v[3] = clamp01(isolated / 8.0);
    v[4] = clamp01(doubled / 8.0);
    v[5] = center_own + center_opp == 0 ? 0.5 : static_cast<double>(center_own) / (center_own + center_opp);
    v[6] = clamp01(a.mobility[own] / 64.0);
    v[7] = clamp01(a.mobility[opp] / 64.0);
    v[8] = a.rooks[own] == 0 ? 0.0 : clamp01(a.rook_mobility[own] / (14.0 * a.rooks[own]));
    v[9] = bishops >= 2 ? 1.0 : 0.0;
    v[10] = clamp01(outposts / 2.0);
    v[11] = own_pieces == 0 ? 0.0 : static_cast<double>(defended) / own_pieces;
    v[12] = detail::pawn_shield(pos, us);
    v[13] = detail::pawn_shield(pos, them);
    v[14] = clamp01(rooks_open / 2.0);
    v[15] = clamp01(rooks_semi / 2.0);
    v[16] = clamp01(phase / 24.0);
    v[17] = detail::king_exposure(pos, a, them);
    v[18] = clamp01(detail::hanging(pos, a, us) / 4.0);
    v[19] = clamp01(detail::hanging(pos, a, them) / 4.0);
    return v;
}

/// Game-level state the context extractor needs beyond the board.
struct GameState {
    int ply = 0;
    int ply_cap = 200;
    bool last_move_was_capture = false;
    std::size_t legal_move_count = 0;
};

/// Non-pawn material of both sides relative to the starting amount (1 = opening).
inline double game_phase(const Position& pos) {
    int phase = 0;
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty()) continue;
        if (pc.type() == PieceType::Knight || pc.type() == PieceType::Bishop) phase += 1;
        if (pc.type() == PieceType::Rook) phase += 2;
        if (pc.type() == PieceType::Queen) phase += 4;
    }
    return clamp01(phase / 24.0);
}

inline double normalized_move_count(std::size_t n) { return clamp01(static_cast<double>(n) / 64.0); }

inline GameContext extract_context(const Position& pos, const GameState& state) {
    GameContext c{};
    c[context::kPly] = state.ply_cap <= 0 ? 1.0 : std::min(static_cast<double>(state.ply) / state.ply_cap, 1.0);
    c[context::kPhase] = game_phase(pos);
    c[context::kWhiteToMove] = pos.side_to_move() == Color::White ? 1.0 : 0.0;
    c[context::kInCheck] = pos.in_check() ? 1.0 : 0.0;
    c[context::kMaterial] = material_balance01(pos);
    c[context::kLastCapture] = state.last_move_was_capture ? 1.0 : 0.0;
    c[context::kHalfmove] = clamp01(pos.halfmove_clock() / 100.0);
    c[context::kLegalCount] = normalized_move_count(state.legal_move_count);
    return c;
}

/// [normalized entropy, top-1 probability, top-1 minus top-2, normalized move count].
inline DistShape extract_dist_shape(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("distribution shape of an empty distribution");
    double entropy = 0.0, top1 = 0.0, top2 = 0.0;
    for (double p : probs) {
        if (p > 0.0) entropy -= p * std::log(p);
        if (p > top1) {
            top2 = top1;
            top1 = p;
        } else if (p > top2) {
            top2 = p;
        }
    }
    const std::size_t n = probs.size();
    DistShape d{};
    d[0] = n <= 1 ? 0.0 : clamp01(entropy / std::log(static_cast<double>(n)));
    d[1] = clamp01(top1);
    d[2] = clamp01(top1 - top2);
    d[3] = normalized_move_count(n);
    return d;
}

}  // namespace brainlab
