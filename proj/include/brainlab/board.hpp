#pragma once

// Chess rules: position representation, FEN, legal move generation, move
// application and game termination.
//
// Squares are numbered a1 = 0 ... h8 = 63 (rank * 8 + file). The board is a
// plain 64-entry mailbox; positions are small values and every operation
// returns a fresh Position.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brainlab/rng.hpp"

namespace brainlab {

enum class Color : std::uint8_t { White = 0, Black = 1 };

inline constexpr Color opposite(Color c) noexcept {
    return c == Color::White ? Color::Black : Color::White;
}

enum class PieceType : std::uint8_t { Pawn = 0, Knight, Bishop, Rook, Queen, King };

inline constexpr int kPieceTypeCount = 6;

inline constexpr int index_of(PieceType t) noexcept { return static_cast<int>(t); }
inline constexpr int index_of(Color c) noexcept { return static_cast<int>(c); }

using Square = int;

inline constexpr int file_of(Square s) noexcept { return s & 7; }
inline constexpr int rank_of(Square s) noexcept { return s >> 3; }
inline constexpr Square make_square(int file, int rank) noexcept { return rank * 8 + file; }

inline std::string square_name(Square s) {
    return {static_cast<char>('a' + file_of(s)), static_cast<char>('1' + rank_of(s))};
}

/// A square's contents: 0 = empty, otherwise 1 + type + 6 * color.
struct Piece {
    std::uint8_t code = 0;

    static constexpr Piece make(Color c, PieceType t) noexcept {
        return Piece{static_cast<std::uint8_t>(1 + index_of(t) + 6 * index_of(c))};
    }
    constexpr bool empty() const noexcept { return code == 0; }
    constexpr PieceType type() const noexcept { return static_cast<PieceType>((code - 1) % 6); }
    constexpr Color color() const noexcept { return (code - 1) < 6 ? Color::White : Color::Black; }
    constexpr bool is(Color c, PieceType t) const noexcept { return code == make(c, t).code; }
    friend constexpr bool operator==(Piece, Piece) = default;
};

class IllegalMoveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FenError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// From-square, to-square and optional promotion piece. Moves order by
/// (from, to, promotion) with "no promotion" first.
struct Move {
    std::uint8_t from = 0;
    std::uint8_t to = 0;
    std::uint8_t promo = 0;  // 0 = none, else 1 + PieceType

    static constexpr Move make(Square f, Square t) noexcept {
        return Move{static_cast<std::uint8_t>(f), static_cast<std::uint8_t>(t), 0};
    }
    static constexpr Move make(Square f, Square t, PieceType p) noexcept {
        return Move{static_cast<std::uint8_t>(f), static_cast<std::uint8_t>(t),
                    static_cast<std::uint8_t>(1 + index_of(p))};
    }

    std::optional<PieceType> promotion() const noexcept {
        if (promo == 0) return std::nullopt;
        return static_cast<PieceType>(promo - 1);
    }

    std::string uci() const {
        std::string s = square_name(from) + square_name(to);
        if (promo != 0) s += "pnbrqk"[promo - 1];
        return s;
    }

    friend constexpr auto operator<=>(const Move&, const Move&) = default;
};

enum class Outcome : std::uint8_t { WhiteWin, BlackWin, Draw };

enum class Termination : std::uint8_t {
    Checkmate,
    Stalemate,
    InsufficientMaterial,
    FiftyMove,
    Repetition,
    PlyCap
};

struct GameResult {
    Outcome outcome = Outcome::Draw;
    Termination reason = Termination::PlyCap;
    friend bool operator==(const GameResult&, const GameResult&) = default;
};

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::Checkmate: return "checkmate";
        case Termination::Stalemate: return "stalemate";
        case Termination::InsufficientMaterial: return "insufficient-material";
        case Termination::FiftyMove: return "fifty-move";
        case Termination::Repetition: return "repetition";
        case Termination::PlyCap: return "ply-cap";
    }
    return "unknown";
}

inline std::string result_token(Outcome o) {
    switch (o) {
        case Outcome::WhiteWin: return "1-0";
        case Outcome::BlackWin: return "0-1";
        case Outcome::Draw: return "1/2-1/2";
    }
    return "*";
}

namespace detail {

inline constexpr std::array<std::pair<int, int>, 8> kKnightSteps{
    {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
inline constexpr std::array<std::pair<int, int>, 8> kKingSteps{
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
inline constexpr std::array<std::pair<int, int>, 4> kRookDirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
inline constexpr std::array<std::pair<int, int>, 4> kBishopDirs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

inline constexpr bool on_board(int file, int rank) noexcept {
    return file >= 0 && file < 8 && rank >= 0 && rank < 8;
}

enum CastleBits : std::uint8_t { kWhiteKing = 1, kWhiteQueen = 2, kBlackKing = 4, kBlackQueen = 8 };

struct ZobristTable {
    std::array<std::array<std::uint64_t, 64>, 13> piece{};
    std::array<std::uint64_t, 16> castling{};
    std::array<std::uint64_t, 8> ep_file{};
    std::uint64_t black_to_move = 0;

    ZobristTable() {
        std::uint64_t s = 0x5EEDBA5EULL;
        auto next = [&s] { return s = splitmix64(s); };
        for (auto& row : piece)
            for (auto& v : row) v = next();
        for (auto& v : castling) v = next();
        for (auto& v : ep_file) v = next();
        black_to_move = next();
    }
};

inline const ZobristTable& zobrist() {
    static const ZobristTable table;
    return table;
}

}  // namespace detail

class Position {
public:
    static Position start() {
        return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    }

    static Position from_fen(std::string_view fen) {
        std::istringstream in{std::string(fen)};
        std::string placement, side, castle, ep;
        int half = 0, full = 1;
        if (!(in >> placement >> side >> castle >> ep)) throw FenError("FEN needs at least 4 fields");
        if (!(in >> half)) half = 0;
        if (!(in >> full)) full = 1;

        Position p;
        int rank = 7, file = 0;
        for (char ch : placement) {
            if (ch == '/') {
                if (file != 8) throw FenError("FEN rank does not have 8 files");
                --rank;
                file = 0;
                continue;
            }
            if (ch >= '1' && ch <= '8') {
                file += ch - '0';
                if (file > 8) throw FenError("FEN rank overflow");
                continue;
            }
            const auto pos = std::string_view("PNBRQKpnbrqk").find(ch);
            if (pos == std::string_view::npos) throw FenError(std::string("bad FEN piece '") + ch + "'");
            if (rank < 0 || file > 7) throw FenError("FEN placement out of range");
            const Color c = pos < 6 ? Color::White : Color::Black;
            p.board_[make_square(file, rank)] = Piece::make(c, static_cast<PieceType>(pos % 6));
            ++file;
        }
        if (rank != 0 || file != 8) throw FenError("FEN placement must describe 8 ranks");

        if (side == "w") p.stm_ = Color::White;
        else if (side == "b") p.stm_ = Color::Black;
        else throw FenError("bad side to move");

        p.castling_ = 0;
        if (castle != "-") {
            for (char ch : castle) {
                switch (ch) {
                    case 'K': p.castling_ |= detail::kWhiteKing; break;
                    case 'Q': p.castling_ |= detail::kWhiteQueen; break;
                    case 'k': p.castling_ |= detail::kBlackKing; break;
                    case 'q': p.castling_ |= detail::kBlackQueen; break;
                    default: throw FenError("bad castling field");
                }
            }
        }
        p.ep_ = -1;
        if (ep != "-") {
            if (ep.size() != 2 || ep[0] < 'a' || ep[0] > 'h' || (ep[1] != '3' && ep[1] != '6'))
                throw FenError("bad en-passant field");
            p.ep_ = make_square(ep[0] - 'a', ep[1] - '1');
        }
        if (half < 0) throw FenError("halfmove clock must be >= 0");
        if (full < 1) throw FenError("fullmove number must be >= 1");
        p.halfmove_ = half;
        p.fullmove_ = full;

        int kings[2] = {0, 0};
        for (Square s = 0; s < 64; ++s) {
            const Piece pc = p.board_[s];
            if (!pc.empty() && pc.type() == PieceType::King) {
                ++kings[index_of(pc.color())];
                p.king_[index_of(pc.color())] = static_cast<std::int8_t>(s);
            }
        }
        if (kings[0] != 1 || kings[1] != 1) throw FenError("each side needs exactly one king");
        p.key_ = p.compute_key();
        return p;
    }

    std::string fen() const {
        std::string out;
        for (int rank = 7; rank >= 0; --rank) {
            int empty = 0;
            for (int file = 0; file < 8; ++file) {
                const Piece pc = board_[make_square(file, rank)];
                if (pc.empty()) {
                    ++empty;
                    continue;
                }
                if (empty) out += static_cast<char>('0' + empty);
                empty = 0;
                out += "PNBRQKpnbrqk"[pc.code - 1];
            }
            if (empty) out += static_cast<char>('0' + empty);
            if (rank) out += '/';
        }
        out += stm_ == Color::White ? " w " : " b ";
        if (castling_ == 0) out += '-';
        if (castling_ & detail::kWhiteKing) out += 'K';
        if (castling_ & detail::kWhiteQueen) out += 'Q';
        if (castling_ & detail::kBlackKing) out += 'k';
        if (castling_ & detail::kBlackQueen) out += 'q';
        out += ' ';
        out += ep_ < 0 ? std::string("-") : square_name(ep_);
        out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
        return out;
    }

    Piece at(Square s) const noexcept { return board_[s]; }
    Color side_to_move() const noexcept { return stm_; }
    int halfmove_clock() const noexcept { return halfmove_; }
    int fullmove_number() const noexcept { return fullmove_; }
    std::optional<Square> en_passant() const noexcept {
        if (ep_ < 0) return std::nullopt;
        return ep_;
    }
    std::uint8_t castling_rights() const noexcept { return castling_; }
    Square king_square(Color c) const noexcept { return king_[index_of(c)]; }

    /// Zobrist key over placement, side, castling rights and a capturable
    /// en-passant square; used for repetition detection.
    std::uint64_t key() const noexcept { return key_; }

    /// True when `by` attacks square s (pseudo-attack; pins ignored).
    bool attacked(Square s, Color by) const noexcept {
        const int f = file_of(s), r = rank_of(s);
        const int pawn_rank = by == Color::White ? r - 1 : r + 1;
        for (int df : {-1, 1}) {
            if (detail::on_board(f + df, pawn_rank) &&
                board_[make_square(f + df, pawn_rank)].is(by, PieceType::Pawn))
                return true;
        }
        for (auto [df, dr] : detail::kKnightSteps) {
            if (detail::on_board(f + df, r + dr) &&
                board_[make_square(f + df, r + dr)].is(by, PieceType::Knight))
                return true;
        }
        for (auto [df, dr] : detail::kKingSteps) {
            if (detail::on_board(f + df, r + dr) &&
                board_[make_square(f + df, r + dr)].is(by, PieceType::King))
                return true;
        }
        auto slide = [&](auto dirs, PieceType t) {
            for (auto [df, dr] : dirs) {
                int ff = f + df, rr = r + dr;
                while (detail::on_board(ff, rr)) {
                    const Piece pc = board_[make_square(ff, rr)];
                    if (!pc.empty()) {
                        if (pc.color() == by && (pc.type() == t || pc.type() == PieceType::Queen)) return true;
                        break;
                    }
                    ff += df;
                    rr += dr;
                }
            }
            return false;
        };
        return slide(detail::kRookDirs, PieceType::Rook) || slide(detail::kBishopDirs, PieceType::Bishop);
    }

    bool in_check() const noexcept { return attacked(king_square(stm_), opposite(stm_)); }

    /// Moves that obey piece movement rules, ignoring whether the mover's king
    /// is left in check. Castling through or out of check is already excluded.
    std::vector<Move> pseudo_legal_moves() const {
        std::vector<Move> out;
        out.reserve(48);
        const Color us = stm_, them = opposite(stm_);
        for (Square s = 0; s < 64; ++s) {
            const Piece pc = board_[s];
            if (pc.empty() || pc.color() != us) continue;
            const int f = file_of(s), r = rank_of(s);
            switch (pc.type()) {
                case PieceType::Pawn: gen_pawn(s, out); break;
                case PieceType::Knight:
                    for (auto [df, dr] : detail::kKnightSteps) add_step(s, f + df, r + dr, out);
                    break;
                case PieceType::King:
                    for (auto [df, dr] : detail::kKingSteps) add_step(s, f + df, r + dr, out);
                    gen_castles(them, out);
                    break;
                case PieceType::Bishop: add_slides(s, detail::kBishopDirs, out); break;
                case PieceType::Rook: add_slides(s, detail::kRookDirs, out); break;
                case PieceType::Queen:
                    add_slides(s, detail::kBishopDirs, out);
                    add_slides(s, detail::kRookDirs, out);
                    break;
            }
        }
        return out;
    }

    /// Applies a move without checking legality. Intended for moves taken from
    /// legal_moves() or pseudo_legal_moves().
    Position after(const Move& m) const {
        Position p = *this;
        const Square from = m.from, to = m.to;
        const Piece mover = board_[from];
        const Piece captured = board_[to];
        const Color us = stm_;
        const PieceType type = mover.type();
        bool capture = !captured.empty();

        p.board_[from] = Piece{};
        p.board_[to] = mover;
        if (type == PieceType::Pawn) {
            if (to == ep_) {
                const Square victim = us == Color::White ? to - 8 : to + 8;
                p.board_[victim] = Piece{};
                capture = true;
            }
            if (auto promo = m.promotion()) p.board_[to] = Piece::make(us, *promo);
        }
        if (type == PieceType::King) {
            p.king_[index_of(us)] = static_cast<std::int8_t>(to);
            if (to - from == 2) {
                p.board_[to - 1] = p.board_[to + 1];
                p.board_[to + 1] = Piece{};
            } else if (from - to == 2) {
                p.board_[to + 1] = p.board_[to - 2];
                p.board_[to - 2] = Piece{};
            }
            p.castling_ &= us == Color::White
                               ? static_cast<std::uint8_t>(~(detail::kWhiteKing | detail::kWhiteQueen))
                               : static_cast<std::uint8_t>(~(detail::kBlackKing | detail::kBlackQueen));
        }
        auto clear_rook_right = [&p](Square s) {
            if (s == 0) p.castling_ &= static_cast<std::uint8_t>(~detail::kWhiteQueen);
            if (s == 7) p.castling_ &= static_cast<std::uint8_t>(~detail::kWhiteKing);
            if (s == 56) p.castling_ &= static_cast<std::uint8_t>(~detail::kBlackQueen);
            if (s == 63) p.castling_ &= static_cast<std::uint8_t>(~detail::kBlackKing);
        };
        clear_rook_right(from);
        clear_rook_right(to);

        p.ep_ = -1;
        if (type == PieceType::Pawn && (to - from == 16 || from - to == 16)) {
            const Square passed = (from + to) / 2;
            const int pr = rank_of(to);
            for (int df : {-1, 1}) {
                const int ff = file_of(to) + df;
                if (detail::on_board(ff, pr) && p.board_[make_square(ff, pr)].is(opposite(us), PieceType::Pawn))
                    p.ep_ = static_cast<std::int8_t>(passed);
            }
        }
        p.halfmove_ = (capture || type == PieceType::Pawn) ? 0 : halfmove_ + 1;
        if (us == Color::Black) ++p.fullmove_;
        p.stm_ = opposite(us);
        p.key_ = p.compute_key();
        return p;
    }

    bool is_capture(const Move& m) const noexcept {
        if (!board_[m.to].empty()) return true;
        return board_[m.from].type() == PieceType::Pawn && m.to == ep_;
    }

    friend bool operator==(const Position& a, const Position& b) {
        return a.board_ == b.board_ && a.stm_ == b.stm_ && a.castling_ == b.castling_ && a.ep_ == b.ep_ &&
               a.halfmove_ == b.halfmove_ && a.fullmove_ == b.fullmove_;
    }

private:
    void add_step(Square from, int f, int r, std::vector<Move>& out) const {
        if (!detail::on_board(f, r)) return;
        const Square to = make_square(f, r);
        const Piece pc = board_[to];
        if (pc.empty() || pc.color() != stm_) out.push_back(Move::make(from, to));
    }

    template <typename Dirs>
    void add_slides(Square from, const Dirs& dirs, std::vector<Move>& out) const {
        const int f = file_of(from), r = rank_of(from);
        for (auto [df, dr] : dirs) {
            int ff = f + df, rr = r + dr;
            while (detail::on_board(ff, rr)) {
                const Square to = make_square(ff, rr);
                const Piece pc = board_[to];
                if (pc.empty()) {
                    out.push_back(Move::make(from, to));
                } else {
                    if (pc.color() != stm_) out.push_back(Move::make(from, to));
                    break;
                }
                ff += df;
                rr += dr;
            }
        }
    }

    void add_pawn_move(Square from, Square to, std::vector<Move>& out) const {
        const int r = rank_of(to);
        if (r == 7 || r == 0) {
            for (PieceType t : {PieceType::Knight, PieceType::Bishop, PieceType::Rook, PieceType::Queen})
                out.push_back(Move::make(from, to, t));
        } else {
            out.push_back(Move::make(from, to));
        }
    }

    void gen_pawn(Square s, std::vector<Move>& out) const {
        const int dir = stm_ == Color::White ? 1 : -1;
        const int start_rank = stm_ == Color::White ? 1 : 6;
        const int f = file_of(s), r = rank_of(s);
        const int r1 = r + dir;
        if (!detail::on_board(f, r1)) return;
        if (board_[make_square(f, r1)].empty()) {
            add_pawn_move(s, make_square(f, r1), out);
            if (r == start_rank && board_[make_square(f, r + 2 * dir)].empty())
                out.push_back(Move::make(s, make_square(f, r + 2 * dir)));
        }
        for (int df : {-1, 1}) {
            if (!detail::on_board(f + df, r1)) continue;
            const Square to = make_square(f + df, r1);
            const Piece pc = board_[to];
            if ((!pc.empty() && pc.color() != stm_) || to == ep_) add_pawn_move(s, to, out);
        }
    }

    void gen_castles(Color them, std::vector<Move>& out) const {
        const bool white = stm_ == Color::White;
        const Square k = white ? 4 : 60;
        if (king_square(stm_) != k) return;
        const std::uint8_t kside = white ? detail::kWhiteKing : detail::kBlackKing;
        const std::uint8_t qside = white ? detail::kWhiteQueen : detail::kBlackQueen;
        const Piece rook = Piece::make(stm_, PieceType::Rook);
        if ((castling_ & kside) && board_[k + 3] == rook && board_[k + 1].empty() && board_[k + 2].empty() &&
            !attacked(k, them) && !attacked(k + 1, them) && !attacked(k + 2, them))
            out.push_back(Move::make(k, k + 2));
        if ((castling_ & qside) && board_[k - 4] == rook && board_[k - 1].empty() && board_[k - 2].empty() &&
            board_[k - 3].empty() && !attacked(k, them) && !attacked(k - 1, them) && !attacked(k - 2, them))
            out.push_back(Move::make(k, k - 2));
    }

    bool ep_capturable() const noexcept {
        if (ep_ < 0) return false;
        const int cap_rank = stm_ == Color::White ? 4 : 3;
        for (int df : {-1, 1}) {
            const int ff = file_of(ep_) + df;
            if (detail::on_board(ff, cap_rank) && board_[make_square(ff, cap_rank)].is(stm_, PieceType::Pawn))
                return true;
        }
        return false;
    }

    std::uint64_t compute_key() const noexcept {
        const auto& z = detail::zobrist();
        std::uint64_t k = 0;
        for (Square s = 0; s < 64; ++s) k ^= z.piece[board_[s].code][s];
        k ^= z.castling[castling_];
        if (ep_capturable()) k ^= z.ep_file[file_of(ep_)];
        if (stm_ == Color::Black) k ^= z.black_to_move;
        return k;
    }

    std::array<Piece, 64> board_{};
    Color stm_ = Color::White;
    std::uint8_t castling_ = 0;
    std::int8_t ep_ = -1;
    int halfmove_ = 0;
    int fullmove_ = 1;
    std::array<std::int8_t, 2> king_{{4, 60}};
    std::uint64_t key_ = 0;
};

/// Every legal move, sorted by (from, to, promotion).
inline std::vector<Move> legal_moves(const Position& pos) {
    std::vector<Move> moves = pos.pseudo_legal_moves();
    const Color us = pos.side_to_move();
    std::erase_if(moves, [&](const Move& m) {
        const Position next = pos.after(m);
        return next.attacked(next.king_square(us), opposite(us));
    });
    std::sort(moves.begin(), moves.end());
    return moves;
}

inline Position apply_move(const Position& pos, const Move& mv) {
    const auto moves = legal_moves(pos);
    if (!std::binary_search(moves.begin(), moves.end(), mv))
        throw IllegalMoveError("illegal move " + mv.uci() + " in " + pos.fen());
    return pos.after(mv);
}

inline Move parse_uci(const Position& pos, std::string_view text) {
    for (const Move& m : legal_moves(pos))
        if (m.uci() == text) return m;
    throw IllegalMoveError("no legal move '" + std::string(text) + "' in " + pos.fen());
}

inline std::uint64_t perft(const Position& pos, int depth) {
    if (depth <= 0) return 1;
    const auto moves = legal_moves(pos);
    if (depth == 1) return moves.size();
    std::uint64_t n = 0;
    for (const Move& m : moves) n += perft(pos.after(m), depth - 1);
    return n;
}

inline bool insufficient_material(const Position& pos) {
    int minors[2] = {0, 0};
    int bishop_colors[2][2] = {{0, 0}, {0, 0}};
    for (Square s = 0; s < 64; ++s) {
        const Piece pc = pos.at(s);
        if (pc.empty()) continue;
        switch (pc.type()) {
            case PieceType::King: break;
            case PieceType::Knight: ++minors[index_of(pc.color())]; break;
            case PieceType::Bishop:
                ++minors[index_of(pc.color())];
                ++bishop_colors[index_of(pc.color())][(file_of(s) + rank_of(s)) & 1];
                break;
            default: return false;
        }
    }
    const int total = minors[0] + minors[1];
    if (total <= 1) return true;
    // Only bishops, all on one square colour.
    const int bishops = bishop_colors[0][0] + bishop_colors[0][1] + bishop_colors[1][0] + bishop_colors[1][1];
    if (bishops == total) {
        const int light = bishop_colors[0][1] + bishop_colors[1][1];
        return light == 0 || light == total;
    }
    return false;
}

/// Prior positions of a game (keys of every position before the current one).
struct GameHistory {
    std::vector<std::uint64_t> keys;
    int ply() const noexcept { return static_cast<int>(keys.size()); }
};

/// Termination check. `history` holds every earlier position of the game, so
/// its length is the ply count.
inline std::optional<GameResult> game_status(const Position& pos, const GameHistory& history, int ply_cap) {
    if (legal_moves(pos).empty()) {
        if (pos.in_check()) {
            return GameResult{pos.side_to_move() == Color::White ? Outcome::BlackWin : Outcome::WhiteWin,
                              Termination::Checkmate};
        }
        return GameResult{Outcome::Draw, Termination::Stalemate};
    }
    if (insufficient_material(pos)) return GameResult{Outcome::Draw, Termination::InsufficientMaterial};
    if (pos.halfmove_clock() >= 100) return GameResult{Outcome::Draw, Termination::FiftyMove};
    const auto seen = std::count(history.keys.begin(), history.keys.end(), pos.key());
    if (seen >= 2) return GameResult{Outcome::Draw, Termination::Repetition};
    if (history.ply() >= ply_cap) return GameResult{Outcome::Draw, Termination::PlyCap};
    return std::nullopt;
}

/// One game per line: start FEN, UCI move list, result token (tab-separated).
inline std::string pgn_light(const std::string& start_fen, std::span<const Move> moves, const GameResult& result) {
    std::string line = start_fen + '\t';
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (i) line += ' ';
        line += moves[i].uci();
    }
    line += '\t' + result_token(result.outcome) + '\t' + to_string(result.reason);
    return line;
}

/// Deterministic sample of positions reached by uniformly random play from
/// the start position, taking one position per playout at a ply drawn from
/// [min_ply, max_ply]. Playouts that end early are discarded.
inline std::vector<Position> sample_positions(std::size_t count, std::uint64_t seed, int min_ply, int max_ply) {
    std::vector<Position> out;
    out.reserve(count);
    Rng rng(seed);
    while (out.size() < count) {
        const int target = min_ply + static_cast<int>(rng.below(static_cast<std::size_t>(max_ply - min_ply + 1)));
        Position p = Position::start();
        bool ok = true;
        for (int ply = 0; ply < target; ++ply) {
            const auto moves = legal_moves(p);
            if (moves.empty()) {
                ok = false;
                break;
            }
            p = p.after(moves[rng.below(moves.size())]);
        }
        if (ok && !legal_moves(p).empty()) out.push_back(p);
    }
    return out;
}

}  // namespace brainlab
