#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "brainlab/board.hpp"
#include "oracles.hpp"

using namespace brainlab;

namespace {

std::vector<oracle::PerftCase> perft_cases() {
    return oracle::load_perft(std::string(BRAINLAB_TEST_DATA) + "/perft_positions.tsv");
}

}  // namespace


TEST(Perft, MatchesOracleCountsToDepthFour) {
    const auto cases = perft_cases();
    ASSERT_EQ(cases.size(), 10u);
    for (const auto& c : cases) {
        const Position pos = Position::from_fen(c.fen);
        for (std::size_t d = 0; d < c.counts.size(); ++d)
            EXPECT_EQ(perft(pos, static_cast<int>(d + 1)), c.counts[d]) << c.fen << " depth " << d + 1;
    }
}

TEST(Fen, RoundTripsStandardPositions) {
    for (const auto& c : perft_cases()) EXPECT_EQ(Position::from_fen(c.fen).fen(), c.fen);
    EXPECT_EQ(Position::start().fen(), "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

TEST(Fen, RejectsMalformedInput) {
    EXPECT_THROW(Position::from_fen(""), FenError);
    EXPECT_THROW(Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP w KQkq - 0 1"), FenError);
    EXPECT_THROW(Position::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"), FenError);
    EXPECT_THROW(Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1"), FenError);
}

TEST(Moves, StartPositionHasTwentyCanonicallyOrderedMoves) {
    const auto moves = legal_moves(Position::start());
    ASSERT_EQ(moves.size(), 20u);
    EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
}

TEST(Moves, IllegalMoveIsRejected) {
    const Position p = Position::start();
    EXPECT_THROW(apply_move(p, Move::make(make_square(4, 1), make_square(4, 4))), IllegalMoveError);
    EXPECT_THROW(parse_uci(p, "e2e5"), IllegalMoveError);
    EXPECT_NO_THROW(parse_uci(p, "e2e4"));
}

TEST(Termination, FoolsMateIsCheckmate) {
    Position p = Position::start();
    GameHistory h;
    for (const char* uci : {"f2f3", "e7e5", "g2g4", "d8h4"}) {
        h.keys.push_back(p.key());
        p = apply_move(p, parse_uci(p, uci));
    }
    const auto status = game_status(p, h, 200);
    ASSERT_TRUE(status);
    EXPECT_EQ(status->outcome, Outcome::BlackWin);
    EXPECT_EQ(status->reason, Termination::Checkmate);
}

TEST(Termination, StalemateIsDraw) {
    const Position p = Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1");
    const auto status = game_status(p, {}, 200);
    ASSERT_TRUE(status);
    EXPECT_EQ(status->reason, Termination::Stalemate);
}

TEST(Termination, ThreefoldRepetitionIsDraw) {
    Position p = Position::start();
    GameHistory h;
    const char* cycle[] = {"g1f3", "g8f6", "f3g1", "f6g8"};
    for (int rep = 0; rep < 2; ++rep)
        for (const char* uci : cycle) {
            EXPECT_FALSE(game_status(p, h, 200));
            h.keys.push_back(p.key());
            p = apply_move(p, parse_uci(p, uci));
        }
    const auto status = game_status(p, h, 200);
    ASSERT_TRUE(status);
    EXPECT_EQ(status->reason, Termination::Repetition);
}

TEST(Termination, FiftyMoveRuleAndInsufficientMaterial) {
    EXPECT_EQ(game_status(Position::from_fen("8/8/4k3/8/8/3K4/8/R7 w - - 100 80"), {}, 200)->reason,
              Termination::FiftyMove);
    EXPECT_EQ(game_status(Position::from_fen("8/8/4k3/8/8/3K4/8/B7 w - - 0 1"), {}, 200)->reason,
              Termination::InsufficientMaterial);
    EXPECT_FALSE(game_status(Position::from_fen("8/8/4k3/8/8/3K4/8/R7 w - - 0 1"), {}, 200));
}

TEST(Termination, PlyCapEndsInDraw) {
    GameHistory h;
    h.keys.assign(10, 0);
    const auto status = game_status(Position::start(), h, 10);
    ASSERT_TRUE(status);
    EXPECT_EQ(status->outcome, Outcome::Draw);
    EXPECT_EQ(status->reason, Termination::PlyCap);
}

TEST(Zobrist, TranspositionsShareKeysAndEnPassantOnlyWhenCapturable) {
    Position a = Position::start(), b = Position::start();
    for (const char* uci : {"g1f3", "g8f6", "b1c3"}) a = apply_move(a, parse_uci(a, uci));
    for (const char* uci : {"b1c3", "g8f6", "g1f3"}) b = apply_move(b, parse_uci(b, uci));
    EXPECT_EQ(a.key(), b.key());
    // After 1. e4 no black pawn can capture en passant: same key as without the ep square.
    const Position e4 = apply_move(Position::start(), parse_uci(Position::start(), "e2e4"));
    EXPECT_EQ(e4.key(), Position::from_fen("rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1").key());
}

TEST(PgnLight, FormatsTabSeparatedLine) {
    const Position p = Position::start();
    const std::vector<Move> moves{parse_uci(p, "e2e4")};
    EXPECT_EQ(pgn_light(p.fen(), moves, {Outcome::Draw, Termination::PlyCap}),
              p.fen() + "\te2e4\t1/2-1/2\tply-cap");
}
