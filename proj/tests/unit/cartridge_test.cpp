#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "brainlab/cartridge.hpp"

using namespace brainlab;

namespace {

nlohmann::json golden() {
    std::ifstream in(std::string(BRAINLAB_TEST_DATA) + "/null_overlap.json");
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Cartridge, OutputInvariantsOnSampledPositions) {
    for (const auto& profile : shipped_profiles()) {
        for (const auto& p : sample_positions(200, 5, 0, 60)) {
            const auto out = evaluate(profile, p);
            ASSERT_EQ(out.logits.size(), legal_moves(p).size());
            const auto sm = softmax(out.logits);
            double sum = 0.0;
            for (std::size_t i = 0; i < sm.size(); ++i) {
                EXPECT_LT(std::abs(out.probs[i] - sm[i]), 1e-12);
                sum += out.probs[i];
            }
            EXPECT_NEAR(sum, 1.0, 1e-9);
            EXPECT_NEAR(out.wdl[0] + out.wdl[1] + out.wdl[2], 1.0, 1e-9);
            for (double w : out.wdl) EXPECT_GE(w, 0.0);
            double mx = 0.0;
            for (double a : out.piece_attention) {
                EXPECT_TRUE(a >= 0.0 && a <= 1.0);
                mx = std::max(mx, a);
            }
            EXPECT_EQ(mx, 1.0);
        }
    }
}

TEST(Cartridge, DeterministicAndSymmetric) {
    const auto& profile = profiles::expressive();
    const auto a = evaluate(profile, Position::start());
    const auto b = evaluate(profile, Position::start());
    EXPECT_EQ(a.logits, b.logits);
    EXPECT_EQ(a.probs, b.probs);
    EXPECT_EQ(a.wdl, b.wdl);
    EXPECT_NEAR(a.wdl[0], a.wdl[2], 1e-6);
}

TEST(Cartridge, SingletonMoveGetsProbabilityOne) {
    // Black king in the corner with a single escape square.
    const Position p = Position::from_fen("k7/8/1K6/8/8/8/8/1R6 b - - 0 1");
    ASSERT_EQ(legal_moves(p).size(), 1u);
    const auto out = evaluate(profiles::opponent_a(), p);
    EXPECT_EQ(out.probs, std::vector<double>{1.0});
    EXPECT_EQ(opponent_move(profiles::opponent_a(), p), legal_moves(p).front());
}

TEST(Cartridge, ArgmaxMaximizesWeightedSuccessorScore) {
    for (const auto& profile : shipped_profiles()) {
        for (const auto& p : sample_positions(50, 9, 4, 40)) {
            const auto moves = legal_moves(p);
            std::size_t best = 0;
            double best_score = -1e300;
            for (std::size_t i = 0; i < moves.size(); ++i) {
                const auto s = extract_sensors(p.after(moves[i]));
                double dot = 0.0;
                for (std::size_t k = 0; k < s.size(); ++k) dot += profile.weights[k] * s[k];
                if (-dot > best_score) {
                    best_score = -dot;
                    best = i;
                }
            }
            EXPECT_EQ(opponent_move(profile, p), moves[best]) << profile.id << " " << p.fen();
        }
    }
}

TEST(Overlap, IdentityAndDisagreement) {
    const auto& positions = benchmark_positions();
    EXPECT_EQ(overlap(profiles::opponent_a(), profiles::opponent_a(), positions), 1.0);
    for (const auto& p : positions) {
        if (opponent_move(profiles::opponent_a(), p) != opponent_move(profiles::opponent_b(), p)) {
            const std::vector<Position> one{p};
            EXPECT_EQ(overlap(profiles::opponent_a(), profiles::opponent_b(), one), 0.0);
            return;
        }
    }
    FAIL() << "profiles never disagree on the benchmark";
}

TEST(Overlap, MatchesPinnedGoldenValues) {
    const auto g = golden();
    const auto& sample = g.at("positions");
    const auto positions = sample_positions(sample.at("count").get<std::size_t>(), sample.at("seed").get<std::uint64_t>(),
                                            sample.at("min_ply").get<int>(), sample.at("max_ply").get<int>());
    for (const auto& pair : g.at("pairs")) {
        const double got = overlap(profile_by_id(pair.at("a").get<std::string>()),
                                   profile_by_id(pair.at("b").get<std::string>()), positions);
        EXPECT_EQ(got, pair.at("overlap").get<double>());
        EXPECT_GT(got, 0.05);
        EXPECT_LT(got, 0.95);
    }
    ASSERT_EQ(null_overlap_positions().size(), positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) EXPECT_EQ(null_overlap_positions()[i].key(), positions[i].key());
}

TEST(Profiles, DistinctnessCheckRejectsDuplicates) {
    EXPECT_NO_THROW(check_distinct(shipped_profiles()));
    auto copy = profiles::opponent_a();
    copy.id = "copy";
    const std::vector<CartridgeProfile> dup{profiles::opponent_a(), copy};
    EXPECT_THROW(check_distinct(dup), std::invalid_argument);
    EXPECT_THROW(profile_by_id("nope"), std::invalid_argument);
}

TEST(Cartridge, NoLegalMovesIsAnError) {
    const Position mate = Position::from_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3");
    EXPECT_THROW(evaluate(profiles::expressive(), mate), NoLegalMovesError);
}

TEST(Replay, RoundTripsHeuristicOutput) {
    const HeuristicCartridge source(profiles::expressive());
    std::ostringstream file;
    const auto positions = sample_positions(20, 3, 2, 30);
    for (const auto& p : positions) file << ReplayCartridge::format_record(p, source.evaluate(p)) << '\n';
    std::istringstream in(file.str());
    const auto replay = ReplayCartridge::parse(in);
    EXPECT_EQ(replay.size(), positions.size());
    for (const auto& p : positions) {
        const auto a = source.evaluate(p), b = replay.evaluate(p);
        EXPECT_EQ(a.moves, b.moves);
        EXPECT_EQ(a.logits, b.logits);
        EXPECT_EQ(a.wdl, b.wdl);
        EXPECT_EQ(a.piece_attention, b.piece_attention);
    }
    EXPECT_THROW(replay.evaluate(Position::from_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1")), ReplayError);
}

TEST(Replay, RejectsMalformedRecords) {
    std::istringstream bad("not a record\n");
    EXPECT_THROW(ReplayCartridge::parse(bad), ReplayError);
    const Position start = Position::start();
    std::string line = start.fen() + "\te2e4\t1.0";
    for (int i = 0; i < 9; ++i) line += "\t0.5";
    std::istringstream short_moves(line + "\n");
    const auto replay = ReplayCartridge::parse(short_moves);
    EXPECT_THROW(replay.evaluate(start), ReplayError);
}
