#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "brainlab/cartridge.hpp"
#include "brainlab/signal_chain.hpp"

using namespace brainlab;

namespace {

struct Case {
    std::vector<double> logits, probs;
    std::vector<PieceType> movers;
};

Case random_case(Rng& rng, std::size_t n) {
    Case c;
    for (std::size_t i = 0; i < n; ++i) {
        c.logits.push_back(rng.normal(0.0, 2.0));
        c.movers.push_back(static_cast<PieceType>(rng.below(6)));
    }
    c.probs = softmax(c.logits);
    return c;
}

ChainParams random_params(Rng& rng) {
    ChainParams p;
    p.alpha = rng.uniform(0.3, 2.5);
    p.tau = rng.uniform(0.0, 0.3);
    for (double& g : p.eq_gains) g = rng.uniform(0.1, 3.0);
    p.delta_t = rng.uniform(-1.0, 1.0);
    p.sat_ceiling = rng.uniform(0.1, 1.0);
    p.explore_eps = rng.uniform(0.0, 0.3);
    for (double& w : p.piece_weights) w = rng.uniform(0.1, 3.0);
    return p;
}

std::vector<double> run(const Case& c, const ChainParams& p) { return reshape({c.logits, c.probs, c.movers, p}); }

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

}  // namespace

TEST(Reshape, OutputIsAProbabilityVector) {
    Rng rng(1);
    for (int i = 0; i < 100000; ++i) {
        const Case c = random_case(rng, 1 + rng.below(40));
        const auto out = run(c, random_params(rng));
        double sum = 0.0;
        for (double x : out) {
            ASSERT_GE(x, 0.0);
            sum += x;
        }
        ASSERT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(Reshape, GatesMovesAtOrBelowTau) {
    const std::vector<double> p{0.8, 0.2};
    const std::vector<double> l{std::log(0.8), std::log(0.2)};
    const std::vector<PieceType> m{PieceType::Pawn, PieceType::Knight};
    ChainParams cp;
    cp.tau = 0.3;
    EXPECT_EQ(reshape({l, p, m, cp}), (std::vector<double>{1.0, 0.0}));
}

TEST(Reshape, CompressionSquaresProbabilities) {
    const std::vector<double> p{0.8, 0.2};
    const std::vector<double> l{std::log(0.8), std::log(0.2)};
    const std::vector<PieceType> m{PieceType::Pawn, PieceType::Knight};
    ChainParams cp;
    cp.alpha = 2.0;
    const auto out = reshape({l, p, m, cp});
    EXPECT_NEAR(out[0], 0.64 / 0.68, 1e-12);
    EXPECT_NEAR(out[0], 0.9412, 1e-4);
    EXPECT_NEAR(out[1], 0.0588, 1e-4);
}

TEST(Reshape, GateFallbackKeepsTopMove) {
    const std::vector<double> l(4, 0.0);
    const auto p = softmax(l);
    const std::vector<PieceType> m(4, PieceType::Rook);
    ChainParams cp;
    cp.tau = 0.3;
    const auto r = reshape_detailed({l, p, m, cp});
    EXPECT_EQ(r.probs, (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
    EXPECT_EQ(std::count(r.survived.begin(), r.survived.end(), true), 1);
}

TEST(Reshape, GateIsMonotoneInTau) {
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const Case c = random_case(rng, 2 + rng.below(30));
        ChainParams a = random_params(rng), b = a;
        b.tau = rng.uniform(a.tau, 0.3);
        const auto ra = reshape_detailed({c.logits, c.probs, c.movers, a});
        const auto rb = reshape_detailed({c.logits, c.probs, c.movers, b});
        EXPECT_LE(std::count(rb.survived.begin(), rb.survived.end(), true),
                  std::count(ra.survived.begin(), ra.survived.end(), true));
    }
}

TEST(Reshape, SaturationRespectsCeiling) {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const Case c = random_case(rng, 1 + rng.below(40));
        ChainParams p = random_params(rng);
        p.explore_eps = 0.0;
        const auto r = reshape_detailed({c.logits, c.probs, c.movers, p});
        const auto support = std::count_if(r.probs.begin(), r.probs.end(), [](double x) { return x > 0.0; });
        if (p.sat_ceiling * static_cast<double>(support) < 1.0) continue;
        for (double x : r.probs) ASSERT_LE(x, p.sat_ceiling + 1e-9);
    }
}

TEST(Reshape, RaisingPieceWeightMovesMassToThatType) {
    Rng rng(4);
    int checked = 0;
    for (int i = 0; i < 5000; ++i) {
        const Case c = random_case(rng, 2 + rng.below(30));
        ChainParams p = random_params(rng);
        p.explore_eps = 0.0;
        p.sat_ceiling = 1.0;
        const auto t = static_cast<PieceType>(rng.below(6));
        const auto before = reshape_detailed({c.logits, c.probs, c.movers, p});
        bool has_t = false, has_other = false;
        for (std::size_t k = 0; k < c.movers.size(); ++k) {
            if (!before.survived[k]) continue;
            (c.movers[k] == t ? has_t : has_other) = true;
        }
        if (!has_t || !has_other) continue;
        ChainParams q = p;
        q.piece_weights[index_of(t)] = std::min(3.0, p.piece_weights[index_of(t)] * 1.5);
        if (q.piece_weights[index_of(t)] == p.piece_weights[index_of(t)]) continue;
        const auto after = reshape({c.logits, c.probs, c.movers, q});
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t k = 0; k < c.movers.size(); ++k)
            if (c.movers[k] == t) {
                m0 += before.probs[k];
                m1 += after[k];
            }
        if (m0 < 1e-300 || 1.0 - m0 < 1e-12) continue;  // mass indistinguishable from 0 or 1 in doubles
        EXPECT_GT(m1, m0);
        ++checked;
    }
    EXPECT_GT(checked, 1000);
}

TEST(Reshape, TemperatureSharpensAndFlattens) {
    Rng rng(5);
    for (int i = 0; i < 5000; ++i) {
        const Case c = random_case(rng, 2 + rng.below(30));
        ChainParams cold, hot;
        cold.delta_t = -1.0;
        hot.delta_t = 1.0;
        const auto base = run(c, neutral_params());
        const auto sharp = run(c, cold);
        EXPECT_GE(*std::max_element(sharp.begin(), sharp.end()) + 1e-12, *std::max_element(base.begin(), base.end()));
        EXPECT_GE(entropy(run(c, hot)) + 1e-12, entropy(base));
    }
}

TEST(Reshape, NeutralParamsAreIdentity) {
    EXPECT_EQ(neutral_params().temperature(), 1.0);
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) {
        const Case c = random_case(rng, 1 + rng.below(40));
        const auto out = run(c, neutral_params());
        for (std::size_t k = 0; k < out.size(); ++k) ASSERT_NEAR(out[k], c.probs[k], 1e-12);
        ASSERT_EQ(argmax_index(out), argmax_index(c.probs));
    }
}

TEST(Reshape, RejectsMisalignedInput) {
    const std::vector<double> l{0.0, 1.0};
    const auto p = softmax(l);
    const std::vector<PieceType> m{PieceType::Pawn};
    EXPECT_THROW(reshape({l, p, m, neutral_params()}), std::invalid_argument);
    EXPECT_THROW(reshape({{}, {}, {}, neutral_params()}), std::invalid_argument);
}

TEST(Bands, RankQuintilesWithRemainderFirst) {
    for (std::size_t r = 0; r < 10; ++r) EXPECT_EQ(band_of(r, 10), static_cast<int>(r / 2) + 1);
    EXPECT_EQ(band_of(0, 1), 1);
    std::vector<int> sizes(5, 0);
    for (std::size_t r = 0; r < 7; ++r) ++sizes[static_cast<std::size_t>(band_of(r, 7) - 1)];
    EXPECT_EQ(sizes, (std::vector<int>{2, 2, 1, 1, 1}));
    EXPECT_THROW(band_of(3, 3), std::out_of_range);
}

TEST(Trace, WritesOneTabSeparatedLine) {
    ChainTrace t;
    t.ply = 4;
    t.pre = {0.5, 0.5};
    t.post = {0.6, 0.4};
    std::ostringstream os;
    t.write_tsv(os);
    const std::string line = os.str();
    EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 1 + 16 + 1 + 4 + 2 - 1);
}
