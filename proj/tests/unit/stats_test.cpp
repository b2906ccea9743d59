#include <algorithm>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "brainlab/stats.hpp"
#include "oracles.hpp"

using namespace brainlab;
using namespace brainlab::stats;


TEST(Basics, UnbiasedVariance) {
    const std::vector<double> x{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(variance(x), 5.0 / 3.0);
    EXPECT_THROW(variance(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Trajectory, ConvergenceGeneration) {
    EXPECT_EQ(convergence_generation(std::vector<double>(20, 0.4)), 0u);
    std::vector<double> rising;
    for (int g = 0; g < 30; ++g) rising.push_back(0.05 * g);
    EXPECT_FALSE(convergence_generation(rising).has_value());
    std::vector<double> flat;
    for (int g = 0; g < 50; ++g) flat.push_back(g < 17 ? 0.1 * g : 1.7);
    EXPECT_EQ(convergence_generation(flat), 17u);
    EXPECT_THROW(convergence_generation(std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST(Trajectory, LateSlope) {
    EXPECT_DOUBLE_EQ(late_slope(std::vector<double>(15, 0.3)), 0.0);
    std::vector<double> line;
    for (int g = 0; g < 25; ++g) line.push_back(0.01 * g);
    EXPECT_NEAR(late_slope(line), 0.01, 1e-14);
    std::vector<double> on, off;
    for (int g = 0; g < 20; ++g) {
        on.push_back(0.5 + 7.6e-4 * g);
        off.push_back(0.5 + 1e-4 * g);
    }
    EXPECT_NEAR(late_slope(on) / late_slope(off), 7.6, 1e-9);
}

TEST(Crossover, IdenticalConditionsNeverCross) {
    const auto s = oracle::seeds_with_variance({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const auto v = variance_crossover(s, s);
    for (const auto& r : v.ratio) EXPECT_DOUBLE_EQ(*r, 1.0);
    EXPECT_FALSE(v.crossover.has_value());
}

TEST(Crossover, FiresAtConstructedGenerationWithPerfectTrend) {
    std::vector<double> on, off;
    for (int g = 0; g < 30; ++g) {
        on.push_back(static_cast<double>(g));
        off.push_back(12.0);
    }
    const auto v = variance_crossover(oracle::seeds_with_variance(on), oracle::seeds_with_variance(off));
    EXPECT_EQ(v.crossover, 13u);
    EXPECT_EQ(v.spearman.statistic, 1.0);
    EXPECT_LT(v.spearman.p_value, 1e-6);
}

TEST(Crossover, RequiresPersistence) {
    std::vector<double> on{1, 1, 3, 1, 1, 3, 3, 3, 3, 3, 1}, off(11, 2.0);
    const auto v = variance_crossover(oracle::seeds_with_variance(on), oracle::seeds_with_variance(off));
    EXPECT_EQ(v.crossover, 5u);
}

TEST(Crossover, HandBuiltThreeSeedFixture) {
    std::vector<SeedSeries> on(3), off(3);
    const double a[3][5] = {{0.1, 0.2, 0.3, 0.4, 0.5}, {0.2, 0.2, 0.5, 0.4, 0.9}, {0.3, 0.2, 0.4, 0.7, 0.1}};
    const double b[3][5] = {{0.5, 0.5, 0.5, 0.5, 0.5}, {0.6, 0.5, 0.4, 0.5, 0.7}, {0.4, 0.5, 0.6, 0.8, 0.3}};
    for (int s = 0; s < 3; ++s) {
        on[s].agreement.assign(a[s], a[s] + 5);
        off[s].agreement.assign(b[s], b[s] + 5);
    }
    const auto v = variance_crossover(on, off);
    for (int g = 0; g < 5; ++g) {
        auto var3 = [](double x, double y, double z) {
            const double m = (x + y + z) / 3.0;
            return ((x - m) * (x - m) + (y - m) * (y - m) + (z - m) * (z - m)) / 2.0;
        };
        const double von = var3(a[0][g], a[1][g], a[2][g]), voff = var3(b[0][g], b[1][g], b[2][g]);
        EXPECT_NEAR(v.var_on[g], von, 1e-15);
        EXPECT_NEAR(v.var_off[g], voff, 1e-15);
        if (g == 1) {
            EXPECT_FALSE(v.ratio[1].has_value());
        } else {
            EXPECT_NEAR(*v.ratio[g], von / voff, 1e-12);
        }
    }
    EXPECT_EQ(v.undefined, std::vector<std::size_t>{1});
    EXPECT_EQ(v.spearman.sample_sizes, std::vector<std::size_t>{4});
}

TEST(Crossover, VarianceCsvLayout) {
    const auto v = variance_crossover(oracle::seeds_with_variance({1, 2}), oracle::seeds_with_variance({0, 1}));
    std::ostringstream os;
    write_variance_csv(os, v);
    EXPECT_EQ(os.str(), "generation,var_on,var_off,ratio\n0,1,0,\n1,2,1,2\n");
}

TEST(Permutation, HandStatisticAndDirection) {
    Rng rng(1);
    const std::vector<double> a{0, 2}, b{1, 1, 1, 3};
    EXPECT_DOUBLE_EQ(permutation_variance_test(a, b, 100, rng).statistic, 2.0);

    const std::vector<double> same{0.1, 0.4, 0.3, 0.9, 0.5, 0.2};
    EXPECT_GE(permutation_variance_test(same, same, 20000, rng).p_value, 0.3);

    Rng gen(2);
    std::vector<double> wide, narrow;
    for (int i = 0; i < 10; ++i) {
        wide.push_back(gen.normal(0.0, 10.0));
        narrow.push_back(gen.normal(0.0, 1.0));
    }
    const auto r = permutation_variance_test(wide, narrow, 20000, rng);
    EXPECT_LT(r.p_value, 0.05);
    EXPECT_GT(r.p_value, 0.0);
}

TEST(Permutation, MatchesExhaustiveSplitsOnSmallSample) {
    // Every labelling of 3 + 3 values is one of 20 splits, each equally likely.
    const std::vector<double> a{0.0, 4.0, 9.0}, b{3.0, 4.0, 5.0};
    const double observed = variance(a) / variance(b);
    std::vector<double> all{0, 4, 9, 3, 4, 5};
    int hits = 0, total = 0;
    for (int mask = 0; mask < 64; ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != 3) continue;
        std::vector<double> x, y;
        for (int i = 0; i < 6; ++i) ((mask >> i) & 1 ? x : y).push_back(all[static_cast<std::size_t>(i)]);
        ++total;
        if (variance(x) / variance(y) >= observed) ++hits;
    }
    Rng rng(3);
    const auto r = permutation_variance_test(a, b, 200000, rng);
    EXPECT_NEAR(r.p_value, static_cast<double>(hits) / total, 0.005);
}

TEST(Bootstrap, DeterministicAndBracketsOne) {
    const std::vector<double> a{1.0, 1.001, 0.999, 1.0005, 0.9995}, b = a;
    Rng r1(4), r2(4);
    const auto x = bootstrap_ratio_ci(a, b, 5000, 0.95, r1), y = bootstrap_ratio_ci(a, b, 5000, 0.95, r2);
    ASSERT_TRUE(x.ci.has_value());
    EXPECT_EQ(x.ci, y.ci);
    EXPECT_LE(x.ci->first, 1.0);
    EXPECT_GE(x.ci->second, 1.0);
}

TEST(Bootstrap, DegenerateInputsAreReported) {
    const std::vector<double> c{2.0, 2.0, 2.0};
    Rng rng(5);
    const auto r = bootstrap_ratio_ci(c, c, 100, 0.95, rng);
    EXPECT_TRUE(r.degenerate);
    EXPECT_FALSE(r.ci.has_value());
}

TEST(Bootstrap, IntervalIsOrderedAndUsuallyCoversThePoint) {
    Rng gen(6), rng(7);
    int covered = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a, b;
        for (int i = 0; i < 10; ++i) {
            a.push_back(gen.normal(0.0, 1.5));
            b.push_back(gen.normal(0.0, 1.0));
        }
        const auto r = bootstrap_ratio_ci(a, b, 2000, 0.95, rng);
        ASSERT_TRUE(r.ci.has_value());
        EXPECT_LE(r.ci->first, r.ci->second);
        covered += r.ci->first <= r.statistic && r.statistic <= r.ci->second;
    }
    // A percentile interval need not contain the point estimate; for
    // skewed ratio distributions it occasionally misses.
    EXPECT_GE(covered, 190);
}

TEST(Fisher, KnownTables) {
    EXPECT_DOUBLE_EQ(fisher_exact(5, 5, 5, 5).p_value, 1.0);
    EXPECT_NEAR(fisher_exact(10, 0, 0, 10).p_value, 2.0 / 184756.0, 1e-15);
    EXPECT_NEAR(fisher_exact(10, 0, 0, 10).p_value, 1.0825e-5, 1e-9);
    EXPECT_NEAR(fisher_exact(8, 2, 1, 9).p_value, 0.0054775, 1e-6);
    EXPECT_DOUBLE_EQ(fisher_exact(8, 2, 1, 9).statistic, 36.0);
    EXPECT_DOUBLE_EQ(fisher_exact(0, 0, 3, 4).p_value, 1.0);
    EXPECT_THROW(fisher_exact(-1, 0, 0, 0), std::invalid_argument);
}

TEST(Fisher, MatchesEnumerationForSmallTables) {
    std::size_t tables = 0;
    for (std::int64_t n = 0; n <= 30; ++n)
        for (std::int64_t a = 0; a <= n; ++a)
            for (std::int64_t b = 0; a + b <= n; ++b)
                for (std::int64_t c = 0; a + b + c <= n; ++c) {
                    const std::int64_t d = n - a - b - c;
                    const double p = fisher_exact(a, b, c, d).p_value;
                    ASSERT_NEAR(p, oracle::fisher(a, b, c, d), 1e-9)
                        << a << ' ' << b << ' ' << c << ' ' << d;
                    ++tables;
                }
    EXPECT_EQ(tables, 46376u);
}

TEST(Welch, Fixture) {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    const auto r = welch_t(a, b);
    EXPECT_NEAR(r.statistic, -3.674, 1e-3);
    EXPECT_NEAR(*r.df, 4.0, 1e-12);
    EXPECT_NEAR(r.p_value, 0.0213, 1e-3);
    EXPECT_NEAR(r.p_value, 0.0213116411, 1e-9);
    EXPECT_DOUBLE_EQ(welch_t(b, a).statistic, -r.statistic);
}

TEST(Welch, IdenticalSamples) {
    const std::vector<double> a{0.3, 0.5, 0.4};
    const auto r = welch_t(a, a);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
    const std::vector<double> c{1, 1, 1};
    EXPECT_TRUE(welch_t(c, c).degenerate);
    EXPECT_EQ(welch_t(c, c).p_value, 1.0);
}

TEST(Icc, Conventions) {
    EXPECT_DOUBLE_EQ(icc1({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}}), 1.0);
    EXPECT_EQ(icc1({{4, 4}, {4, 4}}), 0.0);
    EXPECT_NEAR(icc1({{1, 2, 3}, {2, 4, 3}, {5, 6, 4}}), oracle::icc({{1, 2, 3}, {2, 4, 3}, {5, 6, 4}}), 1e-12);
}

TEST(Icc, MatchesAnovaOracle) {
    Rng rng(8);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.below(8), k = 2 + rng.below(20);
        std::vector<std::vector<double>> m(n);
        for (auto& row : m) {
            const double offset = rng.normal(0.0, 1.0);
            for (std::size_t j = 0; j < k; ++j) row.push_back(offset + rng.normal(0.0, 0.7));
        }
        ASSERT_NEAR(icc1(m), oracle::icc(m), 1e-12);
    }
}

TEST(Spearman, Basics) {
    const std::vector<double> x{0.3, 0.1, 0.9, 0.5, 0.7};
    EXPECT_DOUBLE_EQ(spearman(x, x).statistic, 1.0);
    EXPECT_TRUE(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}).degenerate);
    EXPECT_TRUE(spearman(x, std::vector<double>(5, 1.0)).degenerate);
    EXPECT_EQ(average_ranks(std::vector<double>{5, 1, 5, 3}), (std::vector<double>{3.5, 1, 3.5, 2}));
    const auto big = spearman(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
                              std::vector<double>{2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11});
    EXPECT_TRUE(big.df.has_value());
}

TEST(Spearman, ExactPMatchesEnumeration) {
    Rng rng(9);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 3 + rng.below(5);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(static_cast<double>(rng.below(5)));  // ties on purpose
            y.push_back(static_cast<double>(rng.below(5)));
        }
        const auto r = spearman(x, y);
        if (r.degenerate) continue;
        ASSERT_NEAR(r.p_value, oracle::spearman_p(x, y), 1e-12);
    }
}

TEST(Levene, EqualVarianceSamplesAreNotRejected) {
    Rng rng(10);
    std::vector<double> a, b;
    for (int i = 0; i < 50; ++i) {
        a.push_back(rng.normal(0.0, 1.0));
        b.push_back(rng.normal(3.0, 1.0));
    }
    EXPECT_GT(levene(a, b).p_value, 0.05);
}

TEST(Levene, ReferenceValue) {
    const std::vector<double> a{1, 2, 3, 4, 10}, b{2, 2, 3, 3, 4};
    const auto r = levene(a, b);
    EXPECT_NEAR(r.statistic, 2.8221574344, 1e-9);
    EXPECT_NEAR(r.p_value, 0.1314829733, 1e-9);
}

TEST(Cohen, Values) {
    const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
    EXPECT_DOUBLE_EQ(cohen_d(a, a).statistic, 0.0);
    EXPECT_DOUBLE_EQ(cohen_d(a, b).statistic, -1.0);
}

TEST(PValues, AlwaysInUnitInterval) {
    Rng rng(11);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t na = 2 + rng.below(10), nb = 2 + rng.below(10);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < na; ++i) a.push_back(std::round(rng.normal(0.0, 1.0) * 4.0) / 4.0);
        for (std::size_t i = 0; i < nb; ++i) b.push_back(std::round(rng.normal(0.5, 2.0) * 4.0) / 4.0);
        for (double p : {welch_t(a, b).p_value, levene(a, b).p_value,
                         fisher_exact(static_cast<std::int64_t>(rng.below(20)), static_cast<std::int64_t>(rng.below(20)),
                                      static_cast<std::int64_t>(rng.below(20)), static_cast<std::int64_t>(rng.below(20)))
                             .p_value,
                         permutation_variance_test(a, b, 20, rng).p_value}) {
            ASSERT_GE(p, 0.0);
            ASSERT_LE(p, 1.0);
        }
        const std::size_t n = std::min(na, nb);
        const auto s = spearman(std::span<const double>(a).first(n), std::span<const double>(b).first(n));
        if (!s.degenerate) {
            ASSERT_GE(s.p_value, 0.0);
            ASSERT_LE(s.p_value, 1.0);
        }
    }
}

TEST(Logs, ReadsEliteSeries) {
    std::istringstream in(
        "# started: 2026-01-01T00:00:00Z\n"
        "gen,genome_idx,A,C,W,F,is_elite\n"
        "0,0,0.5,0.5,0.5,0.5,0\n0,1,0.7,0.5,0.5,0.62,1\n"
        "1,0,0.7,0.5,0.5,0.62,1\n1,1,0.2,0.5,0.5,0.32,0\n");
    const auto s = series_from_rows(read_log(in), 3);
    EXPECT_EQ(s.seed, 3u);
    EXPECT_EQ(s.agreement, (std::vector<double>{0.7, 0.7}));
    EXPECT_EQ(s.best_fitness, (std::vector<double>{0.62, 0.62}));
    std::istringstream bad("gen,A\n");
    EXPECT_THROW(read_log(bad), std::runtime_error);
}
