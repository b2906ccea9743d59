#pragma once

// Metrics and hypothesis tests over generation logs. Sample variance uses
// the unbiased (n - 1) estimator throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

#include "brainlab/rng.hpp"

namespace brainlab::stats {

struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    std::string method;
    std::vector<std::size_t> sample_sizes;
    std::optional<double> df;
    std::optional<std::pair<double, double>> ci;
    bool degenerate = false;
};

inline nlohmann::ordered_json to_json(const TestReport& r) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["statistic"] = std::isfinite(r.statistic) ? nlohmann::ordered_json(r.statistic) : nlohmann::ordered_json();
    j["p_value"] = r.p_value;
    j["sample_sizes"] = r.sample_sizes;
    if (r.df) j["df"] = *r.df;
    if (r.ci) j["ci"] = {r.ci->first, r.ci->second};
    if (r.degenerate) j["degenerate"] = true;
    return j;
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("variance needs at least two values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

// ---------------------------------------------------------------------------
// Trajectory metrics

struct SeedSeries {
    std::uint64_t seed = 0;
    std::vector<double> agreement;     // best genome, per generation
    std::vector<double> best_fitness;  // per generation
};

/// First generation g with max - min of series[g, g + window) <= 2 * tol.
inline std::optional<std::size_t> convergence_generation(std::span<const double> series, double tol = 0.01,
                                                         std::size_t window = 10) {
    if (window == 0 || series.size() < window) throw std::invalid_argument("series shorter than the window");
    for (std::size_t g = 0; g + window <= series.size(); ++g) {
        const auto [lo, hi] = std::minmax_element(series.begin() + static_cast<std::ptrdiff_t>(g),
                                                  series.begin() + static_cast<std::ptrdiff_t>(g + window));
        if (*hi - *lo <= 2.0 * tol) return g;
    }
    return std::nullopt;
}

/// Least-squares slope over the last `window` points, per generation.
inline double late_slope(std::span<const double> series, std::size_t window = 10) {
    if (window < 2 || series.size() < window) throw std::invalid_argument("series shorter than the window");
    const auto tail = series.subspan(series.size() - window);
    const double xm = (static_cast<double>(window) - 1.0) / 2.0;
    const double ym = mean(tail);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
        const double dx = static_cast<double>(i) - xm;
        sxy += dx * (tail[i] - ym);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Rank correlation

/// Ranks starting at 1, ties get the average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

inline constexpr std::size_t kSpearmanExactMax = 10;

/// Spearman rho with a two-sided p: exact over all permutations of y's ranks
/// for n <= 10, Student t with n - 2 df beyond.
inline TestReport spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman samples differ in length");
    TestReport r;
    r.sample_sizes = {x.size()};
    const std::size_t n = x.size();
    if (n < 3) {
        r.method = "spearman (degenerate: n < 3)";
        r.degenerate = true;
        r.statistic = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const auto rx = average_ranks(x), ry = average_ranks(y);
    r.statistic = pearson(rx, ry);
    if (std::isnan(r.statistic)) {
        r.method = "spearman (degenerate: constant input)";
        r.degenerate = true;
        return r;
    }
    if (n <= kSpearmanExactMax) {
        r.method = "spearman, exact permutation p";
        std::vector<double> perm = ry;
        std::sort(perm.begin(), perm.end());
        const double observed = std::abs(r.statistic) - 1e-12;
        std::uint64_t hits = 0, total = 0;
        do {
            const double rho = pearson(rx, perm);
            if (!std::isnan(rho) && std::abs(rho) >= observed) ++hits;
            ++total;
        } while (std::next_permutation(perm.begin(), perm.end()));
        // next_permutation skips duplicate arrangements of tied ranks, which
        // are equally likely, so the ratio is still the exact p.
        r.p_value = static_cast<double>(hits) / static_cast<double>(total);
    } else {
        r.method = "spearman, t approximation";
        const double df = static_cast<double>(n) - 2.0;
        r.df = df;
        const double rho = std::clamp(r.statistic, -1.0, 1.0);
        if (std::abs(rho) >= 1.0) {
            r.p_value = 0.0;
        } else {
            const double t = rho * std::sqrt(df / (1.0 - rho * rho));
            boost::math::students_t dist(df);
            r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Variance crossover

struct VarianceCrossover {
    std::vector<double> var_on;
    std::vector<double> var_off;
    std::vector<std::optional<double>> ratio;  // none where var_off = 0
    std::optional<std::size_t> crossover;
    std::vector<std::size_t> undefined;        // generations without a ratio
    TestReport spearman;
};

inline constexpr std::size_t kCrossoverPersistence = 5;

inline std::vector<double> cross_seed_variance(const std::vector<SeedSeries>& seeds) {
    if (seeds.size() < 2) throw std::invalid_argument("need at least two seeds per condition");
    const std::size_t g = seeds.front().agreement.size();
    std::vector<double> out(g);
    for (std::size_t i = 0; i < g; ++i) {
        std::vector<double> col;
        for (const auto& s : seeds) {
            if (s.agreement.size() != g) throw std::invalid_argument("seed series lengths differ");
            col.push_back(s.agreement[i]);
        }
        out[i] = variance(col);
    }
    return out;
}

inline VarianceCrossover variance_crossover(const std::vector<SeedSeries>& on, const std::vector<SeedSeries>& off) {
    VarianceCrossover v;
    v.var_on = cross_seed_variance(on);
    v.var_off = cross_seed_variance(off);
    if (v.var_on.size() != v.var_off.size()) throw std::invalid_argument("conditions have different lengths");
    const std::size_t n = v.var_on.size();
    for (std::size_t g = 0; g < n; ++g) {
        if (v.var_off[g] > 0.0) {
            v.ratio.emplace_back(v.var_on[g] / v.var_off[g]);
        } else {
            v.ratio.emplace_back(std::nullopt);
            v.undefined.push_back(g);
        }
    }
    for (std::size_t g = 0; g + kCrossoverPersistence <= n && !v.crossover; ++g) {
        bool holds = true;
        for (std::size_t k = g; k < g + kCrossoverPersistence; ++k) holds = holds && v.ratio[k] && *v.ratio[k] > 1.0;
        if (holds) v.crossover = g;
    }
    std::vector<double> gens, ratios;
    for (std::size_t g = 0; g < n; ++g)
        if (v.ratio[g]) {
            gens.push_back(static_cast<double>(g));
            ratios.push_back(*v.ratio[g]);
        }
    v.spearman = spearman(gens, ratios);
    return v;
}

// ---------------------------------------------------------------------------
// Resampling tests

/// One-sided test of var(a) > var(b) by label permutation. The observed
/// labelling counts as one permutation.
inline TestReport permutation_variance_test(std::span<const double> a, std::span<const double> b,
                                            std::size_t iters, Rng& rng) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("permutation test needs two values per group");
    TestReport r;
    r.method = "permutation variance ratio, one-sided";
    r.sample_sizes = {a.size(), b.size()};
    const double vb = variance(b);
    r.statistic = vb > 0.0 ? variance(a) / vb : std::numeric_limits<double>::infinity();
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::span<const double> all(pooled);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < iters; ++i) {
        rng.shuffle(pooled);
        const double pb = variance(all.subspan(a.size()));
        if (pb == 0.0) {
            ++hits;
            continue;
        }
        if (variance(all.subspan(0, a.size())) / pb >= r.statistic) ++hits;
    }
    r.p_value = static_cast<double>(hits + 1) / static_cast<double>(iters + 1);
    return r;
}

/// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Percentile bootstrap CI of var(a) / var(b), each group resampled with
/// replacement. Resamples with zero variance in either group are redrawn, up
/// to 10 * iters draws in total.
inline TestReport bootstrap_ratio_ci(std::span<const double> a, std::span<const double> b, std::size_t iters,
                                     double level, Rng& rng) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("bootstrap needs two values per group");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    TestReport r;
    r.method = "percentile bootstrap of the variance ratio";
    r.sample_sizes = {a.size(), b.size()};
    const double vb = variance(b);
    r.statistic = vb > 0.0 ? variance(a) / vb : std::numeric_limits<double>::infinity();
    r.p_value = 1.0;

    std::vector<double> ratios, ra(a.size()), rb(b.size());
    ratios.reserve(iters);
    for (std::size_t draws = 0; ratios.size() < iters && draws < 10 * iters; ++draws) {
        for (double& x : ra) x = a[rng.below(a.size())];
        for (double& x : rb) x = b[rng.below(b.size())];
        const double va = variance(ra), vbs = variance(rb);
        if (va == 0.0 || vbs == 0.0) continue;
        ratios.push_back(va / vbs);
    }
    if (ratios.empty()) {
        r.degenerate = true;
        r.method += " (degenerate: every resample had zero variance)";
        return r;
    }
    std::sort(ratios.begin(), ratios.end());
    const double tail = (1.0 - level) / 2.0;
    r.ci = {quantile_sorted(ratios, tail), quantile_sorted(ratios, 1.0 - tail)};
    return r;
}

// ---------------------------------------------------------------------------
// Classical tests

/// Two-sided Fisher exact test on [[a, b], [c, d]]: sums the hypergeometric
/// probabilities of all tables with the same margins that are no more likely
/// than the observed one (relative tolerance 1e-7).
inline TestReport fisher_exact(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    if (a < 0 || b < 0 || c < 0 || d < 0) throw std::invalid_argument("table counts must be non-negative");
    TestReport r;
    r.method = "fisher exact, two-sided";
    const std::int64_t row1 = a + b, row2 = c + d, col1 = a + c, n = a + b + c + d;
    r.sample_sizes = {static_cast<std::size_t>(row1), static_cast<std::size_t>(row2)};
    // Sample odds ratio; infinite when b * c = 0 (NaN when a * d is also 0).
    r.statistic = static_cast<double>(a * d) / static_cast<double>(b * c);
    if (row1 == 0 || row2 == 0 || col1 == 0 || col1 == n) {
        r.p_value = 1.0;
        return r;
    }
    auto lchoose = [](std::int64_t nn, std::int64_t k) {
        return std::lgamma(static_cast<double>(nn + 1)) - std::lgamma(static_cast<double>(k + 1)) -
               std::lgamma(static_cast<double>(nn - k + 1));
    };
    const double lden = lchoose(n, col1);
    auto prob = [&](std::int64_t x) { return std::exp(lchoose(row1, x) + lchoose(row2, col1 - x) - lden); };
    const double observed = prob(a);
    double p = 0.0;
    for (std::int64_t x = std::max<std::int64_t>(0, col1 - row2); x <= std::min(row1, col1); ++x) {
        const double px = prob(x);
        if (px <= observed * (1.0 + 1e-7)) p += px;
    }
    r.p_value = std::clamp(p, 0.0, 1.0);
    return r;
}

inline TestReport welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch t needs two values per group");
    TestReport r;
    r.method = "welch t, two-sided";
    r.sample_sizes = {a.size(), b.size()};
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = variance(a) / na, vb = variance(b) / nb;
    const double diff = mean(a) - mean(b);
    if (va + vb == 0.0) {
        r.degenerate = true;
        r.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        r.p_value = diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = diff / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.df = df;
    boost::math::students_t dist(df);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic))));
    return r;
}

/// One-way random-effects ICC(1); rows are groups (seeds), columns the k
/// repeated measures. Clamped to [-1, 1]; zero total variance gives 0.
inline double icc1(const std::vector<std::vector<double>>& m) {
    if (m.size() < 2 || m.front().size() < 2) throw std::invalid_argument("icc1 needs at least a 2 x 2 matrix");
    const std::size_t n = m.size(), k = m.front().size();
    double grand = 0.0;
    for (const auto& row : m) {
        if (row.size() != k) throw std::invalid_argument("icc1 rows differ in length");
        grand += std::accumulate(row.begin(), row.end(), 0.0);
    }
    grand /= static_cast<double>(n * k);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& row : m) {
        const double rm = mean(row);
        ssb += static_cast<double>(k) * (rm - grand) * (rm - grand);
        for (double v : row) ssw += (v - rm) * (v - rm);
    }
    if (ssb + ssw == 0.0) return 0.0;
    const double msb = ssb / static_cast<double>(n - 1);
    const double msw = ssw / static_cast<double>(n * (k - 1));
    const double icc = (msb - msw) / (msb + (static_cast<double>(k) - 1.0) * msw);
    return std::clamp(icc, -1.0, 1.0);
}

/// Levene's test (mean-centred) for equal variances of two groups.
inline TestReport levene(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("levene needs two values per group");
    TestReport r;
    r.method = "levene (mean), one-way F";
    r.sample_sizes = {a.size(), b.size()};
    auto deviations = [](std::span<const double> x) {
        const double m = mean(x);
        std::vector<double> z;
        for (double v : x) z.push_back(std::abs(v - m));
        return z;
    };
    const auto za = deviations(a), zb = deviations(b);
    const double na = static_cast<double>(za.size()), nb = static_cast<double>(zb.size()), n = na + nb;
    const double ma = mean(za), mb = mean(zb), mg = (ma * na + mb * nb) / n;
    const double ssb = na * (ma - mg) * (ma - mg) + nb * (mb - mg) * (mb - mg);
    double ssw = 0.0;
    for (double v : za) ssw += (v - ma) * (v - ma);
    for (double v : zb) ssw += (v - mb) * (v - mb);
    const double df1 = 1.0, df2 = n - 2.0;
    r.df = df2;
    if (ssw == 0.0) {
        r.degenerate = true;
        r.statistic = ssb == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.p_value = ssb == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = (ssb / df1) / (ssw / df2);
    boost::math::fisher_f dist(df1, df2);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

/// Cohen's d with the pooled standard deviation.
inline TestReport cohen_d(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("cohen d needs two values per group");
    TestReport r;
    r.method = "cohen d, pooled sd";
    r.sample_sizes = {a.size(), b.size()};
    r.p_value = 1.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double pooled = std::sqrt(((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0));
    const double diff = mean(a) - mean(b);
    if (pooled == 0.0) {
        r.degenerate = true;
        r.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        return r;
    }
    r.statistic = diff / pooled;
    return r;
}

// ---------------------------------------------------------------------------
// Logs

struct LogRow {
    int gen = 0;
    std::size_t genome_idx = 0;
    double A = 0.0, C = 0.0, W = 0.0, F = 0.0;
    bool is_elite = false;
};

inline std::vector<LogRow> read_log(std::istream& in) {
    std::vector<LogRow> rows;
    std::string line;
    bool header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "gen,genome_idx,A,C,W,F,is_elite")
                throw std::runtime_error("unexpected generation log header: " + line);
            header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> fields;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 7) throw std::runtime_error("log line " + std::to_string(lineno) + ": expected 7 fields");
        LogRow r;
        r.gen = std::stoi(fields[0]);
        r.genome_idx = std::stoul(fields[1]);
        r.A = std::stod(fields[2]);
        r.C = std::stod(fields[3]);
        r.W = std::stod(fields[4]);
        r.F = std::stod(fields[5]);
        r.is_elite = fields[6] == "1";
        rows.push_back(r);
    }
    if (!header) throw std::runtime_error("generation log has no header");
    return rows;
}

/// Best-genome agreement and fitness per generation, from the elite rows.
inline SeedSeries series_from_rows(const std::vector<LogRow>& rows, std::uint64_t seed) {
    SeedSeries s;
    s.seed = seed;
    for (const auto& r : rows) {
        if (!r.is_elite) continue;
        if (r.gen != static_cast<int>(s.agreement.size())) throw std::runtime_error("generation log is out of order");
        s.agreement.push_back(r.A);
        s.best_fitness.push_back(r.F);
    }
    return s;
}

inline SeedSeries read_series(const std::filesystem::path& csv, std::uint64_t seed) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open " + csv.string());
    return series_from_rows(read_log(in), seed);
}

/// Plot-ready CSV: generation, var_on, var_off, ratio (empty when undefined).
inline void write_variance_csv(std::ostream& os, const VarianceCrossover& v) {
    os << "generation,var_on,var_off,ratio\n";
    for (std::size_t g = 0; g < v.var_on.size(); ++g) {
        os << g << ',' << v.var_on[g] << ',' << v.var_off[g] << ',';
        if (v.ratio[g]) os << *v.ratio[g];
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const VarianceCrossover& v) {
    nlohmann::ordered_json j;
    j["var_on"] = v.var_on;
    j["var_off"] = v.var_off;
    auto& ratio = j["ratio"] = nlohmann::ordered_json::array();
    for (const auto& r : v.ratio) ratio.push_back(r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json());
    j["crossover_generation"] = v.crossover ? nlohmann::ordered_json(*v.crossover) : nlohmann::ordered_json();
    j["undefined_generations"] = v.undefined;
    j["spearman"] = to_json(v.spearman);
    return j;
}

}  // namespace brainlab::stats
