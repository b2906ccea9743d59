#pragma once

// Desirability-domain signal chain. Given a cartridge's logits and
// probabilities, the chain computes per-move desirabilities
//
//   gate         d_i = -inf if p_i <= tau
//   compression  d_i = alpha * ln p_i                  (survivors)
//   EQ           d_i += ln(g_band(i)) * s              (five probability-rank bands)
//   pieces       d_i += ln(w_type(i)) * s
//   temperature  p' = softmax(d / T),  T = 1 + 0.5 * delta_t
//   saturation   clamp p' at the ceiling, renormalize the rest, repeat
//   exploration  p'' = (1 - eps) * p' + eps / n
//
// with sensitivity s = 0.4. Compression works on ln p rather than the raw
// logit: ln p_i = l_i - logsumexp(l), so alpha * ln p_i is the power
// transform p_i^alpha up to normalization and stays defined for negative
// logits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "brainlab/board.hpp"

namespace brainlab {

inline constexpr double kChainSensitivity = 0.4;
inline constexpr std::size_t kBandCount = 5;

struct ChainParams {
    double alpha = 1.0;        // [0.3, 2.5]
    double tau = 0.0;          // [0, 0.3]
    std::array<double, kBandCount> eq_gains{1.0, 1.0, 1.0, 1.0, 1.0};  // each [0.1, 3.0]
    double delta_t = 0.0;      // [-1, 1]
    double sat_ceiling = 1.0;  // [0.1, 1.0]
    double explore_eps = 0.0;  // [0, 0.3]
    std::array<double, kPieceTypeCount> piece_weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};  // each [0.1, 3.0]

    double temperature() const noexcept { return 1.0 + 0.5 * delta_t; }
    friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

struct ParamRange {
    double lo;
    double hi;
};

namespace ranges {
inline constexpr ParamRange kAlpha{0.3, 2.5};
inline constexpr ParamRange kTau{0.0, 0.3};
inline constexpr ParamRange kGain{0.1, 3.0};
inline constexpr ParamRange kDeltaT{-1.0, 1.0};
inline constexpr ParamRange kSatCeiling{0.1, 1.0};
inline constexpr ParamRange kExploreEps{0.0, 0.3};
inline constexpr ParamRange kPieceWeight{0.1, 3.0};
}  // namespace ranges

/// Identity element: reshape() with these parameters returns softmax(logits).
inline ChainParams neutral_params() { return ChainParams{}; }

inline bool within_ranges(const ChainParams& p) {
    auto in = [](double v, ParamRange r) { return v >= r.lo && v <= r.hi; };
    bool ok = in(p.alpha, ranges::kAlpha) && in(p.tau, ranges::kTau) && in(p.delta_t, ranges::kDeltaT) &&
              in(p.sat_ceiling, ranges::kSatCeiling) && in(p.explore_eps, ranges::kExploreEps);
    for (double g : p.eq_gains) ok = ok && in(g, ranges::kGain);
    for (double w : p.piece_weights) ok = ok && in(w, ranges::kPieceWeight);
    return ok;
}

/// Band (1..5) of a move at probability rank `rank` among n moves. Bands are
/// contiguous; the first n % 5 bands get one extra move, so with fewer than
/// five moves the lower-index bands fill first.
inline int band_of(std::size_t rank, std::size_t n_moves) {
    if (rank >= n_moves) throw std::out_of_range("rank outside move list");
    const std::size_t base = n_moves / kBandCount, extra = n_moves % kBandCount;
    std::size_t start = 0;
    for (std::size_t b = 0; b < kBandCount; ++b) {
        const std::size_t size = base + (b < extra ? 1 : 0);
        if (rank < start + size) return static_cast<int>(b) + 1;
        start += size;
    }
    return static_cast<int>(kBandCount);
}

struct ReshapeInput {
    std::span<const double> logits;
    std::span<const double> probs;  // softmax(logits)
    std::span<const PieceType> movers;
    ChainParams params;
};

struct ReshapeResult {
    std::vector<double> probs;
    std::vector<bool> survived;  // passed the gate (or was the fallback survivor)
};

/// Iteratively clamps entries above `ceiling` and rescales the unclamped
/// mass; skipped when the positive support cannot absorb the clamp.
inline void saturate(std::vector<double>& p, double ceiling) {
    const auto support = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [](double x) { return x > 0.0; }));
    if (ceiling * static_cast<double>(support) < 1.0) return;
    std::vector<bool> clamped(p.size(), false);
    for (std::size_t iter = 0; iter <= p.size(); ++iter) {
        bool any = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!clamped[i] && p[i] > ceiling) {
                p[i] = ceiling;
                clamped[i] = true;
                any = true;
            }
        }
        if (!any) break;
        double fixed = 0.0, free = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) (clamped[i] ? fixed : free) += p[i];
        if (free <= 0.0) break;
        const double scale = (1.0 - fixed) / free;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!clamped[i]) p[i] *= scale;
    }
}

inline ReshapeResult reshape_detailed(const ReshapeInput& in) {
    const std::size_t n = in.logits.size();
    if (n == 0) throw std::invalid_argument("reshape of an empty move list");
    if (in.probs.size() != n || in.movers.size() != n) throw std::invalid_argument("reshape inputs misaligned");
    const ChainParams& cp = in.params;

    ReshapeResult r;
    r.survived.assign(n, false);
    std::size_t survivors = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (in.probs[i] > cp.tau) {
            r.survived[i] = true;
            ++survivors;
        }
    if (survivors == 0) {
        const auto best = static_cast<std::size_t>(std::max_element(in.probs.begin(), in.probs.end()) - in.probs.begin());
        r.survived[best] = true;
    }

    // Probability ranks, ties in canonical order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return in.probs[a] > in.probs[b]; });
    std::vector<int> band(n);
    for (std::size_t rank = 0; rank < n; ++rank) band[order[rank]] = band_of(rank, n);

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> d(n, kNegInf);
    for (std::size_t i = 0; i < n; ++i) {
        if (!r.survived[i] || !(in.probs[i] > 0.0)) continue;
        d[i] = cp.alpha * std::log(in.probs[i]);
        d[i] += std::log(cp.eq_gains[static_cast<std::size_t>(band[i] - 1)]) * kChainSensitivity;
        d[i] += std::log(cp.piece_weights[index_of(in.movers[i])]) * kChainSensitivity;
    }

    // softmax(d / T) over survivors; gated moves keep zero mass.
    const double temp = cp.temperature();
    double mx = kNegInf;
    for (double x : d) mx = std::max(mx, x / temp);
    r.probs.assign(n, 0.0);
    if (mx == kNegInf) {
        // Every survivor had p = 0 (underflow); fall back to the gate survivors uniformly.
        for (std::size_t i = 0; i < n; ++i) r.probs[i] = r.survived[i] ? 1.0 : 0.0;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            if (d[i] != kNegInf) r.probs[i] = std::exp(d[i] / temp - mx);
    }
    const double sum = std::accumulate(r.probs.begin(), r.probs.end(), 0.0);
    for (double& p : r.probs) p /= sum;

    saturate(r.probs, cp.sat_ceiling);

    const double eps = cp.explore_eps;
    if (eps > 0.0) {
        const double u = 1.0 / static_cast<double>(n);
        for (double& p : r.probs) p = (1.0 - eps) * p + eps * u;
    }
    return r;
}

inline std::vector<double> reshape(const ReshapeInput& in) { return reshape_detailed(in).probs; }

/// Index of the largest entry; ties go to the earliest (canonical) index.
inline std::size_t argmax_index(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Trace emission hook. One record per brain move; write_tsv() emits a
/// tab-separated line: ply, 16 chain parameters, move count, pre
/// distribution, post distribution, chosen index, reshaped-argmax index.
struct ChainTrace {
    int ply = 0;
    ChainParams params;
    std::vector<double> pre;
    std::vector<double> post;
    std::size_t chosen = 0;
    std::size_t reshaped_argmax = 0;
    std::size_t cartridge_argmax = 0;

    void write_tsv(std::ostream& os) const {
        os << ply << '\t' << params.alpha << '\t' << params.tau;
        for (double g : params.eq_gains) os << '\t' << g;
        os << '\t' << params.delta_t << '\t' << params.sat_ceiling << '\t' << params.explore_eps;
        for (double w : params.piece_weights) os << '\t' << w;
        os << '\t' << pre.size();
        for (double p : pre) os << '\t' << p;
        for (double p : post) os << '\t' << p;
        os << '\t' << chosen << '\t' << reshaped_argmax << '\n';
    }
};

using TraceSink = std::function<void(const ChainTrace&)>;

}  // namespace brainlab
