#pragma once

// The brain: a three-phase cascade of NEAT modules reading a shared signal
// pool and producing signal-chain parameters, plus imagination (a 1-ply
// lookahead scored by the Perception module).
//
// Pool layout (35): [sensors 0..19 | context 20..27 | wdl 28..30 | dist shape 31..34]
//
// Phase 1 inputs
//   Perception  sensors (20)
//   Memory      context (8); output smoothed across moves within a game
//   Affect      wdl (3), dist shape (4), context material balance (1)
//   Attention   sensors 0..9 (10), cartridge piece attention (6)
//   Dynamics    wdl (3), entropy, top-1, top-1 gap (3)
// Phase 2
//   Personality [Phase-1 outputs (23) x gains 0..4, dist shape (4)]
// Phase 3
//   Integration [Phase-1 outputs (23) x gains 5..9, Personality (8) x gain 10]
//   -> 16 outputs mapped onto ChainParams in the order
//      alpha, tau, g1..g5, delta_t, sat_ceiling, explore_eps, w_pawn..w_king

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "brainlab/board.hpp"
#include "brainlab/cartridge.hpp"
#include "brainlab/features.hpp"
#include "brainlab/neat.hpp"
#include "brainlab/signal_chain.hpp"

namespace brainlab {

inline constexpr std::size_t kPoolSize = kSensorCount + kContextCount + 3 + kDistShapeCount;
inline constexpr std::size_t kPoolContext = kSensorCount;
inline constexpr std::size_t kPoolWdl = kPoolContext + kContextCount;
inline constexpr std::size_t kPoolDist = kPoolWdl + 3;
inline constexpr std::size_t kPhase1Outputs = 8 + 4 + 5 + 4 + 2;
inline constexpr double kMemorySmoothing = 0.3;
inline constexpr std::size_t kImaginationCandidates = 3;

using SignalPool = std::array<double, kPoolSize>;

inline SignalPool assemble_pool(std::span<const double> sensors, std::span<const double> ctx,
                                std::span<const double> wdl, std::span<const double> dist) {
    if (sensors.size() != kSensorCount || ctx.size() != kContextCount || wdl.size() != 3 ||
        dist.size() != kDistShapeCount)
        throw DimensionError("signal pool components have the wrong length");
    SignalPool pool{};
    std::copy(sensors.begin(), sensors.end(), pool.begin());
    std::copy(ctx.begin(), ctx.end(), pool.begin() + kPoolContext);
    std::copy(wdl.begin(), wdl.end(), pool.begin() + kPoolWdl);
    std::copy(dist.begin(), dist.end(), pool.begin() + kPoolDist);
    return pool;
}

inline SignalPool assemble_pool(const SensorVector& sensors, const GameContext& ctx, const CartridgeOutput& out) {
    const DistShape dist = extract_dist_shape(out.probs);
    return assemble_pool(sensors, ctx, out.wdl, dist);
}

struct PhaseOutputs {
    std::vector<double> perception;   // 8
    std::vector<double> memory;       // 4 (smoothed)
    std::vector<double> affect;       // 5
    std::vector<double> attention;    // 4
    std::vector<double> dynamics;     // 2
    std::vector<double> personality;  // 8
    std::vector<double> integration;  // 16
};

struct MemoryState {
    std::array<double, 4> values{0.5, 0.5, 0.5, 0.5};
    friend bool operator==(const MemoryState&, const MemoryState&) = default;
};

/// Per-slot connection weights, in genome connection order.
using ModuleWeights = std::array<std::vector<double>, kSlotCount>;

/// Node activations of the latest forward pass, per slot (presynaptic
/// activity for plasticity).
using ModuleActivity = std::array<std::vector<double>, kSlotCount>;

struct BrainStep {
    PhaseOutputs phases;
    ChainParams params;
    MemoryState memory;
    ModuleActivity activity;
};

inline double affine(double unit, ParamRange r) { return r.lo + (r.hi - r.lo) * unit; }

/// Maps Integration's 16 outputs in (0, 1) onto the parameter ranges.
inline ChainParams map_params(std::span<const double> out) {
    if (out.size() != 16) throw DimensionError("integration must produce 16 outputs");
    ChainParams p;
    p.alpha = affine(out[0], ranges::kAlpha);
    p.tau = affine(out[1], ranges::kTau);
    for (std::size_t b = 0; b < kBandCount; ++b) p.eq_gains[b] = affine(out[2 + b], ranges::kGain);
    p.delta_t = affine(out[7], ranges::kDeltaT);
    p.sat_ceiling = affine(out[8], ranges::kSatCeiling);
    p.explore_eps = affine(out[9], ranges::kExploreEps);
    for (std::size_t t = 0; t < kPieceTypeCount; ++t) p.piece_weights[t] = affine(out[10 + t], ranges::kPieceWeight);
    return p;
}

class Brain {
public:
    explicit Brain(BrainGenome genome) : genome_(std::move(genome)) {
        validate(genome_);
        for (std::size_t s = 0; s < kSlotCount; ++s) {
            compiled_[s] = CompiledModule(genome_.modules[s]);
            base_[s] = weights_of(genome_.modules[s]);
        }
    }

    const BrainGenome& genome() const noexcept { return genome_; }
    const CompiledModule& module(Slot s) const noexcept { return compiled_[slot_index(s)]; }
    const ModuleWeights& base_weights() const noexcept { return base_; }

    BrainStep run(const SignalPool& pool, std::span<const double> piece_attention, const MemoryState& memory) const {
        return run(pool, piece_attention, memory, base_);
    }

    BrainStep run(const SignalPool& pool, std::span<const double> piece_attention, const MemoryState& memory,
                  const ModuleWeights& weights) const {
        if (piece_attention.size() != kPieceTypeCount) throw DimensionError("piece attention must have 6 values");
        BrainStep step;
        const std::span<const double> p(pool);
        const auto sensors = p.subspan(0, kSensorCount);
        const auto ctx = p.subspan(kPoolContext, kContextCount);
        const auto wdl = p.subspan(kPoolWdl, 3);
        const auto dist = p.subspan(kPoolDist, kDistShapeCount);

        auto& ph = step.phases;
        ph.perception = pass(Slot::Perception, sensors, weights, step.activity);

        const auto raw_memory = pass(Slot::Memory, ctx, weights, step.activity);
        ph.memory.resize(raw_memory.size());
        for (std::size_t i = 0; i < raw_memory.size(); ++i) {
            step.memory.values[i] = (1.0 - kMemorySmoothing) * memory.values[i] + kMemorySmoothing * raw_memory[i];
            ph.memory[i] = step.memory.values[i];
        }

        std::vector<double> affect_in(wdl.begin(), wdl.end());
        affect_in.insert(affect_in.end(), dist.begin(), dist.end());
        affect_in.push_back(ctx[context::kMaterial]);
        ph.affect = pass(Slot::Affect, affect_in, weights, step.activity);

        std::vector<double> attention_in(sensors.begin(), sensors.begin() + 10);
        attention_in.insert(attention_in.end(), piece_attention.begin(), piece_attention.end());
        ph.attention = pass(Slot::Attention, attention_in, weights, step.activity);

        std::vector<double> dynamics_in(wdl.begin(), wdl.end());
        dynamics_in.insert(dynamics_in.end(), dist.begin(), dist.begin() + 3);
        ph.dynamics = pass(Slot::Dynamics, dynamics_in, weights, step.activity);

        const std::array<const std::vector<double>*, 5> phase1{&ph.perception, &ph.memory, &ph.affect, &ph.attention,
                                                               &ph.dynamics};
        std::vector<double> personality_in;
        personality_in.reserve(kPhase1Outputs + kDistShapeCount);
        for (std::size_t b = 0; b < phase1.size(); ++b)
            for (double v : *phase1[b]) personality_in.push_back(genome_.gains[b] * v);
        personality_in.insert(personality_in.end(), dist.begin(), dist.end());
        ph.personality = pass(Slot::Personality, personality_in, weights, step.activity);

        std::vector<double> integration_in;
        integration_in.reserve(kPhase1Outputs + 8);
        for (std::size_t b = 0; b < phase1.size(); ++b)
            for (double v : *phase1[b]) integration_in.push_back(genome_.gains[5 + b] * v);
        for (double v : ph.personality) integration_in.push_back(genome_.gains[10] * v);
        ph.integration = pass(Slot::Integration, integration_in, weights, step.activity);

        step.params = map_params(ph.integration);
        return step;
    }

    /// Sum of the Perception outputs for a sensor vector.
    double feel(const SensorVector& sensors, const ModuleWeights& weights) const {
        std::vector<double> values;
        const auto& m = compiled_[slot_index(Slot::Perception)];
        m.activate(weights[slot_index(Slot::Perception)], sensors, values);
        const auto out = m.outputs_of(values);
        return std::accumulate(out.begin(), out.end(), 0.0);
    }

    double feel(const SensorVector& sensors) const { return feel(sensors, base_); }

    /// Learning module forward pass; records activity into `activity`.
    std::vector<double> learning_outputs(std::span<const double> inputs, const ModuleWeights& weights,
                                         ModuleActivity& activity) const {
        return pass(Slot::Learning, inputs, weights, activity);
    }

private:
    std::vector<double> pass(Slot s, std::span<const double> in, const ModuleWeights& weights,
                             ModuleActivity& activity) const {
        const auto& m = compiled_[slot_index(s)];
        auto& values = activity[slot_index(s)];
        m.activate(weights[slot_index(s)], in, values);
        return m.outputs_of(values);
    }

    BrainGenome genome_;
    std::array<CompiledModule, kSlotCount> compiled_;
    ModuleWeights base_;
};

inline BrainStep run_brain(const BrainGenome& genome, const SignalPool& pool, std::span<const double> piece_attention,
                           const MemoryState& memory) {
    return Brain(genome).run(pool, piece_attention, memory);
}

struct ImaginationResult {
    std::size_t chosen = 0;
    std::vector<std::size_t> candidates;  // indices into the move list, best reshaped first
    std::vector<double> feels;
};

/// Top-k candidates by reshaped probability (canonical order on ties) among
/// the eligible moves; each is played and its successor scored by the sum of
/// Perception outputs. Highest feel wins; ties go to the higher reshaped
/// probability, then canonical order. An empty `eligible` means every move.
inline ImaginationResult imagine(const Brain& brain, const ModuleWeights& weights, const Position& pos,
                                 std::span<const double> reshaped, std::span<const Move> moves,
                                 const std::vector<bool>& eligible = {}, std::size_t k = kImaginationCandidates) {
    if (reshaped.size() != moves.size() || moves.empty()) throw DimensionError("imagination inputs misaligned");
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < moves.size(); ++i)
        if (eligible.empty() || eligible[i]) order.push_back(i);
    if (order.empty()) {
        order.resize(moves.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return reshaped[a] > reshaped[b]; });
    order.resize(std::min(std::max<std::size_t>(k, 1), order.size()));

    ImaginationResult r;
    r.candidates = order;
    if (order.size() == 1) {
        r.chosen = order.front();
        return r;
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < order.size(); ++c) {
        r.feels.push_back(brain.feel(extract_sensors(pos.after(moves[order[c]])), weights));
        // Candidates are already in tie-break order, so only a strictly
        // higher feel displaces the incumbent.
        if (r.feels[c] > r.feels[best]) best = c;
    }
    r.chosen = order[best];
    return r;
}

inline Move imagine(const BrainGenome& genome, const Position& pos, std::span<const double> reshaped,
                    std::span<const Move> moves, std::size_t k = kImaginationCandidates) {
    const Brain brain(genome);
    return moves[imagine(brain, brain.base_weights(), pos, reshaped, moves, {}, k).chosen];
}

}  // namespace brainlab
