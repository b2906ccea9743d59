#pragma once

// Within-game plasticity. After every brain move each connection c of every
// module moves by
//
//   dw = eta * m * a_pre * (r - b)
//
// (eta = 0.01, m the module's rate multiplier, a_pre the source node's latest
// activation, r the module's reward, b its running baseline), is pulled back
// toward its genetic value by anchor decay, and is clamped to +-0.3 around
// that value. Plastic weights live only in PlasticState and never reach the
// genome.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "brainlab/brain.hpp"
#include "brainlab/neat.hpp"

namespace brainlab {

inline constexpr double kHebbianRate = 0.01;
inline constexpr double kAnchorDecay = 0.01;
inline constexpr double kDriftBound = 0.3;
inline constexpr double kBaselineDecay = 0.9;
inline constexpr std::size_t kRateModulated = 6;  // Perception .. Personality

struct PlasticState {
    ModuleWeights base;
    ModuleWeights current;
    std::array<double, kSlotCount> baseline{};
    std::array<double, kSlotCount> rate_multiplier{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    std::vector<double> learning_activity;  // latest Learning pass, kept across resets

    static PlasticState for_brain(const Brain& brain) {
        PlasticState s;
        s.base = brain.base_weights();
        s.current = s.base;
        return s;
    }

    /// Largest |current - base| over every connection.
    double max_drift() const {
        double d = 0.0;
        for (std::size_t s = 0; s < kSlotCount; ++s)
            for (std::size_t c = 0; c < base[s].size(); ++c) d = std::max(d, std::abs(current[s][c] - base[s][c]));
        return d;
    }
};

/// Game-start reset: weights back to the genome, baselines to zero. Rate
/// multipliers set by the Learning module carry into the next game.
inline PlasticState reset(PlasticState state) {
    state.current = state.base;
    state.baseline.fill(0.0);
    return state;
}

/// One module's update. `node_values` are the module's node activations from
/// the most recent forward pass (empty means no pass yet: a_pre = 0).
inline void hebbian_update(PlasticState& state, Slot slot, const CompiledModule& module,
                           std::span<const double> node_values, double reward, double rate_multiplier) {
    const std::size_t s = slot_index(slot);
    auto& w = state.current[s];
    const auto& base = state.base[s];
    const double surprise = reward - state.baseline[s];
    for (std::size_t c = 0; c < w.size(); ++c) {
        const double a_pre = node_values.empty() ? 0.0 : node_values[module.source_of(c)];
        w[c] += kHebbianRate * rate_multiplier * a_pre * surprise;
        w[c] += kAnchorDecay * (base[c] - w[c]);
        w[c] = std::clamp(w[c], base[c] - kDriftBound, base[c] + kDriftBound);
    }
    state.baseline[s] = kBaselineDecay * state.baseline[s] + (1.0 - kBaselineDecay) * reward;
}

/// Everything module_reward needs about one brain move.
struct MoveRecord {
    bool agree = false;
    double confidence = 0.0;  // cartridge top-1 probability
    double affect_z = 0.0;
    double material_z = 0.0;
    std::size_t samples = 0;  // moves so far in this game, including this one
    bool past_midpoint = false;
    double first_half_agreement = 0.0;
    double second_half_agreement = 0.0;
};

inline double calibration_score(bool agree, double confidence) {
    const double a = agree ? 1.0 : 0.0;
    return confidence * a + (1.0 - confidence) * (1.0 - a);
}

inline double module_reward(Slot slot, const MoveRecord& r) {
    const double agree = r.agree ? 1.0 : 0.0;
    switch (slot) {
        case Slot::Perception:
        case Slot::Personality:
        case Slot::Integration:
        case Slot::Learning: return agree;
        case Slot::Dynamics: return calibration_score(r.agree, r.confidence);
        case Slot::Affect: return r.samples < 3 ? 0.0 : r.affect_z * r.material_z;
        case Slot::Attention: return r.confidence > 0.5 ? agree : 0.5;
        case Slot::Memory: return r.past_midpoint ? r.second_half_agreement - r.first_half_agreement : 0.0;
    }
    return 0.0;
}

/// Running per-game statistics behind the Affect and Memory rewards.
class RewardTracker {
public:
    explicit RewardTracker(int midpoint_ply) : midpoint_(midpoint_ply) {}

    MoveRecord record(bool agree, double confidence, double affect_mean, double material_delta, int ply) {
        affect_.add(affect_mean);
        material_.add(material_delta);
        MoveRecord r;
        r.agree = agree;
        r.confidence = confidence;
        r.samples = affect_.n;
        r.affect_z = affect_.z(affect_mean);
        r.material_z = material_.z(material_delta);
        if (ply < midpoint_) {
            first_.add(agree ? 1.0 : 0.0);
        } else {
            second_.add(agree ? 1.0 : 0.0);
            r.past_midpoint = true;
        }
        r.first_half_agreement = first_.mean;
        r.second_half_agreement = second_.mean;
        return r;
    }

private:
    struct Running {
        std::size_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
        void add(double x) {
            ++n;
            const double d = x - mean;
            mean += d / static_cast<double>(n);
            m2 += d * (x - mean);
        }
        double z(double x) const {
            if (n < 2) return 0.0;
            const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
            return sd > 0.0 ? (x - mean) / sd : 0.0;
        }
    };

    int midpoint_;
    Running affect_, material_, first_, second_;
};

/// Applies one plasticity step to all eight modules.
inline void hebbian_step(PlasticState& state, const Brain& brain, const ModuleActivity& activity,
                         const MoveRecord& record) {
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        const Slot slot = static_cast<Slot>(s);
        const std::span<const double> values =
            slot == Slot::Learning ? std::span<const double>(state.learning_activity) : std::span<const double>(activity[s]);
        hebbian_update(state, slot, brain.module(slot), values, module_reward(slot, record), state.rate_multiplier[s]);
    }
}

struct GameSummary {
    double result = 0.5;            // 1 win, 0.5 draw, 0 loss for the brain
    double final_material = 0.5;    // brain's material balance in [0, 1]
    double mean_agreement = 0.0;
    double mean_confidence = 0.0;
};

/// Post-game Learning pass: six multipliers in (0, 2) for Perception ..
/// Personality, applied during the next game. Integration and Learning stay
/// at 1.
inline std::array<double, kRateModulated> learning_module_pass(const Brain& brain, PlasticState& state,
                                                               const GameSummary& game) {
    const std::array<double, 4> in{game.result, game.final_material, game.mean_agreement, game.mean_confidence};
    ModuleActivity activity;
    const auto out = brain.learning_outputs(in, state.current, activity);
    state.learning_activity = activity[slot_index(Slot::Learning)];
    std::array<double, kRateModulated> m{};
    for (std::size_t i = 0; i < kRateModulated; ++i) m[i] = 2.0 * out[i];
    std::copy(m.begin(), m.end(), state.rate_multiplier.begin());
    return m;
}

inline std::array<double, kRateModulated> learning_module_pass(const BrainGenome& genome, const GameSummary& game) {
    const Brain brain(genome);
    PlasticState state = PlasticState::for_brain(brain);
    return learning_module_pass(brain, state, game);
}

}  // namespace brainlab
