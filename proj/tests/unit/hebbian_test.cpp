#include <gtest/gtest.h>

#include "brainlab/cartridge.hpp"
#include "brainlab/hebbian.hpp"

using namespace brainlab;

namespace {

// One input wired to one output with weight w.
ModuleGenome single_link(double w) {
    ModuleGenome g;
    g.inputs = 1;
    g.outputs = 1;
    g.nodes = {{0, NodeRole::Input}, {1, NodeRole::Output}};
    g.connections = {{0, 0, 1, w, true}};
    return g;
}

PlasticState single_state(double w) {
    PlasticState s;
    s.base[0] = {w};
    s.current = s.base;
    return s;
}

}  // namespace

TEST(HebbianUpdate, OneStepMatchesHandComputation) {
    const CompiledModule m(single_link(0.0));
    PlasticState s = single_state(0.0);
    const std::vector<double> nodes{1.0, 0.5};
    hebbian_update(s, Slot::Perception, m, nodes, 1.0, 1.0);
    // Hebbian term 0.01 * 1 * 1 * (1 - 0), then 1% pull toward the base.
    EXPECT_NEAR(s.current[0][0], 0.01 * 0.99, 1e-15);
    EXPECT_NEAR(s.baseline[0], 0.1, 1e-15);
}

TEST(HebbianUpdate, RateMultiplierScalesTheTerm) {
    const CompiledModule m(single_link(0.2));
    PlasticState s = single_state(0.2);
    const std::vector<double> nodes{0.5, 0.5};
    hebbian_update(s, Slot::Perception, m, nodes, -1.0, 1.6);
    const double w = 0.2 + 0.01 * 1.6 * 0.5 * -1.0;
    EXPECT_NEAR(s.current[0][0], w + 0.01 * (0.2 - w), 1e-15);
}

TEST(HebbianUpdate, DriftNeverExceedsBound) {
    const CompiledModule m(single_link(0.4));
    PlasticState s = single_state(0.4);
    const std::vector<double> nodes{1.0, 0.5};
    double max_seen = 0.0;
    for (int i = 0; i < 10000; ++i) {
        s.baseline[0] = 0.0;  // keep the surprise maximal
        hebbian_update(s, Slot::Perception, m, nodes, 1.0, 2.0);
        max_seen = std::max(max_seen, s.max_drift());
        ASSERT_LE(s.max_drift(), kDriftBound + 1e-15);
    }
    EXPECT_NEAR(max_seen, kDriftBound, 1e-12);
}

TEST(HebbianUpdate, RandomDrivesRespectBound) {
    Rng rng(7);
    const CompiledModule m(single_link(-0.3));
    PlasticState s = single_state(-0.3);
    for (int i = 0; i < 10000; ++i) {
        const std::vector<double> nodes{rng.uniform(-1.0, 1.0), 0.5};
        hebbian_update(s, Slot::Perception, m, nodes, rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0));
        ASSERT_LE(s.max_drift(), kDriftBound + 1e-15);
    }
}

TEST(HebbianUpdate, AnchorDecayPullsBackWithoutActivity) {
    const CompiledModule m(single_link(0.0));
    PlasticState s = single_state(0.0);
    s.current[0][0] = 0.25;
    for (int i = 0; i < 50; ++i) hebbian_update(s, Slot::Perception, m, {}, 1.0, 1.0);
    EXPECT_NEAR(s.current[0][0], 0.25 * std::pow(0.99, 50), 1e-12);
}

TEST(Reset, RestoresWeightsAndKeepsMultipliers) {
    const Brain brain(zero_brain());
    PlasticState s = PlasticState::for_brain(brain);
    s.current[2][0] = 0.2;
    s.baseline.fill(0.4);
    s.rate_multiplier[1] = 1.7;
    const PlasticState r = reset(s);
    EXPECT_EQ(r.current, brain.base_weights());
    for (double b : r.baseline) EXPECT_EQ(b, 0.0);
    EXPECT_EQ(r.rate_multiplier[1], 1.7);
    const PlasticState rr = reset(r);
    EXPECT_EQ(rr.current, r.current);
    EXPECT_EQ(rr.baseline, r.baseline);
    EXPECT_EQ(rr.rate_multiplier, r.rate_multiplier);
}

TEST(Rewards, PerModuleSignals) {
    MoveRecord r;
    r.agree = true;
    r.confidence = 0.8;
    r.samples = 5;
    r.affect_z = 1.5;
    r.material_z = -2.0;
    r.past_midpoint = true;
    r.first_half_agreement = 0.4;
    r.second_half_agreement = 0.7;
    EXPECT_EQ(module_reward(Slot::Perception, r), 1.0);
    EXPECT_EQ(module_reward(Slot::Integration, r), 1.0);
    EXPECT_NEAR(module_reward(Slot::Dynamics, r), 0.8, 1e-15);
    EXPECT_EQ(module_reward(Slot::Affect, r), -3.0);
    EXPECT_EQ(module_reward(Slot::Attention, r), 1.0);
    EXPECT_NEAR(module_reward(Slot::Memory, r), 0.3, 1e-15);

    r.agree = false;
    r.confidence = 0.4;
    r.samples = 2;
    r.past_midpoint = false;
    EXPECT_NEAR(module_reward(Slot::Dynamics, r), 0.6, 1e-15);
    EXPECT_EQ(module_reward(Slot::Affect, r), 0.0);
    EXPECT_EQ(module_reward(Slot::Attention, r), 0.5);
    EXPECT_EQ(module_reward(Slot::Memory, r), 0.0);
}

TEST(Rewards, TrackerSplitsAtMidpoint) {
    RewardTracker t(10);
    t.record(true, 0.5, 0.1, 0.0, 2);
    t.record(false, 0.5, 0.2, 1.0, 6);
    const auto r = t.record(true, 0.5, 0.3, 2.0, 12);
    EXPECT_TRUE(r.past_midpoint);
    EXPECT_EQ(r.samples, 3u);
    EXPECT_DOUBLE_EQ(r.first_half_agreement, 0.5);
    EXPECT_DOUBLE_EQ(r.second_half_agreement, 1.0);
    EXPECT_NEAR(r.affect_z, 1.0, 1e-12);    // (0.3 - 0.2) / 0.1
    EXPECT_NEAR(r.material_z, 1.0, 1e-12);  // (2 - 1) / 1
}

TEST(Learning, ZeroBrainGivesUnitMultipliers) {
    const auto m = learning_module_pass(zero_brain(), GameSummary{1.0, 0.7, 0.4, 0.3});
    for (double x : m) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(Learning, MultipliersStayInOpenInterval) {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const Brain brain(random_brain(rng, static_cast<std::uint64_t>(i)));
        PlasticState s = PlasticState::for_brain(brain);
        const auto m = learning_module_pass(brain, s, {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
        for (std::size_t k = 0; k < m.size(); ++k) {
            EXPECT_GT(m[k], 0.0);
            EXPECT_LT(m[k], 2.0);
            EXPECT_EQ(s.rate_multiplier[k], m[k]);
        }
        EXPECT_EQ(s.rate_multiplier[slot_index(Slot::Integration)], 1.0);
        EXPECT_EQ(s.rate_multiplier[slot_index(Slot::Learning)], 1.0);
        EXPECT_EQ(s.learning_activity.size(), brain.module(Slot::Learning).node_count());
    }
}

TEST(Step, AllModulesMoveTogether) {
    Rng rng(9);
    const Brain brain(random_brain(rng, 1));
    PlasticState s = PlasticState::for_brain(brain);
    const Position pos = Position::start();
    const auto out = evaluate(profiles::expressive(), pos);
    const auto pool = assemble_pool(extract_sensors(pos), extract_context(pos, {}), out);
    const auto step = brain.run(pool, out.piece_attention, MemoryState{}, s.current);
    MoveRecord r;
    r.agree = true;
    r.confidence = 0.9;
    hebbian_step(s, brain, step.activity, r);
    EXPECT_NE(s.current[slot_index(Slot::Perception)], s.base[slot_index(Slot::Perception)]);
    // Learning has not run yet, so its presynaptic activity is zero.
    EXPECT_EQ(s.current[slot_index(Slot::Learning)], s.base[slot_index(Slot::Learning)]);
    EXPECT_LE(s.max_drift(), kDriftBound);
}
