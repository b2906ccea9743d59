#pragma once

// Minimal NEAT: feed-forward module genomes with innovation-numbered
// connections, structural and weight mutation, crossover by innovation
// alignment, and network activation. A BrainGenome bundles the eight module
// genomes with the inter-module gain vector.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "brainlab/rng.hpp"

namespace brainlab {

enum class NodeRole : std::uint8_t { Input, Hidden, Output };

struct NodeGene {
    int id = 0;
    NodeRole role = NodeRole::Input;
    friend bool operator==(const NodeGene&, const NodeGene&) = default;
};

struct ConnectionGene {
    std::int64_t innovation = 0;
    int from = 0;
    int to = 0;
    double weight = 0.0;
    bool enabled = true;
    friend bool operator==(const ConnectionGene&, const ConnectionGene&) = default;
};

/// Inputs are node ids [0, inputs), outputs [inputs, inputs + outputs);
/// hidden node ids come from the shared innovation counter.
struct ModuleGenome {
    int inputs = 0;
    int outputs = 0;
    std::vector<NodeGene> nodes;
    std::vector<ConnectionGene> connections;
    friend bool operator==(const ModuleGenome&, const ModuleGenome&) = default;
};

struct MutationConfig {
    double weight_perturb_fraction = 0.80;
    double perturb_sigma = 0.3;
    double add_node_prob = 0.03;
    double add_connection_prob = 0.05;
    double wiring_perturb_prob = 0.10;

    void validate() const {
        for (double p : {weight_perturb_fraction, add_node_prob, add_connection_prob, wiring_perturb_prob})
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mutation probabilities must lie in [0, 1]");
        if (!(perturb_sigma > 0.0)) throw std::invalid_argument("perturb sigma must be positive");
    }
};

/// Run-wide source of innovation and hidden-node ids. Initial bipartite
/// connections use fixed ids below kFirstDynamicId so that every genome of a
/// slot aligns at generation zero.
class InnovationCounter {
public:
    static constexpr std::int64_t kFirstDynamicId = 1'000'000;

    explicit InnovationCounter(std::int64_t start = kFirstDynamicId) : next_(start) {}
    std::int64_t next() { return next_.fetch_add(1, std::memory_order_relaxed); }
    std::int64_t peek() const { return next_.load(std::memory_order_relaxed); }

private:
    std::atomic<std::int64_t> next_;
};

class GenomeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline ModuleGenome init_minimal(int inputs, int outputs, Rng& rng) {
    if (inputs < 1 || outputs < 1) throw std::invalid_argument("module needs at least one input and one output");
    ModuleGenome g;
    g.inputs = inputs;
    g.outputs = outputs;
    for (int i = 0; i < inputs; ++i) g.nodes.push_back({i, NodeRole::Input});
    for (int o = 0; o < outputs; ++o) g.nodes.push_back({inputs + o, NodeRole::Output});
    for (int i = 0; i < inputs; ++i)
        for (int o = 0; o < outputs; ++o)
            g.connections.push_back({static_cast<std::int64_t>(i) * outputs + o, i, inputs + o,
                                     rng.uniform(-1.0, 1.0), true});
    return g;
}

namespace detail {

inline std::unordered_map<int, std::size_t> node_index(const ModuleGenome& g) {
    std::unordered_map<int, std::size_t> idx;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) idx.emplace(g.nodes[i].id, i);
    return idx;
}

/// True if `target` is reachable from `start` along connections (any state).
inline bool reachable(const ModuleGenome& g, int start, int target) {
    std::vector<int> stack{start};
    std::set<int> seen;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        if (n == target) return true;
        if (!seen.insert(n).second) continue;
        for (const auto& c : g.connections)
            if (c.from == n) stack.push_back(c.to);
    }
    return false;
}

}  // namespace detail

/// Throws GenomeError describing the first violated structural invariant.
inline void validate(const ModuleGenome& g) {
    const auto idx = detail::node_index(g);
    if (idx.size() != g.nodes.size()) throw GenomeError("duplicate node id");
    int n_in = 0, n_out = 0;
    for (const auto& n : g.nodes) {
        if (n.role == NodeRole::Input) {
            ++n_in;
            if (n.id < 0 || n.id >= g.inputs) throw GenomeError("input node id out of range");
        } else if (n.role == NodeRole::Output) {
            ++n_out;
            if (n.id < g.inputs || n.id >= g.inputs + g.outputs) throw GenomeError("output node id out of range");
        }
    }
    if (n_in != g.inputs || n_out != g.outputs) throw GenomeError("input/output node count mismatch");
    std::set<std::int64_t> innovations;
    std::set<std::pair<int, int>> pairs;
    std::vector<std::size_t> indegree(g.nodes.size(), 0);
    std::vector<std::vector<std::size_t>> out_edges(g.nodes.size());
    for (const auto& c : g.connections) {
        if (!innovations.insert(c.innovation).second) throw GenomeError("duplicate innovation id");
        if (!pairs.insert({c.from, c.to}).second) throw GenomeError("duplicate connection pair");
        const auto f = idx.find(c.from), t = idx.find(c.to);
        if (f == idx.end() || t == idx.end()) throw GenomeError("connection references unknown node");
        if (g.nodes[t->second].role == NodeRole::Input) throw GenomeError("input node has an incoming edge");
        if (g.nodes[f->second].role == NodeRole::Output) throw GenomeError("output node has an outgoing edge");
        if (!std::isfinite(c.weight)) throw GenomeError("non-finite weight");
        ++indegree[t->second];
        out_edges[f->second].push_back(t->second);
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t n = ready.back();
        ready.pop_back();
        ++visited;
        for (std::size_t m : out_edges[n])
            if (--indegree[m] == 0) ready.push_back(m);
    }
    if (visited != g.nodes.size()) throw GenomeError("connection graph has a cycle");
}

inline bool is_valid(const ModuleGenome& g) {
    try {
        validate(g);
        return true;
    } catch (const GenomeError&) {
        return false;
    }
}

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

/// Topology of a module genome prepared for repeated activation. Weights are
/// supplied per call (in genome connection order) so plastic weights can be
/// evaluated without touching the genome.
class CompiledModule {
public:
    CompiledModule() = default;

    explicit CompiledModule(const ModuleGenome& g) : inputs_(g.inputs), outputs_(g.outputs) {
        const auto idx = detail::node_index(g);
        roles_.reserve(g.nodes.size());
        for (const auto& n : g.nodes) roles_.push_back(n.role);
        incoming_.resize(g.nodes.size());
        for (std::size_t c = 0; c < g.connections.size(); ++c) {
            const auto& cg = g.connections[c];
            from_.push_back(idx.at(cg.from));
            enabled_.push_back(cg.enabled);
            incoming_[idx.at(cg.to)].push_back(c);
        }
        input_index_.assign(static_cast<std::size_t>(inputs_), 0);
        output_index_.assign(static_cast<std::size_t>(outputs_), 0);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const int id = g.nodes[i].id;
            if (g.nodes[i].role == NodeRole::Input) input_index_[static_cast<std::size_t>(id)] = i;
            if (g.nodes[i].role == NodeRole::Output) output_index_[static_cast<std::size_t>(id - inputs_)] = i;
        }
        // Kahn's algorithm over all connections; ties resolved by node order.
        std::vector<std::size_t> indegree(g.nodes.size(), 0);
        std::vector<std::vector<std::size_t>> out(g.nodes.size());
        for (const auto& cg : g.connections) {
            ++indegree[idx.at(cg.to)];
            out[idx.at(cg.from)].push_back(idx.at(cg.to));
        }
        std::vector<std::size_t> ready;
        for (std::size_t i = g.nodes.size(); i-- > 0;)
            if (indegree[i] == 0) ready.push_back(i);
        while (!ready.empty()) {
            const std::size_t n = ready.back();
            ready.pop_back();
            if (roles_[n] != NodeRole::Input) order_.push_back(n);
            for (std::size_t m : out[n])
                if (--indegree[m] == 0) ready.push_back(m);
        }
        if (order_.size() + static_cast<std::size_t>(inputs_) != g.nodes.size())
            throw GenomeError("cannot compile a cyclic module");
    }

    int inputs() const noexcept { return inputs_; }
    int outputs() const noexcept { return outputs_; }
    std::size_t node_count() const noexcept { return roles_.size(); }
    std::size_t connection_count() const noexcept { return from_.size(); }
    /// Node index feeding connection c (index into activate()'s node values).
    std::size_t source_of(std::size_t c) const noexcept { return from_[c]; }

    /// Fills `node_values` (one entry per node) and returns nothing; outputs
    /// are read with output(). Hidden nodes use tanh, outputs the logistic
    /// sigmoid; disabled connections contribute nothing.
    void activate(std::span<const double> weights, std::span<const double> in,
                  std::vector<double>& node_values) const {
        if (in.size() != static_cast<std::size_t>(inputs_))
            throw DimensionError("module expects " + std::to_string(inputs_) + " inputs, got " +
                                 std::to_string(in.size()));
        node_values.assign(roles_.size(), 0.0);
        for (std::size_t i = 0; i < in.size(); ++i) node_values[input_index_[i]] = in[i];
        for (std::size_t n : order_) {
            double sum = 0.0;
            for (std::size_t c : incoming_[n])
                if (enabled_[c]) sum += weights[c] * node_values[from_[c]];
            node_values[n] = roles_[n] == NodeRole::Hidden ? std::tanh(sum) : sigmoid(sum);
        }
    }

    std::vector<double> outputs_of(std::span<const double> node_values) const {
        std::vector<double> out(output_index_.size());
        for (std::size_t o = 0; o < out.size(); ++o) out[o] = node_values[output_index_[o]];
        return out;
    }

private:
    int inputs_ = 0;
    int outputs_ = 0;
    std::vector<NodeRole> roles_;
    std::vector<std::vector<std::size_t>> incoming_;
    std::vector<std::size_t> from_;
    std::vector<bool> enabled_;
    std::vector<std::size_t> input_index_;
    std::vector<std::size_t> output_index_;
    std::vector<std::size_t> order_;
};

inline std::vector<double> weights_of(const ModuleGenome& g) {
    std::vector<double> w;
    w.reserve(g.connections.size());
    for (const auto& c : g.connections) w.push_back(c.weight);
    return w;
}

inline std::vector<double> activate(const ModuleGenome& g, std::span<const double> inputs) {
    const CompiledModule m(g);
    std::vector<double> values;
    m.activate(weights_of(g), inputs, values);
    return m.outputs_of(values);
}

namespace detail {

inline void add_node(ModuleGenome& g, InnovationCounter& counter, Rng& rng) {
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < g.connections.size(); ++i)
        if (g.connections[i].enabled) enabled.push_back(i);
    if (enabled.empty()) return;
    const std::size_t pick = enabled[rng.below(enabled.size())];
    ConnectionGene& old = g.connections[pick];
    old.enabled = false;
    const int node = g.inputs + g.outputs + static_cast<int>(counter.next() - InnovationCounter::kFirstDynamicId);
    const int from = old.from, to = old.to;
    const double w = old.weight;
    g.nodes.push_back({node, NodeRole::Hidden});
    g.connections.push_back({counter.next(), from, node, 1.0, true});
    g.connections.push_back({counter.next(), node, to, w, true});
}

inline void add_connection(ModuleGenome& g, InnovationCounter& counter, Rng& rng) {
    std::set<std::pair<int, int>> existing;
    for (const auto& c : g.connections) existing.insert({c.from, c.to});
    std::vector<std::pair<int, int>> candidates;
    for (const auto& a : g.nodes) {
        if (a.role == NodeRole::Output) continue;
        for (const auto& b : g.nodes) {
            if (b.role == NodeRole::Input || a.id == b.id) continue;
            if (existing.contains({a.id, b.id})) continue;
            if (reachable(g, b.id, a.id)) continue;
            candidates.emplace_back(a.id, b.id);
        }
    }
    if (candidates.empty()) return;
    const auto [from, to] = candidates[rng.below(candidates.size())];
    g.connections.push_back({counter.next(), from, to, rng.uniform(-1.0, 1.0), true});
}

}  // namespace detail

/// Weight perturbation, then add-node, then add-connection, each at its
/// configured rate.
inline ModuleGenome mutate(const ModuleGenome& genome, const MutationConfig& cfg, InnovationCounter& counter,
                           Rng& rng) {
    ModuleGenome g = genome;
    for (auto& c : g.connections)
        if (c.enabled && rng.bernoulli(cfg.weight_perturb_fraction)) c.weight += rng.normal(0.0, cfg.perturb_sigma);
    if (rng.bernoulli(cfg.add_node_prob)) detail::add_node(g, counter, rng);
    if (rng.bernoulli(cfg.add_connection_prob)) detail::add_connection(g, counter, rng);
#ifndef NDEBUG
    validate(g);
#endif
    return g;
}

enum class Slot : std::uint8_t { Perception, Memory, Affect, Attention, Dynamics, Personality, Integration, Learning };

inline constexpr std::size_t kSlotCount = 8;
inline constexpr std::size_t slot_index(Slot s) noexcept { return static_cast<std::size_t>(s); }

struct SlotDims {
    int inputs;
    int outputs;
};

inline constexpr std::array<SlotDims, kSlotCount> kSlotDims{
    {{20, 8}, {8, 4}, {8, 5}, {16, 4}, {6, 2}, {27, 8}, {31, 16}, {4, 6}}};

inline constexpr std::array<const char*, kSlotCount> kSlotNames{
    "perception", "memory", "affect", "attention", "dynamics", "personality", "integration", "learning"};

/// Gains 0..4 scale the Phase-1 blocks entering Personality; gains 5..9 the
/// Phase-1 blocks entering Integration; gain 10 the Personality block
/// entering Integration.
inline constexpr std::size_t kGainCount = 11;

struct BrainGenome {
    std::array<ModuleGenome, kSlotCount> modules;
    std::array<double, kGainCount> gains{};
    std::uint64_t lineage = 0;  // unique id, also the selection tie-breaker

    const ModuleGenome& module(Slot s) const { return modules[slot_index(s)]; }
    ModuleGenome& module(Slot s) { return modules[slot_index(s)]; }
    friend bool operator==(const BrainGenome&, const BrainGenome&) = default;
};

inline void validate(const BrainGenome& b) {
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        const auto& m = b.modules[s];
        if (m.inputs != kSlotDims[s].inputs || m.outputs != kSlotDims[s].outputs)
            throw GenomeError(std::string("slot dimensions wrong for ") + kSlotNames[s]);
        validate(m);
    }
    for (double g : b.gains)
        if (!std::isfinite(g)) throw GenomeError("non-finite inter-module gain");
}

inline BrainGenome random_brain(Rng& rng, std::uint64_t lineage) {
    BrainGenome b;
    for (std::size_t s = 0; s < kSlotCount; ++s) b.modules[s] = init_minimal(kSlotDims[s].inputs, kSlotDims[s].outputs, rng);
    b.gains.fill(1.0);
    b.lineage = lineage;
    return b;
}

/// Every connection weight zero, gains 1: all module outputs are 0.5.
inline BrainGenome zero_brain(std::uint64_t lineage = 0) {
    Rng rng(0);
    BrainGenome b = random_brain(rng, lineage);
    for (auto& m : b.modules)
        for (auto& c : m.connections) c.weight = 0.0;
    return b;
}

/// With the configured probability, adds N(0, sigma) to one gain chosen
/// uniformly.
inline BrainGenome perturb_wiring(const BrainGenome& genome, const MutationConfig& cfg, Rng& rng) {
    BrainGenome b = genome;
    if (rng.bernoulli(cfg.wiring_perturb_prob)) b.gains[rng.below(kGainCount)] += rng.normal(0.0, cfg.perturb_sigma);
    return b;
}

/// Mutates every module independently, then the wiring gains.
inline BrainGenome mutate(const BrainGenome& genome, const MutationConfig& cfg, InnovationCounter& counter, Rng& rng) {
    BrainGenome b = genome;
    for (auto& m : b.modules) m = mutate(m, cfg, counter, rng);
    return perturb_wiring(b, cfg, rng);
}

/// Genes align by innovation id. Matching genes take either parent's gene
/// with equal probability; disjoint and excess genes come from the fitter
/// parent (parent a on ties), so the child has the fitter parent's topology.
inline ModuleGenome crossover(const ModuleGenome& fitter, const ModuleGenome& other, Rng& rng) {
    ModuleGenome child = fitter;
    std::unordered_map<std::int64_t, const ConnectionGene*> by_innovation;
    for (const auto& c : other.connections) by_innovation.emplace(c.innovation, &c);
    for (auto& c : child.connections) {
        const auto it = by_innovation.find(c.innovation);
        if (it != by_innovation.end() && rng.bernoulli(0.5)) {
            c.weight = it->second->weight;
            c.enabled = it->second->enabled;
        }
    }
    return child;
}

inline BrainGenome crossover(const BrainGenome& a, const BrainGenome& b, double fitness_a, double fitness_b, Rng& rng) {
    const bool a_fitter = fitness_a >= fitness_b;
    const BrainGenome& fit = a_fitter ? a : b;
    const BrainGenome& other = a_fitter ? b : a;
    BrainGenome child;
    for (std::size_t s = 0; s < kSlotCount; ++s) child.modules[s] = crossover(fit.modules[s], other.modules[s], rng);
    for (std::size_t i = 0; i < kGainCount; ++i) child.gains[i] = 0.5 * (a.gains[i] + b.gains[i]);
    child.lineage = fit.lineage;
    return child;
}

// ---------------------------------------------------------------------------
// Checkpoint format

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline nlohmann::ordered_json to_json(const ModuleGenome& g) {
    nlohmann::ordered_json j;
    j["inputs"] = g.inputs;
    j["outputs"] = g.outputs;
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : g.nodes) {
        static constexpr const char* roles[] = {"input", "hidden", "output"};
        nodes.push_back({{"id", n.id}, {"role", roles[static_cast<int>(n.role)]}});
    }
    auto& conns = j["connections"] = nlohmann::ordered_json::array();
    for (const auto& c : g.connections)
        conns.push_back({{"innovation", c.innovation},
                         {"from", c.from},
                         {"to", c.to},
                         {"weight", c.weight},
                         {"enabled", c.enabled}});
    return j;
}

inline ModuleGenome module_from_json(const nlohmann::ordered_json& j) {
    ModuleGenome g;
    g.inputs = j.at("inputs").get<int>();
    g.outputs = j.at("outputs").get<int>();
    for (const auto& n : j.at("nodes")) {
        const std::string role = n.at("role").get<std::string>();
        NodeRole r = NodeRole::Hidden;
        if (role == "input") r = NodeRole::Input;
        else if (role == "output") r = NodeRole::Output;
        else if (role != "hidden") throw CheckpointError("unknown node role '" + role + "'");
        g.nodes.push_back({n.at("id").get<int>(), r});
    }
    for (const auto& c : j.at("connections"))
        g.connections.push_back({c.at("innovation").get<std::int64_t>(), c.at("from").get<int>(),
                                 c.at("to").get<int>(), c.at("weight").get<double>(), c.at("enabled").get<bool>()});
    return g;
}

inline nlohmann::ordered_json to_json(const BrainGenome& b) {
    nlohmann::ordered_json j;
    j["format"] = "brainlab-genome";
    j["version"] = kCheckpointVersion;
    j["lineage"] = b.lineage;
    j["gains"] = b.gains;
    auto& mods = j["modules"] = nlohmann::ordered_json::object();
    for (std::size_t s = 0; s < kSlotCount; ++s) mods[kSlotNames[s]] = to_json(b.modules[s]);
    return j;
}

inline BrainGenome brain_from_json(const nlohmann::ordered_json& j) {
    if (j.value("format", std::string{}) != "brainlab-genome") throw CheckpointError("not a brainlab genome");
    if (j.at("version").get<int>() != kCheckpointVersion)
        throw CheckpointError("checkpoint version " + std::to_string(j.at("version").get<int>()) +
                              " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
    BrainGenome b;
    b.lineage = j.at("lineage").get<std::uint64_t>();
    const auto gains = j.at("gains").get<std::vector<double>>();
    if (gains.size() != kGainCount) throw CheckpointError("wrong gain count");
    std::copy(gains.begin(), gains.end(), b.gains.begin());
    for (std::size_t s = 0; s < kSlotCount; ++s) b.modules[s] = module_from_json(j.at("modules").at(kSlotNames[s]));
    try {
        validate(b);
    } catch (const GenomeError& e) {
        throw CheckpointError(std::string("invalid genome in checkpoint: ") + e.what());
    }
    return b;
}

/// Population checkpoint: {"format", "version", "generation", "genomes": [...]}.
inline nlohmann::ordered_json population_to_json(std::span<const BrainGenome> pop, int generation) {
    nlohmann::ordered_json j;
    j["format"] = "brainlab-population";
    j["version"] = kCheckpointVersion;
    j["generation"] = generation;
    auto& arr = j["genomes"] = nlohmann::ordered_json::array();
    for (const auto& g : pop) arr.push_back(to_json(g));
    return j;
}

/// Loads a single genome, or the first genome of a population checkpoint.
inline BrainGenome load_genome(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open checkpoint " + path);
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("checkpoint " + path + " is not valid JSON: " + e.what());
    }
    if (j.value("format", std::string{}) == "brainlab-population") {
        if (j.at("version").get<int>() != kCheckpointVersion) throw CheckpointError("checkpoint version mismatch");
        if (j.at("genomes").empty()) throw CheckpointError("population checkpoint is empty");
        return brain_from_json(j.at("genomes").at(0));
    }
    return brain_from_json(j);
}

}  // namespace brainlab
