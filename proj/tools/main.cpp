// brainlab command-line interface.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "brainlab/harness.hpp"

namespace {

using namespace brainlab;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> generations;
    std::optional<int> population;
    std::optional<int> games;
    std::optional<std::string> hebbian;
    std::optional<std::string> imagination;

    void add_to(CLI::App* app) {
        app->add_option("--seed", seed, "Replace the seed list (manifests) or the seed");
        app->add_option("--generations", generations, "Generations per run");
        app->add_option("--population", population, "Population size (even)");
        app->add_option("--games", games, "Games per evaluation");
        app->add_option("--hebbian", hebbian, "Plasticity on|off")->check(CLI::IsMember({"on", "off"}));
        app->add_option("--imagination", imagination, "Imagination on|off")->check(CLI::IsMember({"on", "off"}));
    }

    void apply(ojson& j) const {
        if (generations) j["generations"] = *generations;
        if (population) j["population"] = *population;
        if (games) j["games"] = *games;
        if (hebbian) j["hebbian"] = *hebbian == "on";
        if (imagination) j["imagination"] = *imagination == "on";
        if (seed) j["seed"] = *seed;
    }
};

ExperimentConfig load_config(const std::string& path, const Overrides& o) {
    ojson j = path.empty() ? ojson::object() : read_json_file(path);
    o.apply(j);
    ExperimentConfig cfg = config_from_json(j, desk_config());
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolved cognitive layer over chess move predictors"};
    app.require_subcommand(1);

    std::string manifest_path, config_path, checkpoint, opponents, positions, logs_dir, out_path;
    Overrides run_o, base_o, abl_o, probe_o;

    auto* run = app.add_subcommand("run", "Run an experiment set from a manifest");
    run->add_option("--manifest", manifest_path, "Manifest JSON")->required()->check(CLI::ExistingFile);
    run_o.add_to(run);

    auto* baselines = app.add_subcommand("baselines", "Null, random-parameter and temperature-only baselines");
    baselines->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
    baselines->add_option("--out", out_path, "Write the report here instead of stdout");
    base_o.add_to(baselines);

    auto* ablate = app.add_subcommand("ablate", "Hebbian off/on ablation of an evolved genome");
    ablate->add_option("--checkpoint", checkpoint, "Genome or population checkpoint")->required()->check(CLI::ExistingFile);
    ablate->add_option("--opponents", opponents, "Comma-separated opponent profile ids")->required();
    ablate->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
    ablate->add_option("--out", out_path, "Write the report here instead of stdout");
    abl_o.add_to(ablate);

    auto* probe = app.add_subcommand("probe", "Behavioural probe of an evolved genome");
    probe->add_option("--checkpoint", checkpoint, "Genome or population checkpoint")->required()->check(CLI::ExistingFile);
    probe->add_option("--positions", positions, "File with one FEN per line")->required()->check(CLI::ExistingFile);
    probe->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
    probe->add_option("--out", out_path, "Write the report here instead of stdout");
    probe_o.add_to(probe);

    auto* st = app.add_subcommand("stats", "Analyse generation logs below a directory");
    st->add_option("--logs", logs_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    st->add_option("--out", out_path, "Write the report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    auto emit = [&](const ojson& j) {
        if (out_path.empty()) std::cout << j.dump(2) << '\n';
        else write_text(out_path, j.dump(2) + "\n");
    };

    try {
        if (*run) {
            RunManifest m = manifest_from_json(read_json_file(manifest_path));
            if (run_o.seed) m.seeds = {*run_o.seed};
            Overrides without_seed = run_o;
            without_seed.seed.reset();
            without_seed.apply(m.overrides);
            m.validate();
            const auto dir = run_set(m, &std::cerr);
            std::cout << (dir / "report.json").string() << '\n';
        } else if (*baselines) {
            emit(to_json(run_baselines(load_config(config_path, base_o))));
        } else if (*ablate) {
            const ExperimentConfig cfg = load_config(config_path, abl_o);
            std::vector<std::string> ids;
            std::stringstream ss(opponents);
            for (std::string id; std::getline(ss, id, ',');)
                if (!id.empty()) ids.push_back(id);
            emit(to_json(run_hebbian_ablation(load_genome(checkpoint), ids, cfg.games, cfg)));
        } else if (*probe) {
            emit(run_probe(load_genome(checkpoint), read_fen_file(positions), load_config(config_path, probe_o)));
        } else if (*st) {
            emit(stats_from_logs(logs_dir));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
