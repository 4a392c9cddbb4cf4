#include <filesystem>
#include <vector>

#include "manifest.hpp"
#include "options.hpp"
#include "tatd/sweeps.hpp"

namespace tatd::cli {

namespace {

SynthSpec build_spec(const SweepOptions& opts) {
    SynthSpec spec;
    spec.dims = opts.dims;
    spec.time_mode = opts.time_mode;
    spec.true_rank = opts.true_rank;
    if (opts.signal == "sinusoid")
        spec.signal = TimeSignal::sinusoid;
    else if (opts.signal == "random_walk")
        spec.signal = TimeSignal::random_walk;
    else
        throw ConfigError("unknown signal '" + opts.signal +
                          "'; valid: sinusoid random_walk");
    spec.period = opts.period;
    spec.walk_step = opts.walk_step;
    spec.noise_std = opts.noise_std;
    spec.rate = opts.rate;
    if (opts.profile == "uniform")
        spec.profile = DensityProfile::uniform;
    else if (opts.profile == "linear")
        spec.profile = DensityProfile::linear;
    else
        throw ConfigError("unknown profile '" + opts.profile +
                          "'; valid: uniform linear");
    return spec;
}

nlohmann::json spec_json(const SynthSpec& spec, const SweepOptions& opts) {
    return {{"dims", spec.dims},
            {"time_mode", spec.time_mode},
            {"true_rank", spec.true_rank},
            {"signal", opts.signal},
            {"period", spec.period},
            {"walk_step", spec.walk_step},
            {"noise_std", spec.noise_std},
            {"rate", spec.rate},
            {"profile", opts.profile}};
}

nlohmann::json config_json(const TrainConfig& c) {
    return {{"strategy", strategy_name(c.strategy)},
            {"rank", c.rank},
            {"window", c.window},
            {"sigma", c.sigma},
            {"lambda_t", c.lambda_t},
            {"lambda_r", c.lambda_r},
            {"learning_rate", c.learning_rate},
            {"max_outer", c.max_outer},
            {"max_inner", c.max_inner},
            {"patience_outer", c.patience_outer},
            {"sparsity_penalty", c.sparsity_penalty},
            {"threads", c.threads}};
}

}  // namespace

int run_sweep(SweepOptions opts) {
    opts.config.strategy = parse_strategy(opts.strategy);
    if (opts.seeds.empty()) throw ConfigError("at least one seed is required");

    const std::filesystem::path out(opts.out);
    std::filesystem::create_directories(out);

    RunManifest manifest;
    manifest.command = "sweep";
    manifest.config["experiment"] = opts.experiment;
    manifest.config["seeds"] = opts.seeds;

    if (opts.experiment == "density") {
        if (opts.data.empty())
            throw ConfigError("--experiment density requires --data");
        const auto x = ingest(opts.data, opts.modes, opts.time_mode,
                              !opts.zero_based);
        write_census_csv(slice_census(x), out / "density.csv");
        manifest.data = data_summary(x, opts.data);
        manifest.artifacts.push_back("density.csv");
        write_manifest(std::move(manifest), out);
        return 0;
    }

    opts.config.validate();
    const SynthSpec spec = build_spec(opts);
    manifest.config["generator"] = spec_json(spec, opts);
    manifest.config["train"] = config_json(opts.config);

    if (opts.experiment == "sparsity") {
        manifest.config["rates"] = opts.rates;
        const auto rows =
            sparsity_sweep(spec, opts.config, opts.rates, opts.seeds);
        write_sparsity_csv(rows, out / "sparsity.csv");
        manifest.artifacts.push_back("sparsity.csv");
    } else if (opts.experiment == "penalty") {
        manifest.config["lambdas"] = opts.lambdas;
        const auto rows =
            penalty_sweep(spec, opts.config, opts.lambdas, opts.seeds);
        write_penalty_csv(rows, out / "penalty.csv");
        manifest.artifacts.push_back("penalty.csv");
    } else if (opts.experiment == "rank") {
        manifest.config["ranks"] = opts.ranks;
        const auto rows = rank_sweep(spec, opts.config, opts.ranks, opts.seeds);
        write_rank_csv(rows, out / "rank.csv");
        manifest.artifacts.push_back("rank.csv");
    } else if (opts.experiment == "optimizers") {
        std::vector<Strategy> strategies;
        for (auto name : strategy_names())
            strategies.push_back(parse_strategy(name));
        const auto rows = optimizer_comparison(spec, opts.config, strategies,
                                               opts.seeds.front());
        write_strategy_csv(rows, out / "optimizers.csv");
        manifest.artifacts.push_back("optimizers.csv");
    } else {
        throw ConfigError(
            "unknown experiment '" + opts.experiment +
            "'; valid: sparsity penalty rank optimizers density");
    }

    write_manifest(std::move(manifest), out);
    return 0;
}

}  // namespace tatd::cli
