#include <cstdio>
#include <filesystem>

#include "manifest.hpp"
#include "options.hpp"
#include "tatd/checkpoint.hpp"
#include "tatd/smoothing.hpp"

namespace tatd::cli {

namespace {

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
            {"max_seconds", c.max_seconds},
            {"sparsity_penalty", c.sparsity_penalty},
            {"seed", c.seed},
            {"threads", c.threads}};
}

}  // namespace

int run_fit(FitOptions opts) {
    opts.config.strategy = parse_strategy(opts.strategy);
    opts.config.validate();

    const auto raw = ingest(opts.data, opts.modes, opts.time_mode,
                            !opts.zero_based);
    const auto normalized = z_normalize(raw);
    const auto splits = split(normalized.tensor, opts.config.seed);

    auto result = fit(splits.train, splits.validation, opts.config);
    const auto test = evaluate(result.model, splits.test);

    const std::filesystem::path out(opts.out);
    std::filesystem::create_directories(out);

    RunManifest manifest;
    manifest.command = "fit";
    manifest.config = config_json(opts.config);
    manifest.config["data"] = opts.data;
    manifest.config["modes"] = opts.modes;
    manifest.config["time_mode"] = opts.time_mode;
    manifest.config["zero_based"] = opts.zero_based;
    manifest.data = data_summary(raw, opts.data);
    manifest.data["normalization"] = {{"mean", normalized.mean},
                                      {"stddev", normalized.stddev}};
    manifest.data["split"] = {{"train", splits.train.nnz()},
                              {"validation", splits.validation.nnz()},
                              {"test", splits.test.nnz()}};

    save_checkpoint({result.model,
                     Normalization{normalized.mean, normalized.stddev},
                     opts.config.seed},
                    out / "checkpoint");
    manifest.artifacts.push_back("checkpoint/model.json");
    for (int n = 1; n <= result.model.order(); ++n)
        manifest.artifacts.push_back("checkpoint/factor_" + std::to_string(n) +
                                     ".tsv");

    write_report_csv(result.report, out / "fit_report.csv");
    manifest.artifacts.push_back("fit_report.csv");

    if (opts.export_smoothing) {
        const auto census = slice_census(splits.train);
        const auto spec =
            opts.config.sparsity_penalty
                ? SmoothingSpec::build(splits.train.time_size(),
                                       opts.config.window, opts.config.sigma,
                                       census)
                : SmoothingSpec::build_uniform(splits.train.time_size(),
                                               opts.config.window,
                                               opts.config.sigma);
        write_weights_csv(spec, out / "smoothing_weights.csv");
        write_beta_csv(spec, out / "smoothing_beta.csv");
        manifest.artifacts.push_back("smoothing_weights.csv");
        manifest.artifacts.push_back("smoothing_beta.csv");
    }

    write_manifest(std::move(manifest), out);

    const auto& report = result.report;
    std::printf("stopped: %s after %zu outer iterations (best %d, val rmse %.6g)\n",
                report.stopping_reason.c_str(), report.records.size(),
                report.best_iteration, report.best_val_rmse);
    std::printf("test rmse: normalized %.6g, original %.6g\n", test.rmse,
                test.rmse * normalized.stddev);
    std::printf("test mae:  normalized %.6g, original %.6g\n", test.mae,
                test.mae * normalized.stddev);
    return 0;
}

}  // namespace tatd::cli
