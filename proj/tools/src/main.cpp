#include <cstdio>
#include <utility>

#include <CLI11.hpp>

#include "options.hpp"
#include "tatd/errors.hpp"

namespace {

void add_train_options(CLI::App* cmd, tatd::TrainConfig& c,
                       std::string& strategy) {
    cmd->add_option("--rank", c.rank, "CP rank K")->capture_default_str();
    cmd->add_option("--window", c.window, "Smoothing window size, odd >= 3")
        ->capture_default_str();
    cmd->add_option("--sigma", c.sigma, "Gaussian kernel width")
        ->capture_default_str();
    cmd->add_option("--lambda-t", c.lambda_t, "Smoothing penalty weight")
        ->capture_default_str();
    cmd->add_option("--lambda-r", c.lambda_r, "Ridge weight on non-time factors")
        ->capture_default_str();
    cmd->add_option("--lr", c.learning_rate, "Learning rate for gradient steps")
        ->capture_default_str();
    cmd->add_option("--strategy", strategy,
                    "Training strategy: als_adam, adam, sgd, als_sgd, alt_adam")
        ->capture_default_str();
    cmd->add_option("--max-outer", c.max_outer, "Outer iteration cap")
        ->capture_default_str();
    cmd->add_option("--max-inner", c.max_inner,
                    "Gradient epoch cap per outer iteration")
        ->capture_default_str();
    cmd->add_option("--patience", c.patience_outer,
                    "Consecutive validation increases before stopping")
        ->capture_default_str();
    cmd->add_option("--max-seconds", c.max_seconds,
                    "Wall-clock budget in seconds, 0 disables")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker thread count")
        ->envname("TATD_THREADS")
        ->capture_default_str();
    cmd->add_flag("--sparsity-penalty,!--no-sparsity-penalty",
                  c.sparsity_penalty,
                  "Scale the smoothing penalty by per-slice sparsity");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-aware CP decomposition of sparse temporal tensors"};
    app.set_version_flag("--version", "tatd 0.1.0");
    app.set_config("--config", "",
                   "Read defaults from a key=value file; flags override");
    app.require_subcommand(1);

    tatd::cli::FitOptions fit_opts;
    auto* fit = app.add_subcommand("fit", "Train a model on a COO tensor file");
    fit->add_option("--data", fit_opts.data, "COO entries file")->required();
    fit->add_option("--modes", fit_opts.modes, "Number of tensor modes")
        ->required();
    fit->add_option("--time-mode", fit_opts.time_mode, "One-based time mode")
        ->capture_default_str();
    fit->add_flag("--zero-based", fit_opts.zero_based,
                  "Input indices start at 0");
    fit->add_option("--seed", fit_opts.config.seed,
                    "Seed for split and initialization")
        ->capture_default_str();
    add_train_options(fit, fit_opts.config, fit_opts.strategy);
    fit->add_flag("--export-smoothing", fit_opts.export_smoothing,
                  "Also write kernel weight and penalty tables");
    fit->add_option("--out", fit_opts.out, "Output directory")
        ->capture_default_str();

    tatd::cli::PredictOptions predict_opts;
    auto* predict =
        app.add_subcommand("predict", "Reconstruct entries from a checkpoint");
    predict->add_option("--model", predict_opts.model, "Checkpoint directory")
        ->required();
    predict->add_option("--indices", predict_opts.indices,
                        "File with one index tuple per row")
        ->required();
    predict->add_option("--out", predict_opts.out,
                        "Output file, stdout when omitted");
    predict->add_flag("--zero-based", predict_opts.zero_based,
                      "Input indices start at 0");

    tatd::cli::SweepOptions sweep_opts;
    auto* sweep =
        app.add_subcommand("sweep", "Run a synthetic benchmark experiment");
    sweep->add_option("--experiment", sweep_opts.experiment,
                      "One of: sparsity, penalty, rank, optimizers, density")
        ->required()
        ->check(CLI::IsMember(
            {"sparsity", "penalty", "rank", "optimizers", "density"}));
    sweep->add_option("--out", sweep_opts.out, "Output directory")
        ->capture_default_str();
    sweep->add_option("--dims", sweep_opts.dims, "Tensor dimensions")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--time-mode", sweep_opts.time_mode, "One-based time mode")
        ->capture_default_str();
    sweep->add_option("--true-rank", sweep_opts.true_rank,
                      "Ground-truth rank of the generator")
        ->capture_default_str();
    sweep->add_option("--signal", sweep_opts.signal,
                      "Time factor family: sinusoid or random_walk")
        ->check(CLI::IsMember({"sinusoid", "random_walk"}))
        ->capture_default_str();
    sweep->add_option("--period", sweep_opts.period, "Sinusoid period in slices")
        ->capture_default_str();
    sweep->add_option("--walk-step", sweep_opts.walk_step,
                      "Random-walk step std")
        ->capture_default_str();
    sweep->add_option("--noise-std", sweep_opts.noise_std, "Observation noise")
        ->capture_default_str();
    sweep->add_option("--rate", sweep_opts.rate, "Observed fraction of cells")
        ->capture_default_str();
    sweep->add_option("--profile", sweep_opts.profile,
                      "Density profile: uniform or linear")
        ->check(CLI::IsMember({"uniform", "linear"}))
        ->capture_default_str();
    sweep->add_option("--seeds", sweep_opts.seeds, "Seeds to average over")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--rates", sweep_opts.rates,
                      "Observation rates for the sparsity experiment")
        ->delimiter(',');
    sweep->add_option("--lambdas", sweep_opts.lambdas,
                      "Lambda_t grid for the penalty experiment")
        ->delimiter(',');
    sweep->add_option("--ranks", sweep_opts.ranks,
                      "Rank grid for the rank experiment")
        ->delimiter(',');
    sweep->add_option("--data", sweep_opts.data,
                      "COO entries file for the density experiment");
    sweep->add_option("--modes", sweep_opts.modes,
                      "Number of modes in --data")
        ->capture_default_str();
    sweep->add_flag("--zero-based", sweep_opts.zero_based,
                    "Input indices start at 0");
    add_train_options(sweep, sweep_opts.config, sweep_opts.strategy);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fit->parsed()) return tatd::cli::run_fit(std::move(fit_opts));
        if (predict->parsed()) return tatd::cli::run_predict(predict_opts);
        return tatd::cli::run_sweep(std::move(sweep_opts));
    } catch (const tatd::ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
