#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "tatd/optimizer.hpp"
#include "tatd/synth.hpp"

namespace tatd {

// Methods compared across the sweeps: full TATD, TATD with the sparsity
// penalty disabled (beta fixed at 1), and plain CP-ALS (lambda_t = 0).
enum class Method { tatd, tatd_nopen, cp_als };

std::span<const std::string_view> method_names();
std::string_view method_name(Method m);

struct SparsityRow {
    double rate;
    Method method;
    double rmse;
    double mae;
};

struct PenaltyRow {
    double lambda_t;
    double rmse;
};

struct RankRow {
    int rank;
    Method method;
    double rmse;
};

struct StrategyRow {
    Strategy strategy;
    double val_rmse;
    double test_rmse;
    double test_mae;
    int outer_iterations;
    double seconds;
};

// One experiment cell: generate, z-normalize, split with config.seed, fit,
// evaluate the best checkpoint on the test split (normalized scale).
struct CellResult {
    Metrics test;
    FitReport report;
};

CellResult run_cell(SynthSpec spec, TrainConfig config, Method method);

// Sweep drivers average metrics over the given seeds, which drive generation,
// splitting and initialization together. Row order follows the input grids
// with methods in declaration order.
std::vector<SparsityRow> sparsity_sweep(SynthSpec spec, TrainConfig config,
                                        std::span<const double> rates,
                                        std::span<const std::uint64_t> seeds);

std::vector<PenaltyRow> penalty_sweep(SynthSpec spec, TrainConfig config,
                                      std::span<const double> lambdas,
                                      std::span<const std::uint64_t> seeds);

std::vector<RankRow> rank_sweep(SynthSpec spec, TrainConfig config,
                                std::span<const int> ranks,
                                std::span<const std::uint64_t> seeds);

// Runs als_adam to its stopping point first, then grants every other
// strategy the same wall-clock budget.
std::vector<StrategyRow> optimizer_comparison(SynthSpec spec, TrainConfig config,
                                              std::span<const Strategy> strategies,
                                              std::uint64_t seed);

void write_sparsity_csv(std::span<const SparsityRow> rows,
                        const std::filesystem::path& path);
void write_penalty_csv(std::span<const PenaltyRow> rows,
                       const std::filesystem::path& path);
void write_rank_csv(std::span<const RankRow> rows,
                    const std::filesystem::path& path);
void write_strategy_csv(std::span<const StrategyRow> rows,
                        const std::filesystem::path& path);

}  // namespace tatd
