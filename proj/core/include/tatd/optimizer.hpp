#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tatd/cp_model.hpp"
#include "tatd/smoothing.hpp"
#include "tatd/sparse_tensor.hpp"

namespace tatd {

/// How the factor matrices are updated.
///   als_adam : closed-form row solves for non-time modes, adaptive-moment
///              gradient epochs for the time mode (the default)
///   adam     : joint full-gradient adaptive-moment steps on all modes
///   sgd      : joint full-batch gradient descent on all modes
///   als_sgd  : als_adam with plain gradient steps on the time mode
///   alt_adam : adaptive-moment epochs on every mode, in alternation
enum class Strategy { als_adam, adam, sgd, als_sgd, alt_adam };

std::span<const std::string_view> strategy_names();
std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);  // ConfigError listing valid names

struct TrainConfig {
    double lambda_t = 10.0;    // smoothing penalty
    double lambda_r = 1e-2;    // ridge on non-time factors
    double learning_rate = 1e-2;
    int rank = 10;
    int window = 3;            // odd, >= 3
    double sigma = 0.5;
    int max_outer = 50;
    int max_inner = 100;       // cap on gradient epochs per factor visit
    int patience_outer = 5;    // consecutive validation-RMSE increases tolerated
    Strategy strategy = Strategy::als_adam;
    std::uint64_t seed = 0;
    bool sparsity_penalty = true;  // false: every slice weighted beta = 1
    double max_seconds = 0.0;      // wall-clock budget; 0 disables
    int threads = 1;

    void validate() const;  // throws ConfigError
};

/// Per-coordinate moment accumulators for one factor matrix.
struct AdamState {
    Eigen::MatrixXd m;  // first moment
    Eigen::MatrixXd v;  // second moment
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState(Index rows, int cols)
        : m(Eigen::MatrixXd::Zero(rows, cols)),
          v(Eigen::MatrixXd::Zero(rows, cols)) {}
};

struct OuterRecord {
    int iteration = 0;  // 1-based outer iteration
    double train_rmse = 0.0;
    double val_rmse = 0.0;
    double val_mae = 0.0;
    int inner_epochs = 0;  // gradient epochs spent this iteration
    double seconds = 0.0;  // wall-clock for this iteration
};

struct FitReport {
    std::vector<OuterRecord> records;
    int best_iteration = 0;  // 0 refers to the initial model
    double best_val_rmse = std::numeric_limits<double>::infinity();
    std::string stopping_reason;  // "patience" | "max_outer" | "time_budget"
};

/// CSV: iteration,train_rmse,val_rmse,val_mae,inner_epochs,seconds.
void write_report_csv(const FitReport& report, const std::filesystem::path& path);

/// Entry ids of one tensor grouped by the index they carry in one mode.
class ModeSlices {
public:
    ModeSlices(const SparseTensor& x, int mode);
    int mode() const { return mode_; }
    std::span<const std::int64_t> entries(Index i) const {
        return {ids_.data() + offsets_[i - 1],
                static_cast<std::size_t>(offsets_[i] - offsets_[i - 1])};
    }

private:
    int mode_;
    std::vector<std::size_t> offsets_;
    std::vector<std::int64_t> ids_;
};

/// Exact per-row least-squares update of one non-time factor: each row with
/// observed entries is replaced by the minimizer of the training objective
/// over that row, rows without entries are set to zero. Throws
/// SingularUpdateError when a normal system is singular and lambda_r == 0.
void rowwise_update(FactorModel& model, const SparseTensor& train, int mode,
                    double lambda_r, const ModeSlices* slices = nullptr,
                    int threads = 1);

/// Gradient of the training objective with respect to the time factor:
/// data term, the direct smoothing pull toward the smoothed row, and the
/// reverse coupling through neighbors whose smoothed rows use this row.
Eigen::MatrixXd time_gradient(const FactorModel& model, const SparseTensor& train,
                              const SmoothingSpec& spec, double lambda_t,
                              const ModeSlices* slices = nullptr, int threads = 1);

/// Gradient with respect to any one factor: the time mode gets the smoothing
/// terms, other modes the ridge term.
Eigen::MatrixXd mode_gradient(const FactorModel& model, const SparseTensor& train,
                              const SmoothingSpec& spec, int mode, double lambda_t,
                              double lambda_r, const ModeSlices* slices = nullptr,
                              int threads = 1);

/// One bias-corrected adaptive-moment update (beta1 0.9, beta2 0.999,
/// epsilon 1e-8). Throws DivergenceError on a non-finite gradient.
void adam_step(Eigen::MatrixXd& factor, const Eigen::MatrixXd& gradient,
               AdamState& state, double learning_rate);

struct FitResult {
    FactorModel model;  // checkpoint with the best validation RMSE seen
    FitReport report;
};

/// Trains a rank-K model on the training split, early-stopped on the
/// validation split, with the configured update strategy.
FitResult fit(const SparseTensor& train, const SparseTensor& validation,
              const TrainConfig& config);

}  // namespace tatd
