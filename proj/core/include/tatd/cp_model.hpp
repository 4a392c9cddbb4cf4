#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "tatd/smoothing.hpp"
#include "tatd/sparse_tensor.hpp"

namespace tatd {

/// Rank-K CP factor model: one I_n x K matrix per mode, with one mode
/// designated as the time mode. Mode arguments are one-based.
class FactorModel {
public:
    FactorModel(std::vector<Eigen::MatrixXd> factors, int time_mode);

    /// Entries drawn independently uniform on [0, 1/sqrt(K)), filled in mode
    /// order, row-major within a matrix; deterministic per seed.
    static FactorModel init(const std::vector<Index>& dims, int rank,
                            int time_mode, std::uint64_t seed);

    int order() const { return static_cast<int>(factors_.size()); }
    int rank() const { return static_cast<int>(factors_.front().cols()); }
    int time_mode() const { return time_mode_; }
    std::vector<Index> dims() const;

    const Eigen::MatrixXd& factor(int mode) const { return factors_[mode - 1]; }
    Eigen::MatrixXd& factor(int mode) { return factors_[mode - 1]; }
    const Eigen::MatrixXd& time_factor() const { return factors_[time_mode_ - 1]; }
    Eigen::MatrixXd& time_factor() { return factors_[time_mode_ - 1]; }

    /// True when the model can score entries of x.
    bool matches(const SparseTensor& x) const;

private:
    std::vector<Eigen::MatrixXd> factors_;
    int time_mode_;
};

/// Reconstructed entry sum_k prod_n a^(n)[i_n, k] at a one-based index tuple.
double predict(const FactorModel& model, std::span<const Index> index);

/// The three summands of the training objective. smooth_term and ridge_term
/// include their lambda factors.
struct LossBreakdown {
    double fit_sse = 0.0;
    double smooth_term = 0.0;
    double ridge_term = 0.0;
    double total = 0.0;
};

/// Squared reconstruction error over observed entries, plus the per-slice
/// beta-weighted smoothing penalty on the time factor and the Frobenius
/// ridge over the non-time factors.
LossBreakdown loss(const FactorModel& model, const SparseTensor& train,
                   const SmoothingSpec& spec, double lambda_t, double lambda_r);

struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
};

/// RMSE and MAE over the observed entries of a holdout tensor.
Metrics evaluate(const FactorModel& model, const SparseTensor& holdout);

}  // namespace tatd
