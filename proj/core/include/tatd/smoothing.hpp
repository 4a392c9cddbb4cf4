#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <vector>

#include "tatd/sparse_tensor.hpp"

namespace tatd {

/// One neighbor of a time index together with its normalized kernel weight.
struct Neighbor {
    Index index;
    double weight;
};

/// Window neighborhoods N(i_t, S): the indices i_s with 0 < |i_s - i_t| <=
/// floor(S/2), truncated at the boundaries. The center index is excluded.
/// Result is indexed by i_t - 1.
std::vector<std::vector<Index>> build_neighbors(Index time_size, int window);

/// Gaussian-kernel weights exp(-(i_t-i_s)^2 / (2 sigma^2)) normalized over
/// the neighborhood, in the order the neighbors are given.
std::vector<double> kernel_weights(Index center, std::span<const Index> neighbors,
                                   double sigma);

/// Min-max normalized slice densities d in [0.001, 0.999]; 0.999 everywhere
/// when all slices hold the same number of entries.
std::vector<double> slice_densities(const SliceCensus& census);

/// Per-slice penalties beta = 1 - d. Computed in mirrored form so that the
/// sparsest slice gets exactly 0.999 and the densest exactly 0.001.
std::vector<double> sparsity_penalties(const SliceCensus& census);

/// Precomputed smoothing tables for one time dimension: neighborhoods,
/// normalized kernel weights (outgoing and incoming views) and per-slice
/// penalties. Immutable after construction.
class SmoothingSpec {
public:
    /// Penalties from the (training) census.
    static SmoothingSpec build(Index time_size, int window, double sigma,
                               const SliceCensus& census);
    /// Penalty disabled: beta identically 1, every slice regularized equally.
    static SmoothingSpec build_uniform(Index time_size, int window, double sigma);

    Index time_size() const { return time_size_; }
    int window() const { return window_; }
    double sigma() const { return sigma_; }

    /// Neighbors i_s of i_t with weights w(i_t, i_s).
    std::span<const Neighbor> neighbors(Index i_t) const {
        return {out_.data() + out_offsets_[i_t - 1],
                static_cast<std::size_t>(out_offsets_[i_t] - out_offsets_[i_t - 1])};
    }
    /// Rows j whose smoothed value uses i_t, with weights w(j, i_t).
    std::span<const Neighbor> incoming(Index i_t) const {
        return {in_.data() + in_offsets_[i_t - 1],
                static_cast<std::size_t>(in_offsets_[i_t] - in_offsets_[i_t - 1])};
    }
    double beta(Index i_t) const { return beta_[i_t - 1]; }
    const std::vector<double>& betas() const { return beta_; }

private:
    SmoothingSpec(Index time_size, int window, double sigma,
                  std::vector<double> beta);

    Index time_size_;
    int window_;
    double sigma_;
    std::vector<std::size_t> out_offsets_, in_offsets_;
    std::vector<Neighbor> out_, in_;
    std::vector<double> beta_;
};

/// Convex combination of the neighbor rows of i_t under the kernel weights.
Eigen::RowVectorXd smoothed_row(const Eigen::MatrixXd& time_factor,
                                const SmoothingSpec& spec, Index i_t);

/// CSV: time_index,neighbor_index,weight.
void write_weights_csv(const SmoothingSpec& spec, const std::filesystem::path& path);

/// CSV: time_index,beta.
void write_beta_csv(const SmoothingSpec& spec, const std::filesystem::path& path);

}  // namespace tatd
