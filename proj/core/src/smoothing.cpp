#include "tatd/smoothing.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace tatd {

std::vector<std::vector<Index>> build_neighbors(Index time_size, int window) {
    if (window < 3 || window % 2 == 0)
        throw InvalidWindowError("window must be an odd integer >= 3, got " +
                                 std::to_string(window));
    if (time_size < 2)
        throw InvalidWindowError("time dimension must be >= 2, got " +
                                 std::to_string(time_size));

    const Index half = window / 2;
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(time_size));
    for (Index i = 1; i <= time_size; ++i) {
        auto& nbrs = out[static_cast<std::size_t>(i - 1)];
        const Index lo = std::max<Index>(1, i - half);
        const Index hi = std::min<Index>(time_size, i + half);
        for (Index s = lo; s <= hi; ++s)
            if (s != i) nbrs.push_back(s);
    }
    return out;
}

std::vector<double> kernel_weights(Index center, std::span<const Index> neighbors,
                                   double sigma) {
    if (neighbors.empty())
        throw InvalidNeighborhoodError("empty neighborhood for index " +
                                       std::to_string(center));
    if (sigma <= 0.0)
        throw ConfigError("kernel bandwidth must be positive, got " +
                          std::to_string(sigma));

    std::vector<double> w(neighbors.size());
    double total = 0.0;
    for (std::size_t k = 0; k < neighbors.size(); ++k) {
        const double d = static_cast<double>(center - neighbors[k]);
        w[k] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += w[k];
    }
    for (double& x : w) x /= total;
    return w;
}

std::vector<double> slice_densities(const SliceCensus& census) {
    const std::size_t n = census.counts.size();
    std::vector<double> d(n);
    const auto span = census.max_count - census.min_count;
    for (std::size_t i = 0; i < n; ++i) {
        if (span == 0) {
            d[i] = 0.999;  // uniform counts carry no relative-sparsity signal
        } else {
            const double t = static_cast<double>(census.counts[i] - census.min_count) /
                             static_cast<double>(span);
            d[i] = (0.999 - 0.001) * t + 0.001;
        }
    }
    return d;
}

std::vector<double> sparsity_penalties(const SliceCensus& census) {
    const std::size_t n = census.counts.size();
    std::vector<double> beta(n);
    const auto span = census.max_count - census.min_count;
    for (std::size_t i = 0; i < n; ++i) {
        if (span == 0) {
            beta[i] = 0.001;
        } else {
            // 1 - d written as the mirrored min-max form; identical in exact
            // arithmetic and exact at both endpoints in floating point
            const double t = static_cast<double>(census.max_count - census.counts[i]) /
                             static_cast<double>(span);
            beta[i] = (0.999 - 0.001) * t + 0.001;
        }
    }
    return beta;
}

SmoothingSpec::SmoothingSpec(Index time_size, int window, double sigma,
                             std::vector<double> beta)
    : time_size_(time_size), window_(window), sigma_(sigma),
      beta_(std::move(beta)) {
    const auto nbrs = build_neighbors(time_size_, window_);
    const auto n = static_cast<std::size_t>(time_size_);

    out_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        out_offsets_[i + 1] = out_offsets_[i] + nbrs[i].size();
    out_.resize(out_offsets_[n]);
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = kernel_weights(static_cast<Index>(i + 1), nbrs[i], sigma_);
        for (std::size_t k = 0; k < nbrs[i].size(); ++k)
            out_[out_offsets_[i] + k] = {nbrs[i][k], w[k]};
    }

    // transpose the outgoing table: incoming(i) = {(j, w(j, i)) : i in N(j)}
    std::vector<std::size_t> in_counts(n, 0);
    for (const auto& nb : out_) ++in_counts[static_cast<std::size_t>(nb.index - 1)];
    in_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        in_offsets_[i + 1] = in_offsets_[i] + in_counts[i];
    in_.resize(in_offsets_[n]);
    std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = out_offsets_[j]; k < out_offsets_[j + 1]; ++k) {
            const auto i = static_cast<std::size_t>(out_[k].index - 1);
            in_[cursor[i]++] = {static_cast<Index>(j + 1), out_[k].weight};
        }
    }
}

SmoothingSpec SmoothingSpec::build(Index time_size, int window, double sigma,
                                   const SliceCensus& census) {
    if (static_cast<Index>(census.counts.size()) != time_size)
        throw ShapeError("census covers " + std::to_string(census.counts.size()) +
                         " slices, expected " + std::to_string(time_size));
    return SmoothingSpec(time_size, window, sigma, sparsity_penalties(census));
}

SmoothingSpec SmoothingSpec::build_uniform(Index time_size, int window,
                                           double sigma) {
    return SmoothingSpec(time_size, window, sigma,
                         std::vector<double>(static_cast<std::size_t>(time_size), 1.0));
}

Eigen::RowVectorXd smoothed_row(const Eigen::MatrixXd& time_factor,
                                const SmoothingSpec& spec, Index i_t) {
    if (i_t < 1 || i_t > spec.time_size())
        throw IndexError("time index " + std::to_string(i_t) + " outside [1, " +
                         std::to_string(spec.time_size()) + "]");
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(time_factor.cols());
    for (const auto& nb : spec.neighbors(i_t))
        row += nb.weight * time_factor.row(nb.index - 1);
    return row;
}

void write_weights_csv(const SmoothingSpec& spec,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "time_index,neighbor_index,weight\n";
    char buf[64];
    for (Index i = 1; i <= spec.time_size(); ++i) {
        for (const auto& nb : spec.neighbors(i)) {
            std::snprintf(buf, sizeof(buf), "%.17g", nb.weight);
            out << i << ',' << nb.index << ',' << buf << '\n';
        }
    }
}

void write_beta_csv(const SmoothingSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "time_index,beta\n";
    char buf[64];
    for (Index i = 1; i <= spec.time_size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", spec.beta(i));
        out << i << ',' << buf << '\n';
    }
}

}  // namespace tatd
