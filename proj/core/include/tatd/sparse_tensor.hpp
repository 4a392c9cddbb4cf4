#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tatd/errors.hpp"

namespace tatd {

using Index = std::int64_t;

/// Sparse N-mode tensor in coordinate format.
///
/// Indices are one-based (1 <= i_n <= dims[n-1]) and one mode is designated
/// as the time mode. Entries are stored in insertion order; index tuples are
/// unique. Instances are immutable after construction and safe to share
/// read-only across threads.
class SparseTensor {
public:
    /// Builds a tensor from flat index storage: entry e occupies
    /// flat_indices[e*N .. e*N+N-1]. Validates ranges, the time mode and
    /// uniqueness of index tuples.
    SparseTensor(std::vector<Index> dims, int time_mode,
                 std::vector<Index> flat_indices, std::vector<double> values);

    int order() const { return static_cast<int>(dims_.size()); }
    const std::vector<Index>& dims() const { return dims_; }
    /// One-based index of the time mode.
    int time_mode() const { return time_mode_; }
    /// Dimensionality of the time mode.
    Index time_size() const { return dims_[time_mode_ - 1]; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

    /// Index tuple of entry e (one-based components).
    std::span<const Index> index(std::int64_t e) const {
        const int n = order();
        return {flat_indices_.data() + e * n, static_cast<std::size_t>(n)};
    }
    double value(std::int64_t e) const { return values_[e]; }
    Index time_index(std::int64_t e) const {
        return flat_indices_[e * order() + time_mode_ - 1];
    }
    const std::vector<double>& values() const { return values_; }

    /// New tensor with the same dims/time mode holding the given entries.
    SparseTensor subset(std::span<const std::int64_t> entry_ids) const;

private:
    std::vector<Index> dims_;
    int time_mode_;
    std::vector<Index> flat_indices_;
    std::vector<double> values_;
};

/// Per-time-slice nonzero counts.
struct SliceCensus {
    std::vector<std::int64_t> counts;  // length I_t, zero-count slices included
    std::int64_t min_count = 0;
    std::int64_t max_count = 0;
};

/// Disjoint 8:1:1 train/validation/test partition of one tensor.
struct SplitDataset {
    SparseTensor train;
    SparseTensor validation;
    SparseTensor test;
    std::uint64_t split_seed = 0;
};

struct ZNormResult {
    SparseTensor tensor;
    double mean = 0.0;
    double stddev = 1.0;
};

/// Reads a delimited text file with n_modes index columns followed by one
/// value column. The delimiter is detected per line (comma, otherwise
/// whitespace); blank lines and lines starting with '#' are skipped. Mode
/// dimensionalities are set to the per-mode maximum index. When one_based is
/// false, indices are shifted up by one on input.
SparseTensor ingest(const std::filesystem::path& path, int n_modes,
                    int time_mode, bool one_based = true);

/// Writes entries back in the ingestion format (one-based indices).
void serialize(const SparseTensor& x, const std::filesystem::path& path,
               char delimiter = '\t');

/// Z-scores the observed values (population standard deviation) and returns
/// the statistics needed to invert the transformation.
ZNormResult z_normalize(const SparseTensor& x);

/// Deterministic seeded 8:1:1 split by uniform random permutation of the
/// entry order. Validation and test sizes are round(nnz/10).
SplitDataset split(const SparseTensor& x, std::uint64_t seed);

SliceCensus slice_census(const SparseTensor& x);

/// Two-column CSV: time_index,nonzero_count.
void write_census_csv(const SliceCensus& census, const std::filesystem::path& path);

/// Stable FNV-1a digest over dims, time mode and entries.
std::uint64_t fingerprint(const SparseTensor& x);

}  // namespace tatd
