#pragma once

#include <cstdint>
#include <vector>

#include "tatd/cp_model.hpp"
#include "tatd/sparse_tensor.hpp"

namespace tatd {

enum class TimeSignal { sinusoid, random_walk };
enum class DensityProfile { uniform, linear };

// Recipe for a synthetic temporal tensor with a smooth ground-truth time
// factor. The linear density profile scales the per-slice observation rate
// from 0.2x at the first slice to 1.8x at the last, keeping the mean rate.
struct SynthSpec {
    std::vector<Index> dims{50, 20, 15};
    int time_mode = 1;
    int true_rank = 3;
    TimeSignal signal = TimeSignal::sinusoid;
    double period = 12.0;     // sinusoid period in slices
    double walk_step = 0.1;   // random-walk step std
    double noise_std = 0.1;
    double rate = 0.3;        // observed fraction of cells
    DensityProfile profile = DensityProfile::uniform;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthResult {
    SparseTensor tensor;
    FactorModel truth;
};

// Deterministic per seed. Observed cells are drawn per time slice without
// replacement; entry values are truth reconstructions plus Gaussian noise.
SynthResult generate(const SynthSpec& spec);

}  // namespace tatd
