#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "tatd/cp_model.hpp"

namespace tatd {

// Normalization applied to the values before training; predictions are mapped
// back to the original scale with value * stddev + mean.
struct Normalization {
    double mean = 0.0;
    double stddev = 1.0;
};

struct Checkpoint {
    FactorModel model;
    std::optional<Normalization> normalization;
    std::uint64_t seed = 0;
};

// Writes one factor_<n>.tsv per mode plus a model.json manifest into `dir`,
// creating the directory if needed. Factor files round-trip doubles exactly.
void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& dir);

Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace tatd
