#include "tatd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "tatd/errors.hpp"

namespace tatd {

void SynthSpec::validate() const {
    if (dims.empty()) throw ConfigError("dims must be nonempty");
    for (auto d : dims)
        if (d < 1) throw ConfigError("every dimension must be >= 1");
    if (time_mode < 1 || time_mode > static_cast<int>(dims.size()))
        throw ConfigError("time_mode outside [1, " +
                          std::to_string(dims.size()) + "]");
    if (true_rank < 1) throw ConfigError("true_rank must be >= 1");
    if (period < 2.0) throw ConfigError("period must be >= 2");
    if (walk_step < 0.0) throw ConfigError("walk_step must be >= 0");
    if (noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
    if (!(rate > 0.0) || rate > 1.0) throw ConfigError("rate must be in (0, 1]");
}

namespace {

Eigen::MatrixXd time_factor(const SynthSpec& spec, std::mt19937_64& rng) {
    const auto rows = spec.dims[spec.time_mode - 1];
    Eigen::MatrixXd at(rows, spec.true_rank);
    if (spec.signal == TimeSignal::sinusoid) {
        std::uniform_real_distribution<double> level(0.5, 1.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (int k = 0; k < spec.true_rank; ++k) {
            const double c = level(rng);
            const double amp = level(rng);
            const double phi = phase(rng);
            for (Index i = 0; i < rows; ++i)
                at(i, k) = c + amp * std::sin(2.0 * std::numbers::pi *
                                                  static_cast<double>(i) /
                                                  spec.period +
                                              phi);
        }
    } else {
        std::uniform_real_distribution<double> start(0.5, 1.0);
        std::normal_distribution<double> step(0.0, 1.0);
        for (int k = 0; k < spec.true_rank; ++k) {
            at(0, k) = start(rng);
            for (Index i = 1; i < rows; ++i)
                at(i, k) = at(i - 1, k) + spec.walk_step * step(rng);
        }
    }
    return at;
}

// Per-slice observation rate under the chosen density profile, clamped to 1.
double slice_rate(const SynthSpec& spec, Index i, Index rows) {
    if (spec.profile == DensityProfile::uniform) return spec.rate;
    const double frac =
        rows > 1 ? static_cast<double>(i) / static_cast<double>(rows - 1) : 0.5;
    return std::min(1.0, spec.rate * (0.2 + 1.6 * frac));
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const int order = static_cast<int>(spec.dims.size());
    const Index time_rows = spec.dims[spec.time_mode - 1];

    std::vector<Eigen::MatrixXd> factors(order);
    factors[spec.time_mode - 1] = time_factor(spec, rng);
    const double cap = 1.0 / std::sqrt(static_cast<double>(spec.true_rank));
    std::uniform_real_distribution<double> unit(0.0, cap);
    for (int n = 1; n <= order; ++n) {
        if (n == spec.time_mode) continue;
        Eigen::MatrixXd f(spec.dims[n - 1], spec.true_rank);
        for (Index r = 0; r < f.rows(); ++r)
            for (int k = 0; k < spec.true_rank; ++k) f(r, k) = unit(rng);
        factors[n - 1] = std::move(f);
    }
    FactorModel truth(std::move(factors), spec.time_mode);

    // cells within one time slice, enumerated row-major over non-time modes
    Index slice_cells = 1;
    for (int n = 1; n <= order; ++n)
        if (n != spec.time_mode) slice_cells *= spec.dims[n - 1];

    std::vector<Index> cells(static_cast<std::size_t>(slice_cells));
    std::iota(cells.begin(), cells.end(), Index{0});

    std::vector<Index> flat;
    std::vector<Index> idx(static_cast<std::size_t>(order));
    for (Index i = 0; i < time_rows; ++i) {
        const auto want = static_cast<Index>(
            std::llround(slice_rate(spec, i, time_rows) *
                         static_cast<double>(slice_cells)));
        std::shuffle(cells.begin(), cells.end(), rng);
        std::vector<Index> chosen(cells.begin(), cells.begin() + want);
        std::sort(chosen.begin(), chosen.end());
        for (Index cell : chosen) {
            Index rest = cell;
            for (int n = order; n >= 1; --n) {
                if (n == spec.time_mode) {
                    idx[n - 1] = i + 1;
                    continue;
                }
                idx[n - 1] = rest % spec.dims[n - 1] + 1;
                rest /= spec.dims[n - 1];
            }
            flat.insert(flat.end(), idx.begin(), idx.end());
        }
    }
    const auto nnz = static_cast<std::int64_t>(flat.size()) / order;
    if (nnz == 0)
        throw InsufficientDataError("spec yields no observed cells");

    std::vector<double> values(static_cast<std::size_t>(nnz));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::int64_t e = 0; e < nnz; ++e) {
        const std::span<const Index> tuple(flat.data() + e * order,
                                           static_cast<std::size_t>(order));
        values[static_cast<std::size_t>(e)] =
            predict(truth, tuple) +
            (spec.noise_std > 0.0 ? spec.noise_std * noise(rng) : 0.0);
    }

    return {SparseTensor(spec.dims, spec.time_mode, std::move(flat),
                         std::move(values)),
            std::move(truth)};
}

}  // namespace tatd
