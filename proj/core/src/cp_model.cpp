#include "tatd/cp_model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace tatd {

FactorModel::FactorModel(std::vector<Eigen::MatrixXd> factors, int time_mode)
    : factors_(std::move(factors)), time_mode_(time_mode) {
    if (factors_.empty()) throw ShapeError("model needs at least one factor");
    const auto k = factors_.front().cols();
    if (k < 1) throw ShapeError("rank must be positive");
    for (const auto& f : factors_)
        if (f.cols() != k) throw ShapeError("factor matrices disagree on rank");
    if (time_mode_ < 1 || time_mode_ > order())
        throw ShapeError("time mode " + std::to_string(time_mode_) +
                         " outside [1, " + std::to_string(order()) + "]");
}

FactorModel FactorModel::init(const std::vector<Index>& dims, int rank,
                              int time_mode, std::uint64_t seed) {
    if (rank < 1) throw ConfigError("rank must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0 / std::sqrt(rank));
    std::vector<Eigen::MatrixXd> factors;
    factors.reserve(dims.size());
    for (Index d : dims) {
        Eigen::MatrixXd f(d, rank);
        for (Index r = 0; r < d; ++r)
            for (int c = 0; c < rank; ++c) f(r, c) = dist(rng);
        factors.push_back(std::move(f));
    }
    return FactorModel(std::move(factors), time_mode);
}

std::vector<Index> FactorModel::dims() const {
    std::vector<Index> d;
    d.reserve(factors_.size());
    for (const auto& f : factors_) d.push_back(f.rows());
    return d;
}

bool FactorModel::matches(const SparseTensor& x) const {
    if (x.order() != order() || x.time_mode() != time_mode_) return false;
    for (int n = 1; n <= order(); ++n)
        if (factors_[n - 1].rows() != x.dims()[n - 1]) return false;
    return true;
}

double predict(const FactorModel& model, std::span<const Index> index) {
    const int n_modes = model.order();
    if (static_cast<int>(index.size()) != n_modes)
        throw IndexError("index tuple has " + std::to_string(index.size()) +
                         " components, model has " + std::to_string(n_modes) +
                         " modes");
    for (int n = 1; n <= n_modes; ++n) {
        if (index[n - 1] < 1 || index[n - 1] > model.factor(n).rows())
            throw IndexError("index " + std::to_string(index[n - 1]) +
                             " outside mode " + std::to_string(n) + " range [1, " +
                             std::to_string(model.factor(n).rows()) + "]");
    }
    Eigen::RowVectorXd p = model.factor(1).row(index[0] - 1);
    for (int n = 2; n <= n_modes; ++n)
        p.array() *= model.factor(n).row(index[n - 1] - 1).array();
    return p.sum();
}

namespace {

double fit_sse(const FactorModel& model, const SparseTensor& x) {
    double sse = 0.0;
    for (std::int64_t e = 0; e < x.nnz(); ++e) {
        const double r = x.value(e) - predict(model, x.index(e));
        sse += r * r;
    }
    return sse;
}

}  // namespace

LossBreakdown loss(const FactorModel& model, const SparseTensor& train,
                   const SmoothingSpec& spec, double lambda_t, double lambda_r) {
    if (!model.matches(train))
        throw ShapeError("model dimensions do not match the training tensor");
    if (spec.time_size() != train.time_size())
        throw ShapeError("smoothing tables built for a different time dimension");

    LossBreakdown out;
    out.fit_sse = fit_sse(model, train);

    const auto& at = model.time_factor();
    for (Index i = 1; i <= spec.time_size(); ++i) {
        const Eigen::RowVectorXd diff = at.row(i - 1) - smoothed_row(at, spec, i);
        out.smooth_term += lambda_t * spec.beta(i) * diff.squaredNorm();
    }

    for (int n = 1; n <= model.order(); ++n)
        if (n != model.time_mode())
            out.ridge_term += lambda_r * model.factor(n).squaredNorm();

    out.total = out.fit_sse + out.smooth_term + out.ridge_term;
    return out;
}

Metrics evaluate(const FactorModel& model, const SparseTensor& holdout) {
    if (holdout.nnz() == 0)
        throw EmptyEvaluationError("cannot evaluate on an empty entry set");
    if (!model.matches(holdout))
        throw ShapeError("model dimensions do not match the holdout tensor");

    double sse = 0.0, sae = 0.0;
    for (std::int64_t e = 0; e < holdout.nnz(); ++e) {
        const double r = holdout.value(e) - predict(model, holdout.index(e));
        sse += r * r;
        sae += std::abs(r);
    }
    const auto m = static_cast<double>(holdout.nnz());
    return {std::sqrt(sse / m), sae / m};
}

}  // namespace tatd
