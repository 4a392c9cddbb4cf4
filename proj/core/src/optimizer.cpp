#include "tatd/optimizer.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "tatd/parallel.hpp"

namespace tatd {

namespace {

constexpr std::array<std::string_view, 5> kStrategyNames = {
    "als_adam", "adam", "sgd", "als_sgd", "alt_adam"};

}  // namespace

std::span<const std::string_view> strategy_names() { return kStrategyNames; }

std::string_view strategy_name(Strategy s) {
    return kStrategyNames[static_cast<std::size_t>(s)];
}

Strategy parse_strategy(std::string_view name) {
    for (std::size_t i = 0; i < kStrategyNames.size(); ++i)
        if (kStrategyNames[i] == name) return static_cast<Strategy>(i);
    std::string msg = "unknown strategy '" + std::string(name) + "'; valid:";
    for (auto n : kStrategyNames) msg += " " + std::string(n);
    throw ConfigError(msg);
}

void TrainConfig::validate() const {
    if (lambda_t < 0.0) throw ConfigError("lambda_t must be >= 0");
    if (lambda_r < 0.0) throw ConfigError("lambda_r must be >= 0");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be > 0");
    if (rank < 1) throw ConfigError("rank must be >= 1");
    if (window < 3 || window % 2 == 0)
        throw ConfigError("window must be an odd integer >= 3, got " +
                          std::to_string(window));
    if (sigma <= 0.0) throw ConfigError("sigma must be > 0");
    if (max_outer < 0) throw ConfigError("max_outer must be >= 0");
    if (max_inner < 1) throw ConfigError("max_inner must be >= 1");
    if (patience_outer < 1) throw ConfigError("patience_outer must be >= 1");
    if (max_seconds < 0.0) throw ConfigError("max_seconds must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

void write_report_csv(const FitReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "iteration,train_rmse,val_rmse,val_mae,inner_epochs,seconds\n";
    char buf[256];
    for (const auto& r : report.records) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d,%.6f\n",
                      r.iteration, r.train_rmse, r.val_rmse, r.val_mae,
                      r.inner_epochs, r.seconds);
        out << buf;
    }
}

ModeSlices::ModeSlices(const SparseTensor& x, int mode) : mode_(mode) {
    if (mode < 1 || mode > x.order())
        throw ConfigError("mode " + std::to_string(mode) + " outside [1, " +
                          std::to_string(x.order()) + "]");
    const auto dim = static_cast<std::size_t>(x.dims()[mode - 1]);
    const auto m = x.nnz();
    std::vector<std::size_t> counts(dim, 0);
    for (std::int64_t e = 0; e < m; ++e)
        ++counts[static_cast<std::size_t>(x.index(e)[mode - 1] - 1)];
    offsets_.assign(dim + 1, 0);
    for (std::size_t i = 0; i < dim; ++i) offsets_[i + 1] = offsets_[i] + counts[i];
    ids_.resize(static_cast<std::size_t>(m));
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::int64_t e = 0; e < m; ++e) {
        const auto i = static_cast<std::size_t>(x.index(e)[mode - 1] - 1);
        ids_[cursor[i]++] = e;
    }
}

namespace {

// Entry-wise product of the factor rows of all modes except `skip`, as a
// column vector of length K.
inline void gather_product(const FactorModel& model, std::span<const Index> idx,
                           int skip, Eigen::VectorXd& p) {
    p.setOnes();
    for (int l = 1; l <= model.order(); ++l)
        if (l != skip)
            p.array() *= model.factor(l).row(idx[l - 1] - 1).transpose().array();
}

std::vector<double> residuals(const FactorModel& model, const SparseTensor& x,
                              int threads) {
    std::vector<double> r(static_cast<std::size_t>(x.nnz()));
    parallel_for(x.nnz(), threads, [&](std::int64_t e) {
        r[static_cast<std::size_t>(e)] = x.value(e) - predict(model, x.index(e));
    });
    return r;
}

void check_finite(const Eigen::MatrixXd& gradient, const char* where) {
    if (!gradient.allFinite())
        throw DivergenceError(std::string("non-finite gradient in ") + where);
}

}  // namespace

void rowwise_update(FactorModel& model, const SparseTensor& train, int mode,
                    double lambda_r, const ModeSlices* slices, int threads) {
    if (!model.matches(train))
        throw ShapeError("model dimensions do not match the training tensor");
    if (mode < 1 || mode > model.order())
        throw ConfigError("mode " + std::to_string(mode) + " outside [1, " +
                          std::to_string(model.order()) + "]");
    if (mode == model.time_mode())
        throw ConfigError("row-wise update applies to non-time modes only");

    std::optional<ModeSlices> local;
    if (slices == nullptr) local.emplace(train, mode);
    const ModeSlices& sl = slices ? *slices : *local;
    if (sl.mode() != mode)
        throw ConfigError("mode slices were built for a different mode");

    const int rank = model.rank();
    auto& factor = model.factor(mode);

    parallel_for(factor.rows(), threads, [&](std::int64_t r) {
        const auto ids = sl.entries(r + 1);
        if (ids.empty()) {
            // ridge limit for an empty data term
            factor.row(r).setZero();
            return;
        }
        Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(rank, rank);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rank);
        Eigen::VectorXd p(rank);
        for (std::int64_t e : ids) {
            gather_product(model, train.index(e), mode, p);
            normal.noalias() += p * p.transpose();
            rhs.noalias() += train.value(e) * p;
        }
        normal.diagonal().array() += lambda_r;
        Eigen::LLT<Eigen::MatrixXd> llt(normal);
        if (llt.info() != Eigen::Success)
            throw SingularUpdateError("singular normal system at mode " +
                                      std::to_string(mode) + " row " +
                                      std::to_string(r + 1));
        factor.row(r) = llt.solve(rhs).transpose();
    });
}

Eigen::MatrixXd time_gradient(const FactorModel& model, const SparseTensor& train,
                              const SmoothingSpec& spec, double lambda_t,
                              const ModeSlices* slices, int threads) {
    return mode_gradient(model, train, spec, model.time_mode(), lambda_t, 0.0,
                         slices, threads);
}

Eigen::MatrixXd mode_gradient(const FactorModel& model, const SparseTensor& train,
                              const SmoothingSpec& spec, int mode, double lambda_t,
                              double lambda_r, const ModeSlices* slices,
                              int threads) {
    if (!model.matches(train))
        throw ShapeError("model dimensions do not match the training tensor");
    if (spec.time_size() != train.time_size())
        throw ShapeError("smoothing tables built for a different time dimension");
    if (mode < 1 || mode > model.order())
        throw ConfigError("mode " + std::to_string(mode) + " outside [1, " +
                          std::to_string(model.order()) + "]");

    std::optional<ModeSlices> local;
    if (slices == nullptr) local.emplace(train, mode);
    const ModeSlices& sl = slices ? *slices : *local;
    if (sl.mode() != mode)
        throw ConfigError("mode slices were built for a different mode");

    const bool is_time = mode == model.time_mode();
    const int rank = model.rank();
    const auto& factor = model.factor(mode);
    const auto resid = residuals(model, train, threads);

    // smoothing residual rows a_i - a~_i, needed only for the time mode
    Eigen::MatrixXd smooth_resid;
    if (is_time) {
        const auto& at = model.time_factor();
        smooth_resid.resize(at.rows(), rank);
        parallel_for(at.rows(), threads, [&](std::int64_t r) {
            smooth_resid.row(r) = at.row(r) - smoothed_row(at, spec, r + 1);
        });
    }

    Eigen::MatrixXd grad(factor.rows(), rank);
    parallel_for(factor.rows(), threads, [&](std::int64_t r) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(rank);
        Eigen::VectorXd p(rank);
        for (std::int64_t e : sl.entries(r + 1)) {
            gather_product(model, train.index(e), mode, p);
            g.noalias() -= 2.0 * resid[static_cast<std::size_t>(e)] * p;
        }
        grad.row(r) = g.transpose();
        if (is_time) {
            const Index i = r + 1;
            grad.row(r) += 2.0 * lambda_t * spec.beta(i) * smooth_resid.row(r);
            for (const auto& nb : spec.incoming(i))
                grad.row(r) -= 2.0 * lambda_t * spec.beta(nb.index) * nb.weight *
                               smooth_resid.row(nb.index - 1);
        } else {
            grad.row(r) += 2.0 * lambda_r * factor.row(r);
        }
    });
    return grad;
}

void adam_step(Eigen::MatrixXd& factor, const Eigen::MatrixXd& gradient,
               AdamState& state, double learning_rate) {
    if (factor.rows() != gradient.rows() || factor.cols() != gradient.cols() ||
        factor.rows() != state.m.rows() || factor.cols() != state.m.cols())
        throw ShapeError("factor, gradient and moment shapes disagree");
    check_finite(gradient, "adaptive-moment step");

    state.step += 1;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
    state.v.array() = state.beta2 * state.v.array() +
                      (1.0 - state.beta2) * gradient.array().square();
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    factor.array() -= learning_rate * (state.m.array() / bc1) /
                      ((state.v.array() / bc2).sqrt() + state.epsilon);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

class FitDriver {
public:
    FitDriver(const SparseTensor& train, const SparseTensor& validation,
              const TrainConfig& cfg)
        : train_(train),
          val_(validation),
          cfg_(cfg),
          spec_(cfg.sparsity_penalty
                    ? SmoothingSpec::build(train.time_size(), cfg.window, cfg.sigma,
                                           slice_census(train))
                    : SmoothingSpec::build_uniform(train.time_size(), cfg.window,
                                                   cfg.sigma)),
          model_(FactorModel::init(train.dims(), cfg.rank, train.time_mode(),
                                   cfg.seed)),
          best_(model_) {
        for (int n = 1; n <= train_.order(); ++n) slices_.emplace_back(train_, n);
        const bool per_mode_adam =
            cfg_.strategy == Strategy::adam || cfg_.strategy == Strategy::alt_adam;
        for (int n = 1; n <= train_.order(); ++n) {
            if (per_mode_adam || (cfg_.strategy == Strategy::als_adam &&
                                  n == train_.time_mode()))
                adam_.emplace_back(model_.factor(n).rows(), cfg_.rank);
            else
                adam_.emplace_back(0, cfg_.rank);  // unused placeholder
        }
    }

    FitResult run() {
        const auto t_start = Clock::now();
        FitReport report;
        double prev_val = std::numeric_limits<double>::infinity();
        double best_val = std::numeric_limits<double>::infinity();
        int best_iter = 0;
        int consecutive_increases = 0;
        std::string reason;

        for (int iter = 1; iter <= cfg_.max_outer; ++iter) {
            const auto t0 = Clock::now();
            const int inner = one_iteration();
            const double train_rmse = evaluate(model_, train_).rmse;
            const Metrics val = evaluate(model_, val_);
            if (!std::isfinite(train_rmse) || !std::isfinite(val.rmse))
                throw DivergenceError("non-finite loss at outer iteration " +
                                      std::to_string(iter));
            report.records.push_back({iter, train_rmse, val.rmse, val.mae, inner,
                                      seconds_since(t0)});
            if (val.rmse < best_val) {
                best_val = val.rmse;
                best_iter = iter;
                best_ = model_;
            }
            if (val.rmse > prev_val) {
                if (++consecutive_increases >= cfg_.patience_outer) {
                    reason = "patience";
                }
            } else {
                consecutive_increases = 0;
            }
            prev_val = val.rmse;
            if (!reason.empty()) break;
            if (cfg_.max_seconds > 0.0 &&
                seconds_since(t_start) >= cfg_.max_seconds) {
                reason = "time_budget";
                break;
            }
        }
        if (reason.empty()) reason = "max_outer";
        report.best_iteration = best_iter;
        report.best_val_rmse = best_val;
        report.stopping_reason = reason;
        return {std::move(best_), std::move(report)};
    }

private:
    int one_iteration() {
        switch (cfg_.strategy) {
            case Strategy::als_adam:
            case Strategy::als_sgd: {
                int inner = 0;
                for (int n = 1; n <= train_.order(); ++n) {
                    if (n == train_.time_mode())
                        inner += gradient_epochs(n, /*use_adam=*/cfg_.strategy ==
                                                 Strategy::als_adam);
                    else
                        rowwise_update(model_, train_, n, cfg_.lambda_r,
                                       &slices_[n - 1], cfg_.threads);
                }
                return inner;
            }
            case Strategy::alt_adam: {
                int inner = 0;
                for (int n = 1; n <= train_.order(); ++n)
                    inner += gradient_epochs(n, /*use_adam=*/true);
                return inner;
            }
            case Strategy::adam:
            case Strategy::sgd: {
                joint_step(cfg_.strategy == Strategy::adam);
                return 1;
            }
        }
        return 0;
    }

    // Full-gradient epochs on one factor until the validation RMSE rises or
    // the epoch cap is reached.
    int gradient_epochs(int mode, bool use_adam) {
        int epochs = 0;
        double prev = evaluate(model_, val_).rmse;
        while (epochs < cfg_.max_inner) {
            const Eigen::MatrixXd g =
                mode_gradient(model_, train_, spec_, mode, cfg_.lambda_t,
                              cfg_.lambda_r, &slices_[mode - 1], cfg_.threads);
            if (use_adam) {
                adam_step(model_.factor(mode), g, adam_[mode - 1],
                          cfg_.learning_rate);
            } else {
                check_finite(g, "gradient step");
                model_.factor(mode) -= cfg_.learning_rate * g;
            }
            ++epochs;
            const double cur = evaluate(model_, val_).rmse;
            if (cur > prev) break;
            prev = cur;
        }
        return epochs;
    }

    // One joint full-gradient step over all factor matrices; all gradients
    // are taken at the same point before any factor moves.
    void joint_step(bool use_adam) {
        std::vector<Eigen::MatrixXd> grads;
        grads.reserve(train_.order());
        for (int n = 1; n <= train_.order(); ++n)
            grads.push_back(mode_gradient(model_, train_, spec_, n, cfg_.lambda_t,
                                          cfg_.lambda_r, &slices_[n - 1],
                                          cfg_.threads));
        for (int n = 1; n <= train_.order(); ++n) {
            if (use_adam) {
                adam_step(model_.factor(n), grads[n - 1], adam_[n - 1],
                          cfg_.learning_rate);
            } else {
                check_finite(grads[n - 1], "gradient step");
                model_.factor(n) -= cfg_.learning_rate * grads[n - 1];
            }
        }
    }

    const SparseTensor& train_;
    const SparseTensor& val_;
    const TrainConfig& cfg_;
    SmoothingSpec spec_;
    FactorModel model_;
    FactorModel best_;
    std::vector<ModeSlices> slices_;
    std::vector<AdamState> adam_;
};

}  // namespace

FitResult fit(const SparseTensor& train, const SparseTensor& validation,
              const TrainConfig& config) {
    config.validate();
    if (train.dims() != validation.dims() ||
        train.time_mode() != validation.time_mode())
        throw ShapeError("training and validation splits disagree on shape");
    if (train.nnz() == 0) throw InsufficientDataError("empty training split");
    if (validation.nnz() == 0)
        throw EmptyEvaluationError("empty validation split");

    FitDriver driver(train, validation, config);
    return driver.run();
}

}  // namespace tatd
