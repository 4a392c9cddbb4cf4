#include "tatd/sweeps.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "tatd/errors.hpp"

namespace tatd {

namespace {

constexpr std::array<std::string_view, 3> kMethodNames = {"tatd", "tatd_nopen",
                                                          "cp_als"};
constexpr std::array<Method, 3> kMethods = {Method::tatd, Method::tatd_nopen,
                                            Method::cp_als};

TrainConfig apply_method(TrainConfig config, Method method) {
    switch (method) {
        case Method::tatd:
            break;
        case Method::tatd_nopen:
            config.sparsity_penalty = false;
            break;
        case Method::cp_als:
            config.lambda_t = 0.0;
            break;
    }
    return config;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::span<const std::string_view> method_names() { return kMethodNames; }

std::string_view method_name(Method m) {
    return kMethodNames[static_cast<std::size_t>(m)];
}

CellResult run_cell(SynthSpec spec, TrainConfig config, Method method) {
    config = apply_method(config, method);
    auto [tensor, truth] = generate(spec);
    (void)truth;
    const auto normalized = z_normalize(tensor);
    const auto splits = split(normalized.tensor, config.seed);
    auto result = fit(splits.train, splits.validation, config);
    return {evaluate(result.model, splits.test), std::move(result.report)};
}

std::vector<SparsityRow> sparsity_sweep(SynthSpec spec, TrainConfig config,
                                        std::span<const double> rates,
                                        std::span<const std::uint64_t> seeds) {
    if (rates.empty() || seeds.empty())
        throw ConfigError("sparsity sweep needs at least one rate and seed");
    std::vector<SparsityRow> rows;
    for (double rate : rates) {
        spec.rate = rate;
        for (Method method : kMethods) {
            double rmse = 0.0;
            double mae = 0.0;
            for (auto seed : seeds) {
                spec.seed = seed;
                config.seed = seed;
                const auto cell = run_cell(spec, config, method);
                rmse += cell.test.rmse;
                mae += cell.test.mae;
            }
            const auto n = static_cast<double>(seeds.size());
            rows.push_back({rate, method, rmse / n, mae / n});
        }
    }
    return rows;
}

std::vector<PenaltyRow> penalty_sweep(SynthSpec spec, TrainConfig config,
                                      std::span<const double> lambdas,
                                      std::span<const std::uint64_t> seeds) {
    if (lambdas.empty() || seeds.empty())
        throw ConfigError("penalty sweep needs at least one lambda and seed");
    std::vector<PenaltyRow> rows;
    for (double lambda : lambdas) {
        config.lambda_t = lambda;
        double rmse = 0.0;
        for (auto seed : seeds) {
            spec.seed = seed;
            config.seed = seed;
            rmse += run_cell(spec, config, Method::tatd).test.rmse;
        }
        rows.push_back({lambda, rmse / static_cast<double>(seeds.size())});
    }
    return rows;
}

std::vector<RankRow> rank_sweep(SynthSpec spec, TrainConfig config,
                                std::span<const int> ranks,
                                std::span<const std::uint64_t> seeds) {
    if (ranks.empty() || seeds.empty())
        throw ConfigError("rank sweep needs at least one rank and seed");
    std::vector<RankRow> rows;
    for (int rank : ranks) {
        config.rank = rank;
        for (Method method : kMethods) {
            double rmse = 0.0;
            for (auto seed : seeds) {
                spec.seed = seed;
                config.seed = seed;
                rmse += run_cell(spec, config, method).test.rmse;
            }
            rows.push_back({rank, method, rmse / static_cast<double>(seeds.size())});
        }
    }
    return rows;
}

std::vector<StrategyRow> optimizer_comparison(SynthSpec spec, TrainConfig config,
                                              std::span<const Strategy> strategies,
                                              std::uint64_t seed) {
    if (strategies.empty())
        throw ConfigError("optimizer comparison needs at least one strategy");
    spec.seed = seed;
    config.seed = seed;

    auto [tensor, truth] = generate(spec);
    (void)truth;
    const auto normalized = z_normalize(tensor);
    const auto splits = split(normalized.tensor, seed);

    using Clock = std::chrono::steady_clock;
    std::vector<StrategyRow> rows;
    double budget = config.max_seconds;
    for (Strategy s : strategies) {
        TrainConfig cfg = config;
        cfg.strategy = s;
        if (rows.empty()) {
            // the first strategy sets the wall-clock budget for the rest
        } else {
            cfg.max_seconds = budget;
            cfg.max_outer = std::max(cfg.max_outer, 1000000);
        }
        const auto t0 = Clock::now();
        auto result = fit(splits.train, splits.validation, cfg);
        const double secs =
            std::chrono::duration<double>(Clock::now() - t0).count();
        if (rows.empty()) budget = secs;
        const auto test = evaluate(result.model, splits.test);
        rows.push_back({s, result.report.best_val_rmse, test.rmse, test.mae,
                        static_cast<int>(result.report.records.size()), secs});
    }
    return rows;
}

void write_sparsity_csv(std::span<const SparsityRow> rows,
                        const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "rate,method,rmse,mae\n";
    for (const auto& r : rows)
        out << fmt(r.rate) << ',' << method_name(r.method) << ',' << fmt(r.rmse)
            << ',' << fmt(r.mae) << '\n';
}

void write_penalty_csv(std::span<const PenaltyRow> rows,
                       const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "lambda_t,rmse\n";
    for (const auto& r : rows)
        out << fmt(r.lambda_t) << ',' << fmt(r.rmse) << '\n';
}

void write_rank_csv(std::span<const RankRow> rows,
                    const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "rank,method,rmse\n";
    for (const auto& r : rows)
        out << r.rank << ',' << method_name(r.method) << ',' << fmt(r.rmse)
            << '\n';
}

void write_strategy_csv(std::span<const StrategyRow> rows,
                        const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "strategy,val_rmse,test_rmse,test_mae,outer_iterations,seconds\n";
    for (const auto& r : rows)
        out << strategy_name(r.strategy) << ',' << fmt(r.val_rmse) << ','
            << fmt(r.test_rmse) << ',' << fmt(r.test_mae) << ','
            << r.outer_iterations << ',' << fmt(r.seconds) << '\n';
}

}  // namespace tatd
