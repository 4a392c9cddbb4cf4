#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "instances.hpp"
#include "tatd/errors.hpp"
#include "tatd/smoothing.hpp"
#include "tatd/sweeps.hpp"

using namespace tatd;

namespace {

SynthSpec bench_spec() {
    SynthSpec spec;
    spec.dims = {12, 8, 6};
    spec.true_rank = 2;
    spec.rate = 0.6;
    spec.noise_std = 0.05;
    return spec;
}

TrainConfig quick_config() {
    TrainConfig cfg;
    cfg.rank = 3;
    cfg.max_outer = 10;
    cfg.lambda_t = 1.0;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("method names are stable") {
    REQUIRE(method_names().size() == 3);
    CHECK(method_name(Method::tatd) == "tatd");
    CHECK(method_name(Method::tatd_nopen) == "tatd_nopen");
    CHECK(method_name(Method::cp_als) == "cp_als");
}

TEST_CASE("run_cell trains and scores one configuration") {
    const auto cell = run_cell(bench_spec(), quick_config(), Method::tatd);
    CHECK(std::isfinite(cell.test.rmse));
    CHECK(std::isfinite(cell.test.mae));
    CHECK(cell.test.mae <= cell.test.rmse + 1e-12);
    CHECK(!cell.report.records.empty());
}

TEST_CASE("run_cell handles linear density and alternate time modes") {
    auto spec = bench_spec();
    spec.dims = {8, 10, 6};
    spec.time_mode = 2;
    spec.profile = DensityProfile::linear;
    const auto cell = run_cell(spec, quick_config(), Method::tatd);
    CHECK(std::isfinite(cell.test.rmse));
}

TEST_CASE("dropping the penalty equals configuring beta to one") {
    auto cfg = quick_config();
    const auto a = run_cell(bench_spec(), cfg, Method::tatd_nopen);
    cfg.sparsity_penalty = false;
    const auto b = run_cell(bench_spec(), cfg, Method::tatd);
    CHECK(a.test.rmse == b.test.rmse);
    CHECK(a.test.mae == b.test.mae);
}

TEST_CASE("the zero-lambda penalty cell reproduces plain CP") {
    const std::array<double, 1> lambdas{0.0};
    const std::array<std::uint64_t, 1> seeds{3};
    auto spec = bench_spec();
    auto cfg = quick_config();
    const auto rows = penalty_sweep(spec, cfg, lambdas, seeds);
    REQUIRE(rows.size() == 1);
    spec.seed = 3;
    cfg.seed = 3;
    const auto cp = run_cell(spec, cfg, Method::cp_als);
    CHECK(rows[0].lambda_t == 0.0);
    CHECK(rows[0].rmse == cp.test.rmse);
}

TEST_CASE("rank-adequate noiseless data is fit to near zero error") {
    SynthSpec spec;
    spec.dims = {20, 10, 8};
    spec.true_rank = 3;
    spec.rate = 1.0;
    spec.noise_std = 0.0;
    TrainConfig cfg;
    cfg.rank = 3;
    cfg.lambda_t = 0.0;
    cfg.lambda_r = 0.0;
    cfg.max_outer = 200;
    cfg.patience_outer = 200;
    const auto data = generate(spec);
    const auto splits = split(data.tensor, cfg.seed);
    const auto result = fit(splits.train, splits.validation, cfg);
    CHECK(evaluate(result.model, splits.train).rmse < 1e-3);
    CHECK(evaluate(result.model, splits.test).rmse < 1e-3);
}

TEST_CASE("an extreme smoothing penalty flattens the time factor onto its smoothed image") {
    auto spec = bench_spec();
    const auto data = generate(spec);
    const auto normalized = z_normalize(data.tensor);
    const auto splits = split(normalized.tensor, 0);

    TrainConfig cfg;
    cfg.rank = 2;
    cfg.lambda_t = 1e6;
    cfg.learning_rate = 2e-3;
    cfg.max_inner = 2000;
    cfg.max_outer = 50;
    cfg.patience_outer = 50;
    const auto result = fit(splits.train, splits.validation, cfg);

    const auto smoothing = SmoothingSpec::build(
        splits.train.time_size(), cfg.window, cfg.sigma,
        slice_census(splits.train));
    const auto& at = result.model.time_factor();
    double worst = 0.0;
    for (Index i = 1; i <= smoothing.time_size(); ++i) {
        const auto target = smoothed_row(at, smoothing, i);
        worst = std::max(worst, (at.row(i - 1) - target).norm());
    }
    CHECK(worst < 1e-2);
}

TEST_CASE("denser observations do not hurt test accuracy") {
    auto spec = bench_spec();
    spec.dims = {10, 6, 5};
    spec.noise_std = 0.1;
    auto cfg = quick_config();
    cfg.rank = 3;
    cfg.max_outer = 15;
    const std::array<double, 2> rates{0.25, 0.9};
    const std::array<std::uint64_t, 3> seeds{0, 1, 2};
    const auto rows = sparsity_sweep(spec, cfg, rates, seeds);
    REQUIRE(rows.size() == 6);
    // rows come out rate-major in method declaration order
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(rows[3 * r].method == Method::tatd);
        CHECK(rows[3 * r + 1].method == Method::tatd_nopen);
        CHECK(rows[3 * r + 2].method == Method::cp_als);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(rows[3 * r + k].rate == rates[r]);
    }
    CHECK(rows[3].rmse <= rows[0].rmse * 1.02);
}

TEST_CASE("sweeps are deterministic end to end") {
    auto spec = bench_spec();
    auto cfg = quick_config();
    cfg.max_outer = 5;
    const std::array<double, 1> rates{0.5};
    const std::array<std::uint64_t, 2> seeds{0, 1};
    const auto a = sparsity_sweep(spec, cfg, rates, seeds);
    const auto b = sparsity_sweep(spec, cfg, rates, seeds);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rmse == b[i].rmse);
        CHECK(a[i].mae == b[i].mae);
    }

    const std::array<int, 2> ranks{2, 3};
    const auto ra = rank_sweep(spec, cfg, ranks, seeds);
    const auto rb = rank_sweep(spec, cfg, ranks, seeds);
    REQUIRE(ra.size() == 6);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].rank == rb[i].rank);
        CHECK(ra[i].rmse == rb[i].rmse);
    }
}

TEST_CASE("the optimizer comparison grants a shared budget") {
    auto spec = bench_spec();
    auto cfg = quick_config();
    cfg.max_outer = 3;
    const std::array<Strategy, 2> strategies{Strategy::als_adam, Strategy::sgd};
    const auto rows = optimizer_comparison(spec, cfg, strategies, 0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].strategy == Strategy::als_adam);
    CHECK(rows[1].strategy == Strategy::sgd);
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.val_rmse));
        CHECK(std::isfinite(r.test_rmse));
        CHECK(r.outer_iterations >= 1);
        CHECK(r.seconds > 0.0);
    }
}

TEST_CASE("empty grids are configuration errors") {
    const auto spec = bench_spec();
    const auto cfg = quick_config();
    const std::array<std::uint64_t, 1> seeds{0};
    const std::array<double, 1> rates{0.5};
    CHECK_THROWS_AS(sparsity_sweep(spec, cfg, {}, seeds), ConfigError);
    CHECK_THROWS_AS(sparsity_sweep(spec, cfg, rates, {}), ConfigError);
    CHECK_THROWS_AS(penalty_sweep(spec, cfg, {}, seeds), ConfigError);
    CHECK_THROWS_AS(rank_sweep(spec, cfg, {}, seeds), ConfigError);
    CHECK_THROWS_AS(optimizer_comparison(spec, cfg, {}, 0), ConfigError);
}

TEST_CASE("sweep tables are written with exact cell text") {
    testing_support::TempDir tmp;

    const std::vector<SparsityRow> sr{{0.5, Method::tatd, 0.25, 0.125}};
    write_sparsity_csv(sr, tmp.path() / "s.csv");
    CHECK(slurp(tmp.path() / "s.csv") ==
          "rate,method,rmse,mae\n0.5,tatd,0.25,0.125\n");

    const std::vector<PenaltyRow> pr{{10.0, 0.5}, {100.0, 0.75}};
    write_penalty_csv(pr, tmp.path() / "p.csv");
    CHECK(slurp(tmp.path() / "p.csv") == "lambda_t,rmse\n10,0.5\n100,0.75\n");

    const std::vector<RankRow> rr{{5, Method::cp_als, 1.5}};
    write_rank_csv(rr, tmp.path() / "r.csv");
    CHECK(slurp(tmp.path() / "r.csv") == "rank,method,rmse\n5,cp_als,1.5\n");

    const std::vector<StrategyRow> tr{{Strategy::sgd, 0.5, 0.25, 0.125, 7, 1.5}};
    write_strategy_csv(tr, tmp.path() / "t.csv");
    CHECK(slurp(tmp.path() / "t.csv") ==
          "strategy,val_rmse,test_rmse,test_mae,outer_iterations,seconds\n"
          "sgd,0.5,0.25,0.125,7,1.5\n");
}
