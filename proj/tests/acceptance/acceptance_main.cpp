// Acceptance gate: one line per criterion, process exit status equals the
// number of failed criteria. Each criterion also carries a wall-clock budget.
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fd_check.hpp"
#include "instances.hpp"
#include "oracles.hpp"
#include "tatd/cp_model.hpp"
#include "tatd/optimizer.hpp"
#include "tatd/smoothing.hpp"
#include "tatd/sweeps.hpp"

using namespace tatd;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

std::vector<Eigen::MatrixXd> factors_of(const FactorModel& m) {
    std::vector<Eigen::MatrixXd> out;
    for (int n = 1; n <= m.order(); ++n) out.push_back(m.factor(n));
    return out;
}

// Benchmark family shared by criteria 6 through 9.
SynthSpec bench_spec() {
    SynthSpec spec;
    spec.true_rank = 3;
    spec.period = 8.0;
    spec.noise_std = 0.1;
    return spec;
}

TrainConfig bench_config() {
    TrainConfig cfg;
    cfg.rank = 10;
    cfg.learning_rate = 0.05;
    cfg.max_outer = 80;
    cfg.patience_outer = 15;
    cfg.lambda_t = 10.0;
    cfg.window = 5;
    cfg.sigma = 1.0;
    return cfg;
}

constexpr std::array<std::uint64_t, 5> kSeeds = {0, 1, 2, 3, 4};

Outcome gradient_oracle() {
    std::mt19937_64 rng(2024);
    const double lambdas[3] = {0.0, 1.0, 100.0};
    double worst = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const auto inst = testing_support::random_instance(rng, 12, 5);
        const double lambda_t = lambdas[trial % 3];
        const FactorModel model(inst.factors, inst.time_mode);
        const auto spec =
            SmoothingSpec::build(inst.tensor.time_size(), inst.window,
                                 inst.sigma, slice_census(inst.tensor));
        const auto got = time_gradient(model, inst.tensor, spec, lambda_t);
        const auto want = testing_support::fd_gradient(
            inst.tensor, inst.factors, inst.time_mode, inst.time_mode,
            inst.window, inst.sigma, lambda_t, 0.0, true);
        worst = std::max(worst, testing_support::relative_error(got, want));
        ++checked;
    }
    return {checked >= 20 && worst <= 1e-4,
            fmt("%d instances, max relative error %.2e", checked, worst)};
}

Outcome closed_form_optimality() {
    std::mt19937_64 rng(2025);
    const double lambda_t = 1.0;
    const double lambda_r = 0.5;
    double worst_drop = 0.0;
    int perturbations = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto inst = testing_support::random_instance(rng, 8, 4);
        FactorModel model(inst.factors, inst.time_mode);
        std::vector<int> modes;
        for (int n = 1; n <= model.order(); ++n)
            if (n != inst.time_mode) modes.push_back(n);
        const int mode = modes[std::uniform_int_distribution<std::size_t>(
            0, modes.size() - 1)(rng)];
        rowwise_update(model, inst.tensor, mode, lambda_r);

        auto factors = factors_of(model);
        const double base = oracles::objective(
            inst.tensor, factors, inst.time_mode, inst.window, inst.sigma,
            lambda_t, lambda_r, true);
        auto& f = factors[static_cast<std::size_t>(mode - 1)];
        std::uniform_int_distribution<Eigen::Index> row_pick(0, f.rows() - 1);
        std::uniform_int_distribution<Eigen::Index> col_pick(0, f.cols() - 1);
        for (int p = 0; p < 200; ++p) {
            const Eigen::Index r = row_pick(rng);
            const Eigen::Index c = col_pick(rng);
            const double orig = f(r, c);
            f(r, c) = orig + (rng() % 2 ? 1e-4 : -1e-4);
            const double perturbed = oracles::objective(
                inst.tensor, factors, inst.time_mode, inst.window, inst.sigma,
                lambda_t, lambda_r, true);
            f(r, c) = orig;
            worst_drop = std::max(worst_drop, base - perturbed);
            ++perturbations;
        }
    }
    return {worst_drop <= 1e-9,
            fmt("%d perturbations, worst objective drop %.2e", perturbations,
                worst_drop)};
}

Outcome monotone_als() {
    std::mt19937_64 rng(2026);
    const double ridges[3] = {0.1, 0.5, 3.0};
    double worst_increase = -1e300;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = testing_support::random_instance(rng, 8, 4);
        const double lambda_r = ridges[trial % 3];
        FactorModel model(inst.factors, inst.time_mode);
        double before = oracles::objective(inst.tensor, factors_of(model),
                                           inst.time_mode, inst.window,
                                           inst.sigma, 1.0, lambda_r, true);
        for (int mode = 1; mode <= model.order(); ++mode) {
            if (mode == inst.time_mode) continue;
            rowwise_update(model, inst.tensor, mode, lambda_r);
            const double after = oracles::objective(
                inst.tensor, factors_of(model), inst.time_mode, inst.window,
                inst.sigma, 1.0, lambda_r, true);
            worst_increase = std::max(worst_increase, after - before);
            before = after;
        }
        ++checked;
    }
    return {checked == 100 && worst_increase <= 1e-9,
            fmt("%d instances, worst objective increase %.2e", checked,
                worst_increase)};
}

Outcome kernel_algebra() {
    double worst = 0.0;
    int rows = 0;
    for (Index time_size : {2, 3, 4, 7, 12, 40})
        for (int window : {3, 5, 9})
            for (double sigma : {0.25, 0.5, 1.0, 2.0}) {
                const auto spec =
                    SmoothingSpec::build_uniform(time_size, window, sigma);
                for (Index i = 1; i <= time_size; ++i) {
                    double sum = 0.0;
                    for (const auto& nb : spec.neighbors(i)) sum += nb.weight;
                    worst = std::max(worst, std::abs(sum - 1.0));
                    ++rows;
                }
            }

    bool endpoints_exact = true;
    const std::vector<std::vector<std::int64_t>> censuses = {
        {7, 2, 9, 4, 2}, {0, 5, 1}, {3, 3, 8, 1, 1, 6, 2}};
    for (const auto& counts : censuses) {
        SliceCensus census{counts,
                           *std::min_element(counts.begin(), counts.end()),
                           *std::max_element(counts.begin(), counts.end())};
        const auto betas = sparsity_penalties(census);
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (betas[i] < 0.001 || betas[i] > 0.999) endpoints_exact = false;
            if (counts[i] == census.min_count && betas[i] != 0.999)
                endpoints_exact = false;
            if (counts[i] == census.max_count && betas[i] != 0.001)
                endpoints_exact = false;
        }
    }
    return {worst <= 1e-12 && endpoints_exact,
            fmt("%d kernel rows, max |sum-1| %.2e, endpoint penalties exact: %s",
                rows, worst, endpoints_exact ? "yes" : "no")};
}

Outcome noiseless_recovery() {
    SynthSpec spec;
    spec.dims = {20, 10, 8};
    spec.true_rank = 3;
    spec.rate = 1.0;
    spec.noise_std = 0.0;
    spec.seed = 1;
    const auto data = generate(spec);
    const auto parts = split(data.tensor, 1);

    TrainConfig cfg;
    cfg.rank = 3;
    cfg.lambda_t = 0.0;
    cfg.lambda_r = 0.0;
    cfg.max_outer = 200;
    cfg.patience_outer = 200;
    const auto result = fit(parts.train, parts.validation, cfg);
    const double train_rmse = evaluate(result.model, parts.train).rmse;
    return {train_rmse < 1e-3, fmt("train rmse %.2e", train_rmse)};
}

Outcome sparsity_gap() {
    const auto spec = bench_spec();
    const auto cfg = bench_config();
    const std::array<double, 2> rates = {0.1, 0.9};
    const auto rows = sparsity_sweep(spec, cfg, rates, kSeeds);
    const double gap_sparse = rows[2].rmse - rows[0].rmse;
    const double gap_dense = rows[5].rmse - rows[3].rmse;
    const double advantage = gap_sparse / rows[2].rmse;
    return {gap_sparse > gap_dense && advantage >= 0.05,
            fmt("gap %.4f at 10%% vs %.4f at 90%%, sparse advantage %.1f%%",
                gap_sparse, gap_dense, 100.0 * advantage)};
}

Outcome penalty_u_shape() {
    auto spec = bench_spec();
    spec.rate = 0.2;
    const auto cfg = bench_config();
    const std::array<double, 6> lambdas = {1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3};
    int interior = 0;
    for (auto seed : kSeeds) {
        const std::array<std::uint64_t, 1> one = {seed};
        const auto rows = penalty_sweep(spec, cfg, lambdas, one);
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].rmse < rows[best].rmse) best = i;
        if (best >= 1 && best <= 4) ++interior;
    }
    return {interior >= 4, fmt("%d of 5 seeds with an interior minimum", interior)};
}

Outcome penalty_benefit() {
    auto spec = bench_spec();
    spec.profile = DensityProfile::linear;
    const auto cfg = bench_config();
    const std::array<double, 1> rates = {0.3};
    const auto rows = sparsity_sweep(spec, cfg, rates, kSeeds);
    const double full = rows[0].rmse;
    const double uniform = rows[1].rmse;
    return {full <= uniform * 1.005,
            fmt("sparsity-weighted %.4f vs uniform penalty %.4f", full, uniform)};
}

Outcome optimizer_tradeoff() {
    auto spec = bench_spec();
    TrainConfig cfg;
    cfg.rank = 3;
    cfg.learning_rate = 5e-3;
    cfg.max_outer = 200;
    cfg.patience_outer = 30;
    cfg.lambda_t = 10.0;
    cfg.window = 5;
    cfg.sigma = 1.0;
    const std::array<Strategy, 3> strategies = {Strategy::als_adam,
                                                Strategy::sgd,
                                                Strategy::alt_adam};
    double worst_vs_sgd = -1e300;
    double worst_vs_alt = -1e300;
    bool ok = true;
    for (std::uint64_t seed : {0, 1, 2}) {
        const auto rows = optimizer_comparison(spec, cfg, strategies, seed);
        const double als = rows[0].val_rmse;
        worst_vs_sgd = std::max(worst_vs_sgd, als - rows[1].val_rmse);
        worst_vs_alt = std::max(worst_vs_alt, als - rows[2].val_rmse * 1.02);
        if (als > rows[1].val_rmse || als > rows[2].val_rmse * 1.02) ok = false;
    }
    return {ok,
            fmt("3 seeds, worst margin vs sgd %.4f, vs alt_adam+2%% %.4f",
                worst_vs_sgd, worst_vs_alt)};
}

// fit_report.csv lines with the wall-clock column removed; timings are the
// only nondeterministic field in the report.
std::vector<std::string> report_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line.substr(0, line.rfind(',')));
    return lines;
}

Outcome cli_determinism() {
    testing_support::TempDir dir;
    const std::string base = std::string(TATD_CLI_PATH) + " fit --data " +
                             TATD_TOY_DATA +
                             " --modes 3 --time-mode 2 --rank 3 --max-outer 5"
                             " --threads 1 --seed 7 --out ";
    for (const char* sub : {"a", "b"}) {
        const std::string cmd =
            base + (dir.path() / sub).string() + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
            return {false, fmt("fit run '%s' failed", sub)};
    }
    const auto a = report_metrics(dir.path() / "a" / "fit_report.csv");
    const auto b = report_metrics(dir.path() / "b" / "fit_report.csv");
    return {a.size() >= 2 && a == b,
            fmt("%zu report lines identical across reruns", a.size())};
}

}  // namespace

int main() {
    int failures = 0;
    const auto run = [&](int number, const char* title, double budget_s,
                         Outcome (*body)()) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = body();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        const bool ok = out.ok && elapsed < budget_s;
        std::printf("%s criterion %2d: %s (%s) [%.1fs]\n",
                    ok ? "PASS" : "FAIL", number, title, out.detail.c_str(),
                    elapsed);
        std::fflush(stdout);
        if (!ok) ++failures;
    };

    run(1, "time gradient matches central finite differences", 30.0,
        gradient_oracle);
    run(2, "row updates are locally optimal under perturbation", 30.0,
        closed_form_optimality);
    run(3, "non-time update passes never increase the objective", 60.0,
        monotone_als);
    run(4, "kernel rows normalize and penalty endpoints are exact", 5.0,
        kernel_algebra);
    run(5, "noiseless fully observed tensor is recovered", 60.0,
        noiseless_recovery);
    run(6, "smoothing advantage grows as observations thin out", 600.0,
        sparsity_gap);
    run(7, "penalty strength has an interior sweet spot", 600.0,
        penalty_u_shape);
    run(8, "sparsity-weighted penalty beats a uniform one", 600.0,
        penalty_benefit);
    run(9, "hybrid strategy dominates sgd and alternating adam", 600.0,
        optimizer_tradeoff);
    run(10, "fit reports are deterministic across reruns", 60.0,
        cli_determinism);

    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria failed\n", failures);
    return failures;
}
