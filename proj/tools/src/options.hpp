#pragma once

#include <string>
#include <vector>

#include "tatd/optimizer.hpp"

namespace tatd::cli {

struct FitOptions {
    std::string data;
    int modes = 3;
    int time_mode = 1;
    bool zero_based = false;
    std::string strategy = "als_adam";
    TrainConfig config;
    bool export_smoothing = false;
    std::string out = "tatd_out";
};

struct PredictOptions {
    std::string model;
    std::string indices;
    std::string out;  // empty means stdout
    bool zero_based = false;
};

struct SweepOptions {
    std::string experiment;
    std::string out = "sweep_out";

    // generator
    std::vector<Index> dims{50, 20, 15};
    int time_mode = 1;
    int true_rank = 3;
    std::string signal = "sinusoid";
    double period = 12.0;
    double walk_step = 0.1;
    double noise_std = 0.1;
    double rate = 0.3;
    std::string profile = "uniform";
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

    // grids
    std::vector<double> rates{0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<double> lambdas{1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    std::vector<int> ranks{5, 10, 20, 30, 40, 50};

    // density experiment input
    std::string data;
    int modes = 3;
    bool zero_based = false;

    std::string strategy = "als_adam";
    TrainConfig config;
};

int run_fit(FitOptions opts);
int run_predict(const PredictOptions& opts);
int run_sweep(SweepOptions opts);

}  // namespace tatd::cli
