#include "tatd/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tatd/errors.hpp"

namespace tatd {

namespace {

std::string factor_file(int mode) {
    return "factor_" + std::to_string(mode) + ".tsv";
}

void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    char buf[64];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
            if (c > 0) out << '\t';
            out << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path, Eigen::Index rows,
                            Eigen::Index cols) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    Eigen::MatrixXd m(rows, cols);
    std::string line;
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            throw ParseError(path.string() + ": expected " +
                             std::to_string(rows) + " rows, got " +
                             std::to_string(r));
        std::istringstream fields(line);
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(fields >> m(r, c)))
                throw ParseError(path.string() + ": bad row " +
                                 std::to_string(r + 1));
    }
    return m;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto& model = checkpoint.model;

    nlohmann::json manifest;
    manifest["dims"] = nlohmann::json::array();
    std::vector<std::string> files;
    for (int n = 1; n <= model.order(); ++n) {
        const auto& factor = model.factor(n);
        manifest["dims"].push_back(factor.rows());
        files.push_back(factor_file(n));
        write_matrix(factor, dir / files.back());
    }
    manifest["rank"] = model.rank();
    manifest["time_mode"] = model.time_mode();
    manifest["seed"] = checkpoint.seed;
    manifest["factors"] = files;
    if (checkpoint.normalization) {
        manifest["normalization"] = {
            {"mean", checkpoint.normalization->mean},
            {"stddev", checkpoint.normalization->stddev}};
    } else {
        manifest["normalization"] = nullptr;
    }

    std::ofstream out(dir / "model.json");
    if (!out) throw IoError("cannot write " + (dir / "model.json").string());
    out << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "model.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot read " + manifest_path.string());

    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path.string() + ": " + e.what());
    }

    try {
        const auto dims = manifest.at("dims").get<std::vector<Eigen::Index>>();
        const auto rank = manifest.at("rank").get<int>();
        const auto time_mode = manifest.at("time_mode").get<int>();
        const auto files = manifest.at("factors").get<std::vector<std::string>>();
        if (files.size() != dims.size())
            throw ParseError(manifest_path.string() +
                             ": factor list does not match dims");

        std::vector<Eigen::MatrixXd> factors;
        factors.reserve(dims.size());
        for (std::size_t n = 0; n < dims.size(); ++n)
            factors.push_back(read_matrix(dir / files[n], dims[n], rank));

        Checkpoint ckpt{FactorModel(std::move(factors), time_mode), std::nullopt,
                        manifest.at("seed").get<std::uint64_t>()};
        if (!manifest.at("normalization").is_null()) {
            ckpt.normalization = Normalization{
                manifest["normalization"].at("mean").get<double>(),
                manifest["normalization"].at("stddev").get<double>()};
        }
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path.string() + ": " + e.what());
    }
}

}  // namespace tatd
