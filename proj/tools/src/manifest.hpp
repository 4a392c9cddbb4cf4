#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tatd/sparse_tensor.hpp"

namespace tatd::cli {

// Provenance record for one command invocation. Every file the command
// writes, including the manifest itself, appears in `artifacts` relative to
// the output directory.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json data = nlohmann::json::object();
    std::vector<std::string> artifacts;
};

void write_manifest(RunManifest manifest, const std::filesystem::path& dir);

nlohmann::json data_summary(const SparseTensor& x, const std::string& source);

}  // namespace tatd::cli
