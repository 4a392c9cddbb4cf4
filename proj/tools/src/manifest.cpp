#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "tatd/errors.hpp"

namespace tatd::cli {

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void write_manifest(RunManifest manifest, const std::filesystem::path& dir) {
    manifest.artifacts.push_back("run_manifest.json");

    nlohmann::json j;
    j["command"] = manifest.command;
    j["created_utc"] = utc_now();
    j["config"] = manifest.config;
    j["data"] = manifest.data;
    j["artifacts"] = manifest.artifacts;

    const auto path = dir / "run_manifest.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

nlohmann::json data_summary(const SparseTensor& x, const std::string& source) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fingerprint(x)));
    return {{"source", source},
            {"entries", x.nnz()},
            {"dims", x.dims()},
            {"time_mode", x.time_mode()},
            {"fingerprint", hex}};
}

}  // namespace tatd::cli
