#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "options.hpp"
#include "tatd/checkpoint.hpp"
#include "tatd/errors.hpp"

namespace tatd::cli {

namespace {

std::vector<Index> parse_row(const std::string& line, int n_modes,
                             bool zero_based) {
    std::string normalized = line;
    for (char& c : normalized)
        if (c == ',') c = ' ';
    std::istringstream fields(normalized);
    std::vector<Index> idx;
    long long v = 0;
    while (fields >> v) idx.push_back(static_cast<Index>(v));
    if (!fields.eof()) throw ParseError("non-integer field");
    if (static_cast<int>(idx.size()) != n_modes)
        throw ParseError("expected " + std::to_string(n_modes) +
                         " indices, got " + std::to_string(idx.size()));
    if (zero_based)
        for (auto& i : idx) ++i;
    return idx;
}

}  // namespace

int run_predict(const PredictOptions& opts) {
    const auto ckpt = load_checkpoint(opts.model);
    const double mean = ckpt.normalization ? ckpt.normalization->mean : 0.0;
    const double stddev = ckpt.normalization ? ckpt.normalization->stddev : 1.0;

    std::ifstream in(opts.indices);
    if (!in) throw IoError("cannot read " + opts.indices);

    std::ofstream file;
    if (!opts.out.empty()) {
        file.open(opts.out);
        if (!file) throw IoError("cannot write " + opts.out);
    }
    std::ostream& out = opts.out.empty() ? std::cout : file;

    bool any_failed = false;
    std::string line;
    int line_no = 0;
    char buf[64];
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        try {
            const auto idx = parse_row(line, ckpt.model.order(), opts.zero_based);
            const double value = predict(ckpt.model, idx) * stddev + mean;
            std::snprintf(buf, sizeof(buf), "%.17g", value);
            out << buf << '\n';
        } catch (const Error& e) {
            out << "error line " << line_no << ": " << e.what() << '\n';
            any_failed = true;
        }
    }
    return any_failed ? 1 : 0;
}

}  // namespace tatd::cli
