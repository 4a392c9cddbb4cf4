#include "tatd/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace tatd {

namespace {

bool tuple_less(std::span<const Index> a, std::span<const Index> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string tuple_to_string(std::span<const Index> idx) {
    std::string s = "(";
    for (std::size_t n = 0; n < idx.size(); ++n) {
        if (n > 0) s += ",";
        s += std::to_string(idx[n]);
    }
    s += ")";
    return s;
}

}  // namespace

SparseTensor::SparseTensor(std::vector<Index> dims, int time_mode,
                           std::vector<Index> flat_indices,
                           std::vector<double> values)
    : dims_(std::move(dims)),
      time_mode_(time_mode),
      flat_indices_(std::move(flat_indices)),
      values_(std::move(values)) {
    const int n = order();
    if (n < 1) throw ShapeError("tensor must have at least one mode");
    for (int m = 0; m < n; ++m) {
        if (dims_[m] < 1)
            throw ShapeError("mode " + std::to_string(m + 1) +
                             " has non-positive dimensionality");
    }
    if (time_mode_ < 1 || time_mode_ > n)
        throw ShapeError("time mode " + std::to_string(time_mode_) +
                         " outside [1, " + std::to_string(n) + "]");
    if (flat_indices_.size() != values_.size() * static_cast<std::size_t>(n))
        throw ShapeError("index storage does not match value count");

    const std::int64_t m = nnz();
    for (std::int64_t e = 0; e < m; ++e) {
        const auto idx = index(e);
        for (int d = 0; d < n; ++d) {
            if (idx[d] < 1 || idx[d] > dims_[d])
                throw IndexError("entry " + std::to_string(e) + " index " +
                                 tuple_to_string(idx) + " outside mode " +
                                 std::to_string(d + 1) + " range [1, " +
                                 std::to_string(dims_[d]) + "]");
        }
    }

    // duplicate check by sorting entry ids lexicographically
    std::vector<std::int64_t> ids(m);
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [this](std::int64_t a, std::int64_t b) {
        return tuple_less(index(a), index(b));
    });
    for (std::int64_t e = 1; e < m; ++e) {
        const auto a = index(ids[e - 1]);
        const auto b = index(ids[e]);
        if (std::equal(a.begin(), a.end(), b.begin()))
            throw DuplicateEntryError("duplicate index tuple " + tuple_to_string(b));
    }
}

SparseTensor SparseTensor::subset(std::span<const std::int64_t> entry_ids) const {
    const int n = order();
    std::vector<Index> idx;
    idx.reserve(entry_ids.size() * n);
    std::vector<double> vals;
    vals.reserve(entry_ids.size());
    for (std::int64_t e : entry_ids) {
        const auto t = index(e);
        idx.insert(idx.end(), t.begin(), t.end());
        vals.push_back(values_[e]);
    }
    return SparseTensor(dims_, time_mode_, std::move(idx), std::move(vals));
}

namespace {

// Splits a line on commas when present, otherwise on runs of whitespace.
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    if (line.find(',') != std::string::npos) {
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) {
            // trim surrounding whitespace
            const auto b = field.find_first_not_of(" \t\r");
            const auto e = field.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
        }
    } else {
        std::stringstream ss(line);
        std::string field;
        while (ss >> field) out.push_back(field);
    }
    return out;
}

Index parse_index_field(const std::string& s, std::int64_t line_no) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-integer index '" + s + "'");
    }
    if (pos != s.size())
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-integer index '" + s + "'");
    return static_cast<Index>(v);
}

double parse_value_field(const std::string& s, std::int64_t line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-numeric value '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-numeric value '" + s + "'");
    return v;
}

}  // namespace

SparseTensor ingest(const std::filesystem::path& path, int n_modes,
                    int time_mode, bool one_based) {
    if (n_modes < 1) throw ConfigError("n_modes must be positive");
    if (time_mode < 1 || time_mode > n_modes)
        throw ConfigError("time mode " + std::to_string(time_mode) +
                          " outside [1, " + std::to_string(n_modes) + "]");

    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<Index> dims(n_modes, 0);
    std::vector<Index> flat;
    std::vector<double> values;

    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != n_modes + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(n_modes + 1) + " columns, got " +
                             std::to_string(fields.size()));

        for (int m = 0; m < n_modes; ++m) {
            Index i = parse_index_field(fields[m], line_no);
            if (!one_based) i += 1;
            if (i < 1)
                throw ParseError("line " + std::to_string(line_no) + ": index " +
                                 fields[m] + " below the valid range");
            flat.push_back(i);
            dims[m] = std::max(dims[m], i);
        }
        values.push_back(parse_value_field(fields[n_modes], line_no));
    }
    if (values.empty()) throw ParseError("no entries in " + path.string());

    return SparseTensor(std::move(dims), time_mode, std::move(flat),
                        std::move(values));
}

void serialize(const SparseTensor& x, const std::filesystem::path& path,
               char delimiter) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    char buf[64];
    for (std::int64_t e = 0; e < x.nnz(); ++e) {
        const auto idx = x.index(e);
        for (Index i : idx) out << i << delimiter;
        std::snprintf(buf, sizeof(buf), "%.17g", x.value(e));
        out << buf << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

ZNormResult z_normalize(const SparseTensor& x) {
    const std::int64_t m = x.nnz();
    if (m < 2) throw DegenerateDataError("need at least 2 observed values");

    double mean = 0.0;
    for (double v : x.values()) mean += v;
    mean /= static_cast<double>(m);

    double sse = 0.0;
    for (double v : x.values()) sse += (v - mean) * (v - mean);
    const double stddev = std::sqrt(sse / static_cast<double>(m));
    if (stddev <= 0.0)
        throw DegenerateDataError("observed values have zero variance");

    std::vector<Index> flat;
    flat.reserve(m * x.order());
    std::vector<double> vals;
    vals.reserve(m);
    for (std::int64_t e = 0; e < m; ++e) {
        const auto idx = x.index(e);
        flat.insert(flat.end(), idx.begin(), idx.end());
        vals.push_back((x.value(e) - mean) / stddev);
    }
    return {SparseTensor(x.dims(), x.time_mode(), std::move(flat), std::move(vals)),
            mean, stddev};
}

SplitDataset split(const SparseTensor& x, std::uint64_t seed) {
    const std::int64_t m = x.nnz();
    if (m < 10)
        throw InsufficientDataError("8:1:1 split needs at least 10 entries, got " +
                                    std::to_string(m));

    const auto n_val = static_cast<std::int64_t>(
        std::llround(static_cast<double>(m) / 10.0));
    const std::int64_t n_test = n_val;
    const std::int64_t n_train = m - n_val - n_test;

    std::vector<std::int64_t> ids(m);
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);

    std::vector<std::int64_t> train_ids(ids.begin(), ids.begin() + n_train);
    std::vector<std::int64_t> val_ids(ids.begin() + n_train,
                                      ids.begin() + n_train + n_val);
    std::vector<std::int64_t> test_ids(ids.begin() + n_train + n_val, ids.end());
    // keep each subset in source entry order
    std::sort(train_ids.begin(), train_ids.end());
    std::sort(val_ids.begin(), val_ids.end());
    std::sort(test_ids.begin(), test_ids.end());

    return {x.subset(train_ids), x.subset(val_ids), x.subset(test_ids), seed};
}

SliceCensus slice_census(const SparseTensor& x) {
    SliceCensus census;
    census.counts.assign(static_cast<std::size_t>(x.time_size()), 0);
    for (std::int64_t e = 0; e < x.nnz(); ++e)
        ++census.counts[static_cast<std::size_t>(x.time_index(e) - 1)];
    const auto [lo, hi] =
        std::minmax_element(census.counts.begin(), census.counts.end());
    census.min_count = *lo;
    census.max_count = *hi;
    return census;
}

void write_census_csv(const SliceCensus& census,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "time_index,nonzero_count\n";
    for (std::size_t i = 0; i < census.counts.size(); ++i)
        out << (i + 1) << ',' << census.counts[i] << '\n';
}

std::uint64_t fingerprint(const SparseTensor& x) {
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;  // FNV prime
        }
    };
    mix(static_cast<std::uint64_t>(x.order()));
    for (Index d : x.dims()) mix(static_cast<std::uint64_t>(d));
    mix(static_cast<std::uint64_t>(x.time_mode()));
    for (std::int64_t e = 0; e < x.nnz(); ++e) {
        for (Index i : x.index(e)) mix(static_cast<std::uint64_t>(i));
        std::uint64_t bits = 0;
        const double v = x.value(e);
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    }
    return h;
}

}  // namespace tatd
