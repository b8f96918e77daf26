#include "solreg/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "solreg/rng.hpp"

namespace solreg {

namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

// Strict numeric parse: whole token must be consumed and the value finite.
bool parse_cell(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == tok.size() && std::isfinite(out);
}

} // namespace

const std::vector<std::string>& default_schema() {
    static const std::vector<std::string> schema = {"global", "beam", "sunshine_index", "kt", "k", "kd"};
    return schema;
}

CsvLoadResult load_csv(const std::string& path, const std::vector<std::string>& schema) {
    if (schema.size() != Dataset::kNumColumns)
        throw std::runtime_error("load_csv: schema must name exactly 6 columns");

    std::ifstream fin(path);
    if (!fin) throw std::runtime_error("load_csv: cannot open file: " + path);

    std::string line;
    if (!std::getline(fin, line)) throw std::runtime_error("load_csv: empty file: " + path);
    const auto header = split_fields(line);
    if (header.size() < schema.size())
        throw std::runtime_error("load_csv: header has " + std::to_string(header.size()) +
                                 " columns, expected at least " + std::to_string(schema.size()));
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (to_lower(header[i]) != to_lower(schema[i]))
            throw std::runtime_error("load_csv: header mismatch at column " + std::to_string(i) +
                                     ": got '" + header[i] + "', expected '" + schema[i] + "'");
    }
    // Columns beyond the schema (e.g. quality flags) are ignored.

    CsvLoadResult result;
    result.data.columns = schema;
    while (std::getline(fin, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        std::array<double, Dataset::kNumColumns> vals{};
        bool ok = fields.size() >= Dataset::kNumColumns;
        for (std::size_t i = 0; ok && i < Dataset::kNumColumns; ++i)
            ok = parse_cell(fields[i], vals[i]);
        if (!ok) {
            ++result.dropped_rows;
            continue;
        }
        for (std::size_t i = 0; i < Dataset::kNumFeatures; ++i)
            result.data.features.push_back(vals[i]);
        result.data.targets.push_back(vals[Dataset::kNumFeatures]);
        ++result.data.n;
    }

    if (result.data.n < 2)
        throw std::runtime_error("load_csv: fewer than 2 valid rows after filtering (" +
                                 std::to_string(result.data.n) + " valid, " +
                                 std::to_string(result.dropped_rows) + " dropped)");
    return result;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream fout(path);
    if (!fout) throw std::runtime_error("write_csv: cannot open file for writing: " + path);
    fout.precision(17);
    for (std::size_t c = 0; c < data.columns.size(); ++c)
        fout << (c ? "," : "") << data.columns[c];
    fout << '\n';
    for (std::size_t i = 0; i < data.n; ++i) {
        const double* x = data.row(i);
        for (std::size_t c = 0; c < Dataset::kNumFeatures; ++c)
            fout << (c ? "," : "") << x[c];
        fout << ',' << data.targets[i] << '\n';
    }
}

NormalizationParams normalize_fit(const Dataset& data) {
    if (data.n < 2) throw std::runtime_error("normalize_fit: need at least 2 rows");
    NormalizationParams p;
    p.min.fill(std::numeric_limits<double>::infinity());
    p.max.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.n; ++i) {
        const double* x = data.row(i);
        for (std::size_t c = 0; c < Dataset::kNumFeatures; ++c) {
            p.min[c] = std::min(p.min[c], x[c]);
            p.max[c] = std::max(p.max[c], x[c]);
        }
        p.min[5] = std::min(p.min[5], data.targets[i]);
        p.max[5] = std::max(p.max[5], data.targets[i]);
    }
    for (std::size_t c = 0; c < Dataset::kNumColumns; ++c) {
        if (!(p.max[c] > p.min[c])) {
            const std::string name = c < data.columns.size() ? data.columns[c] : std::to_string(c);
            throw std::runtime_error("normalize_fit: degenerate column '" + name + "' (max == min)");
        }
    }
    return p;
}

double normalize_apply(double x, std::size_t col, const NormalizationParams& params) {
    return (x - params.min[col]) / (params.max[col] - params.min[col]) * 2.0 - 1.0;
}

double denormalize(double x_n, std::size_t col, const NormalizationParams& params) {
    return (x_n + 1.0) / 2.0 * (params.max[col] - params.min[col]) + params.min[col];
}

Dataset normalize_dataset(const Dataset& data, const NormalizationParams& params) {
    Dataset out;
    out.columns = data.columns;
    out.n = data.n;
    out.features.resize(data.features.size());
    out.targets.resize(data.targets.size());
    for (std::size_t i = 0; i < data.n; ++i) {
        for (std::size_t c = 0; c < Dataset::kNumFeatures; ++c)
            out.features[i * Dataset::kNumFeatures + c] =
                normalize_apply(data.features[i * Dataset::kNumFeatures + c], c, params);
        out.targets[i] = normalize_apply(data.targets[i], Dataset::kNumFeatures, params);
    }
    return out;
}

SplitDataset split_train_test(const Dataset& data, double ratio, std::uint64_t seed, bool shuffle) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::runtime_error("split_train_test: ratio must be in (0,1)");
    if (data.n < 2) throw std::runtime_error("split_train_test: need at least 2 rows");

    std::vector<std::size_t> order(data.n);
    std::iota(order.begin(), order.end(), 0);
    if (shuffle) {
        Rng rng(seed);
        // Fisher-Yates with the explicit generator so permutations are
        // reproducible across standard library implementations.
        for (std::size_t i = data.n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i + 1));
            std::swap(order[i], order[j > i ? i : j]);
        }
    }

    const std::size_t train_n =
        std::min<std::size_t>(data.n - 1, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(data.n))));

    SplitDataset out;
    out.ratio = ratio;
    out.seed = seed;
    out.train.columns = out.test.columns = data.columns;
    for (std::size_t k = 0; k < data.n; ++k) {
        Dataset& part = k < train_n ? out.train : out.test;
        const double* x = data.row(order[k]);
        part.features.insert(part.features.end(), x, x + Dataset::kNumFeatures);
        part.targets.push_back(data.targets[order[k]]);
        ++part.n;
    }
    return out;
}

std::uint64_t fingerprint(const Dataset& data) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t bytes) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    mix(data.features.data(), data.features.size() * sizeof(double));
    mix(data.targets.data(), data.targets.size() * sizeof(double));
    return h;
}

} // namespace solreg
