#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace solreg {

// Tabular dataset: five feature columns (global, beam, sunshine_index, kt, k)
// and one target column (kd).  Immutable after construction by convention;
// all operations below are pure functions.
struct Dataset {
    static constexpr std::size_t kNumFeatures = 5;
    static constexpr std::size_t kNumColumns = 6; // features + target

    std::vector<std::string> columns; // size 6, target last
    std::vector<double> features;     // n x 5, row-major
    std::vector<double> targets;      // n
    std::size_t n = 0;

    const double* row(std::size_t i) const { return features.data() + i * kNumFeatures; }
};

// Per-column min/max for the [-1, +1] rescaling.
struct NormalizationParams {
    std::array<double, Dataset::kNumColumns> min{};
    std::array<double, Dataset::kNumColumns> max{};
};

struct SplitDataset {
    Dataset train;
    Dataset test;
    double ratio = 0.8;
    std::uint64_t seed = 0;
};

struct CsvLoadResult {
    Dataset data;
    std::size_t dropped_rows = 0; // rows rejected for missing/non-numeric/non-finite cells
};

// Expected on-disk column order.
const std::vector<std::string>& default_schema();

// Loads a comma-delimited file with one header row.  Header names must match
// the schema case-insensitively; unknown trailing columns are ignored.  Rows
// with missing, non-numeric, or non-finite cells are dropped and counted.
// Throws on missing file, header mismatch, or fewer than 2 surviving rows.
CsvLoadResult load_csv(const std::string& path, const std::vector<std::string>& schema = default_schema());

void write_csv(const Dataset& data, const std::string& path);

// Captures column-wise min/max.  Throws naming the column if max == min.
NormalizationParams normalize_fit(const Dataset& data);

// x_N = ((x - min)/(max - min)) * 2 - 1.  Out-of-range values extrapolate
// linearly; no clamping.
double normalize_apply(double x, std::size_t col, const NormalizationParams& params);

// Exact inverse of normalize_apply.
double denormalize(double x_n, std::size_t col, const NormalizationParams& params);

// Applies normalize_apply to every cell (features cols 0..4, target col 5).
Dataset normalize_dataset(const Dataset& data, const NormalizationParams& params);

// shuffle=false: first ceil(ratio*n) rows become the training partition
// (time-ordered split).  shuffle=true: rows are permuted with the seeded
// generator first.  Deterministic given (seed, shuffle).
SplitDataset split_train_test(const Dataset& data, double ratio, std::uint64_t seed, bool shuffle);

// FNV-1a over the numeric payload; used to stamp reports.
std::uint64_t fingerprint(const Dataset& data);

} // namespace solreg
