#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "solreg/anfis.hpp"
#include "solreg/dataio.hpp"
#include "solreg/metrics.hpp"
#include "solreg/mlp.hpp"

namespace solreg {

enum class SelectionMetric { Mae, Rmse };

struct ExperimentConfig {
    std::string data_path;      // empty: generate a surrogate dataset
    std::size_t surrogate_n = 5000;
    double surrogate_noise = 0.05;

    double split_ratio = 0.8;
    bool shuffle = false;       // chronological split by default
    std::uint64_t seed = 42;

    std::vector<std::size_t> neuron_counts = {15, 20, 25, 30};
    std::size_t repetitions = 3;
    double mlp_learning_rate = 0.01;
    std::size_t mlp_epochs = 2000;

    std::vector<std::size_t> gwo_populations = {100, 200, 300, 400};
    std::size_t gwo_iterations = 500;
    double gwo_bound = 5.0;

    std::vector<MfKind> mf_families = {MfKind::Triangular, MfKind::Trapezoidal,
                                       MfKind::Gbell, MfKind::Gaussian};
    std::size_t anfis_epochs = 500;
    double anfis_learning_rate = 0.01;

    bool denormalized_metrics = false; // metrics on the model's working scale by default
    SelectionMetric selection = SelectionMetric::Mae;
    std::string out_dir; // empty: no files written
};

struct ReportRow {
    std::string experiment;
    std::string config;
    std::string phase; // "train" or "test"
    std::string scale; // "normalized" or "denormalized"
    Metrics metrics;
};

// Data prepared per the training protocol: split first, then min-max
// parameters fitted on the training partition only and applied to both.
struct ExperimentData {
    Dataset train;             // normalized
    Dataset test;              // normalized with the training parameters
    NormalizationParams norm;
    std::uint64_t data_fingerprint = 0;
};

ExperimentData prepare_data(const ExperimentConfig& cfg);

// Deterministic per-task seed derivation from the experiment seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

struct SweepOutcome {
    std::vector<ReportRow> rows; // one per configuration, sweep order
    std::size_t winner = 0;      // index into the swept list
};

// MLP hidden-size sweep: per neuron count, `repetitions` seeded trainings,
// best kept by the selection metric on training data.
SweepOutcome run_neuron_sweep(const ExperimentData& data, const ExperimentConfig& cfg);

// GWO population sweep at the winning neuron count.
SweepOutcome run_population_sweep(const ExperimentData& data, const ExperimentConfig& cfg,
                                  std::size_t winning_neurons);

// ANFIS membership-family sweep (2 MFs per input, linear consequents).
SweepOutcome run_mf_sweep(const ExperimentData& data, const ExperimentConfig& cfg);

// Retrains the three sweep winners with documented seeds and evaluates on
// the held-out partition.  Writes residuals_<model>.csv when out_dir is set.
std::vector<ReportRow> run_final_comparison(const ExperimentData& data, const ExperimentConfig& cfg,
                                            std::size_t neurons, std::size_t population,
                                            MfKind family);

struct FullRunResult {
    std::vector<ReportRow> rows; // sweep rows then comparison rows
    std::size_t winning_neurons = 0;
    std::size_t winning_population = 0;
    MfKind winning_family = MfKind::Gaussian;
    std::uint64_t data_fingerprint = 0;
};

// The complete protocol: neuron sweep, population sweep, MF sweep, final
// comparison.  Writes report.csv and trace/residual files when out_dir set.
FullRunResult run_all(const ExperimentConfig& cfg);

void write_report_csv(const std::vector<ReportRow>& rows, const ExperimentConfig& cfg,
                      std::uint64_t data_fingerprint, const std::string& path);
std::string format_report_table(const std::vector<ReportRow>& rows);

// key=value overrides ('#' comments, lists comma-separated).  Unknown keys
// are rejected.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

} // namespace solreg
