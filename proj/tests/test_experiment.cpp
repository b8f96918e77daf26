#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "solreg/experiment.hpp"
#include "solreg/surrogate.hpp"

using namespace solreg;

namespace {

// small budgets so the protocol tests stay fast; structure is what matters
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.surrogate_n = 300;
    cfg.surrogate_noise = 0.05;
    cfg.neuron_counts = {3, 5};
    cfg.repetitions = 2;
    cfg.mlp_epochs = 40;
    cfg.gwo_populations = {8, 12};
    cfg.gwo_iterations = 15;
    cfg.mf_families = {MfKind::Gaussian, MfKind::Gbell};
    cfg.anfis_epochs = 2;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream fin(path);
    std::stringstream ss;
    ss << fin.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& path) {
    std::ifstream fin(path);
    std::size_t n = 0;
    std::string line;
    while (std::getline(fin, line)) ++n;
    return n;
}

} // namespace

TEST_CASE("surrogate generator is deterministic and in range") {
    const auto a = generate_surrogate(1000, 7, 0.0);
    const auto b = generate_surrogate(1000, 7, 0.0);
    CHECK(a.features == b.features);
    CHECK(a.targets == b.targets);
    CHECK(generate_surrogate(1000, 8, 0.0).targets != a.targets);

    const auto noisy = generate_surrogate(1000, 7, 0.1);
    for (std::size_t i = 0; i < noisy.n; ++i) {
        const double* x = noisy.row(i);
        CHECK(x[3] >= 0.0); // kt
        CHECK(x[3] <= 1.0);
        CHECK(noisy.targets[i] >= 0.0); // kd
        CHECK(noisy.targets[i] <= 1.0);
        CHECK(x[0] >= x[1] * 0.2); // global vs beam * min cos(z)
    }
    CHECK_THROWS_AS(generate_surrogate(50, 1, 0.0), std::runtime_error);
}

TEST_CASE("noise-free surrogate target is the documented function of its columns") {
    const auto d = generate_surrogate(500, 21, 0.0);
    for (std::size_t i = 0; i < d.n; ++i) {
        const double kt = d.row(i)[3];
        const double sunshine = d.row(i)[2];
        CHECK(d.targets[i] == surrogate_diffuse_fraction(kt, sunshine));
    }
}

TEST_CASE("surrogate CSV round trips through the loader") {
    const auto d = generate_surrogate(200, 3, 0.02);
    const auto path = (std::filesystem::temp_directory_path() / "solreg_surrogate.csv").string();
    write_csv(d, path);
    const auto r = load_csv(path);
    CHECK(r.data.n == 200);
    CHECK(r.dropped_rows == 0);
    for (std::size_t i = 0; i < d.n; ++i)
        CHECK(r.data.targets[i] == doctest::Approx(d.targets[i]).epsilon(1e-15));
    std::filesystem::remove(path);
}

TEST_CASE("prepare_data fits normalization on the training partition only") {
    ExperimentConfig cfg = small_config();
    const auto data = prepare_data(cfg);
    CHECK(data.train.n == 240);
    CHECK(data.test.n == 60);
    // the training partition spans exactly [-1, 1] per feature
    for (std::size_t j = 0; j < Dataset::kNumFeatures; ++j) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < data.train.n; ++i) {
            lo = std::min(lo, data.train.row(i)[j]);
            hi = std::max(hi, data.train.row(i)[j]);
        }
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("neuron sweep emits one row per count and is reproducible") {
    ExperimentConfig cfg = small_config();
    const auto data = prepare_data(cfg);
    const auto a = run_neuron_sweep(data, cfg);
    CHECK(a.rows.size() == 2);
    CHECK(a.rows[0].config == "neurons=3");
    CHECK(a.rows[1].config == "neurons=5");
    for (const auto& row : a.rows) {
        CHECK(row.phase == "train");
        CHECK(row.metrics.mae <= row.metrics.rmse + 1e-12);
        CHECK(row.metrics.n == data.train.n);
    }
    const auto b = run_neuron_sweep(data, cfg);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].metrics.mae == b.rows[i].metrics.mae);
        CHECK(a.rows[i].metrics.rmse == b.rows[i].metrics.rmse);
    }
    CHECK(a.winner == b.winner);
}

TEST_CASE("population and MF sweeps emit the configured row counts") {
    ExperimentConfig cfg = small_config();
    const auto data = prepare_data(cfg);
    const auto pop = run_population_sweep(data, cfg, 3);
    CHECK(pop.rows.size() == 2);
    CHECK(pop.rows[0].config == "population=8");
    const auto mf = run_mf_sweep(data, cfg);
    CHECK(mf.rows.size() == 2);
    CHECK(mf.rows[0].config == "mf=gaussian");
    CHECK(mf.rows[1].config == "mf=gbell");
}

TEST_CASE("final comparison: three rows, residual dumps match the test size") {
    ExperimentConfig cfg = small_config();
    cfg.out_dir = (std::filesystem::temp_directory_path() / "solreg_final_out").string();
    const auto data = prepare_data(cfg);
    const auto rows = run_final_comparison(data, cfg, 3, 8, MfKind::Gaussian);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].config.rfind("MLP ", 0) == 0);
    CHECK(rows[1].config.rfind("ANFIS", 0) == 0);
    CHECK(rows[2].config.rfind("MLP-GWO", 0) == 0);
    for (const auto& r : rows) {
        CHECK(r.phase == "test");
        CHECK(r.metrics.n == data.test.n);
    }
    for (const char* name : {"residuals_mlp.csv", "residuals_anfis.csv", "residuals_mlp_gwo.csv"})
        CHECK(count_lines(cfg.out_dir + "/" + name) == data.test.n + 1); // header + rows
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("run_all produces the full report and is bitwise reproducible") {
    ExperimentConfig cfg = small_config();
    const auto dir_a = std::filesystem::temp_directory_path() / "solreg_all_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "solreg_all_b";
    cfg.out_dir = dir_a.string();
    const auto a = run_all(cfg);
    cfg.out_dir = dir_b.string();
    const auto b = run_all(cfg);

    CHECK(a.rows.size() == 2 + 2 + 2 + 3);
    CHECK(slurp(dir_a.string() + "/report.csv") == slurp(dir_b.string() + "/report.csv"));
    CHECK(a.data_fingerprint == b.data_fingerprint);
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("metrics can be reported on the denormalized scale") {
    ExperimentConfig cfg = small_config();
    cfg.denormalized_metrics = true;
    const auto data = prepare_data(cfg);
    const auto rows = run_neuron_sweep(data, cfg).rows;
    for (const auto& r : rows) CHECK(r.scale == "denormalized");
}

TEST_CASE("config file overrides and rejects unknown keys") {
    const auto path = (std::filesystem::temp_directory_path() / "solreg_cfg.txt").string();
    {
        std::ofstream fout(path);
        fout << "# comment\n"
             << "seed = 99\n"
             << "neurons = 10,20\n"
             << "mf_families = gaussian\n"
             << "selection_metric = rmse\n"
             << "shuffle = true\n"
             << "surrogate_noise = 0.02\n";
    }
    ExperimentConfig cfg;
    apply_config_file(cfg, path);
    CHECK(cfg.seed == 99);
    CHECK(cfg.neuron_counts == std::vector<std::size_t>{10, 20});
    CHECK(cfg.mf_families.size() == 1);
    CHECK(cfg.selection == SelectionMetric::Rmse);
    CHECK(cfg.shuffle);
    CHECK(cfg.surrogate_noise == 0.02);

    {
        std::ofstream fout(path);
        fout << "not_a_key = 1\n";
    }
    ExperimentConfig cfg2;
    CHECK_THROWS_WITH_AS(apply_config_file(cfg2, path), doctest::Contains("unknown key"),
                         std::runtime_error);
    std::filesystem::remove(path);
}
