#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "solreg/dataio.hpp"
#include "solreg/experiment.hpp"
#include "solreg/surrogate.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string data_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value configuration file");
    cmd->add_option("--data", opts.data_path, "input CSV (default: generated surrogate)");
    cmd->add_option("--out-dir", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "experiment seed")->each([&opts](const std::string&) {
        opts.seed_set = true;
    });
}

solreg::ExperimentConfig build_config(const CommonOpts& opts) {
    solreg::ExperimentConfig cfg;
    if (!opts.config_path.empty()) solreg::apply_config_file(cfg, opts.config_path);
    if (!opts.data_path.empty()) cfg.data_path = opts.data_path;
    if (opts.seed_set) cfg.seed = opts.seed;
    cfg.out_dir = opts.out_dir;
    return cfg;
}

void emit(const std::vector<solreg::ReportRow>& rows) {
    std::cout << solreg::format_report_table(rows);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solar diffuse-fraction regression: MLP, MLP-GWO and ANFIS comparison harness"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* generate = app.add_subcommand("generate", "write a surrogate dataset CSV");
    std::size_t gen_n = 5000;
    double gen_noise = 0.05;
    std::string gen_out = "surrogate.csv";
    std::uint64_t gen_seed = 42;
    generate->add_option("--n", gen_n, "row count (>= 100)")->capture_default_str();
    generate->add_option("--noise", gen_noise, "target noise stddev")->capture_default_str();
    generate->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    generate->add_option("--out", gen_out, "output path")->capture_default_str();

    auto* sweep_mlp = app.add_subcommand("sweep-mlp", "hidden-layer size sweep for the baseline MLP");
    add_common(sweep_mlp, opts);

    auto* sweep_gwo = app.add_subcommand("sweep-gwo", "GWO population sweep for the MLP-GWO hybrid");
    std::size_t gwo_neurons = 20;
    sweep_gwo->add_option("--neurons", gwo_neurons, "hidden neurons for the hybrid")->capture_default_str();
    add_common(sweep_gwo, opts);

    auto* sweep_anfis = app.add_subcommand("sweep-anfis", "ANFIS membership-function family sweep");
    add_common(sweep_anfis, opts);

    auto* compare = app.add_subcommand("compare", "train the three models and compare on held-out data");
    std::size_t cmp_neurons = 20;
    std::size_t cmp_population = 300;
    std::string cmp_family = "gaussian";
    compare->add_option("--neurons", cmp_neurons, "MLP hidden neurons")->capture_default_str();
    compare->add_option("--population", cmp_population, "GWO population")->capture_default_str();
    compare->add_option("--mf-family", cmp_family, "ANFIS MF family")->capture_default_str();
    add_common(compare, opts);

    auto* all = app.add_subcommand("all", "full protocol: all sweeps plus the final comparison");
    add_common(all, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            const solreg::Dataset data = solreg::generate_surrogate(gen_n, gen_seed, gen_noise);
            solreg::write_csv(data, gen_out);
            std::cout << "wrote " << data.n << " rows to " << gen_out << '\n';
            return 0;
        }

        const solreg::ExperimentConfig cfg = build_config(opts);
        if (sweep_mlp->parsed()) {
            const auto data = solreg::prepare_data(cfg);
            const auto outcome = solreg::run_neuron_sweep(data, cfg);
            emit(outcome.rows);
            std::cout << "winner: " << outcome.rows[outcome.winner].config << '\n';
        } else if (sweep_gwo->parsed()) {
            const auto data = solreg::prepare_data(cfg);
            const auto outcome = solreg::run_population_sweep(data, cfg, gwo_neurons);
            emit(outcome.rows);
            std::cout << "winner: " << outcome.rows[outcome.winner].config << '\n';
        } else if (sweep_anfis->parsed()) {
            const auto data = solreg::prepare_data(cfg);
            const auto outcome = solreg::run_mf_sweep(data, cfg);
            emit(outcome.rows);
            std::cout << "winner: " << outcome.rows[outcome.winner].config << '\n';
        } else if (compare->parsed()) {
            const auto data = solreg::prepare_data(cfg);
            const auto rows = solreg::run_final_comparison(
                data, cfg, cmp_neurons, cmp_population, solreg::mf_kind_from_name(cmp_family));
            emit(rows);
            if (!cfg.out_dir.empty())
                solreg::write_report_csv(rows, cfg, data.data_fingerprint, cfg.out_dir + "/report.csv");
        } else if (all->parsed()) {
            const auto result = solreg::run_all(cfg);
            emit(result.rows);
            std::cout << "winning neurons: " << result.winning_neurons
                      << ", population: " << result.winning_population
                      << ", mf family: " << solreg::mf_kind_name(result.winning_family) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
