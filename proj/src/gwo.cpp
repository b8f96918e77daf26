#include "solreg/gwo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "solreg/rng.hpp"

namespace solreg {

namespace {

void validate_config(const GwoConfig& cfg) {
    if (cfg.population < 4)
        throw std::runtime_error("gwo: population must be >= 4");
    if (cfg.lower.size() != cfg.upper.size() || cfg.lower.empty())
        throw std::runtime_error("gwo: bounds missing or mismatched");
    for (std::size_t j = 0; j < cfg.lower.size(); ++j)
        if (!(cfg.upper[j] > cfg.lower[j]))
            throw std::runtime_error("gwo: upper bound must exceed lower bound in every dimension");
}

std::string describe_position(const std::vector<double>& x) {
    std::ostringstream os;
    os << '[';
    for (std::size_t j = 0; j < std::min<std::size_t>(x.size(), 6); ++j)
        os << (j ? ", " : "") << x[j];
    if (x.size() > 6) os << ", ...";
    os << ']';
    return os.str();
}

// Evaluates cost for wolves [begin, end) into fitness.  Chunk boundaries are
// fixed (independent of hardware) so reruns are bitwise identical.
void evaluate_range(const CostFn& cost, const std::vector<std::vector<double>>& positions,
                    std::vector<double>& fitness, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fitness[i] = cost(positions[i]);
}

void evaluate_all(const CostFn& cost, const std::vector<std::vector<double>>& positions,
                  std::vector<double>& fitness) {
    const std::size_t n = positions.size();
    const std::size_t kChunks = 8; // fixed, not hardware-dependent
    const std::size_t hw = std::max<unsigned>(1, std::thread::hardware_concurrency());
    if (n < 2 * kChunks || hw < 2) {
        evaluate_range(cost, positions, fitness, 0, n);
    } else {
        std::vector<std::thread> workers;
        for (std::size_t c = 0; c < kChunks; ++c) {
            const std::size_t b = n * c / kChunks;
            const std::size_t e = n * (c + 1) / kChunks;
            workers.emplace_back(evaluate_range, std::cref(cost), std::cref(positions),
                                 std::ref(fitness), b, e);
        }
        for (auto& w : workers) w.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(fitness[i]))
            throw std::runtime_error("gwo: cost returned a non-finite value at position " +
                                     describe_position(positions[i]));
}

// Indices of the three lowest fitness values, ties broken by index.
std::array<std::size_t, 3> select_leaders(const std::vector<double>& fitness) {
    std::array<std::size_t, 3> best = {0, 0, 0};
    std::array<double, 3> bf;
    bf.fill(std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        const double f = fitness[i];
        if (f < bf[0]) {
            bf[2] = bf[1]; best[2] = best[1];
            bf[1] = bf[0]; best[1] = best[0];
            bf[0] = f; best[0] = i;
        } else if (f < bf[1]) {
            bf[2] = bf[1]; best[2] = best[1];
            bf[1] = f; best[1] = i;
        } else if (f < bf[2]) {
            bf[2] = f; best[2] = i;
        }
    }
    return best;
}

} // namespace

double coefficient_schedule(std::size_t t, std::size_t t_max) {
    if (t_max < 1) throw std::runtime_error("coefficient_schedule: t_max must be >= 1");
    if (t > t_max) throw std::runtime_error("coefficient_schedule: t out of range");
    return 2.0 * (1.0 - static_cast<double>(t) / static_cast<double>(t_max));
}

std::vector<double> leader_step(const std::vector<double>& wolf,
                                const std::vector<double>& alpha,
                                const std::vector<double>& beta,
                                const std::vector<double>& delta,
                                double a,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                const DrawFn& draw) {
    const std::size_t d = wolf.size();
    const std::vector<double>* leaders[3] = {&alpha, &beta, &delta};
    std::vector<double> next(d);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (const auto* leader : leaders) {
            const double r1 = draw();
            const double r2 = draw();
            const double A = 2.0 * a * r1 - a;
            const double C = 2.0 * r2;
            const double xl = (*leader)[j];
            const double dist = std::abs(C * xl - wolf[j]);
            sum += xl - A * dist;
        }
        next[j] = std::clamp(sum / 3.0, lower[j], upper[j]);
    }
    return next;
}

GwoResult gwo_optimize(const CostFn& cost, const GwoConfig& cfg, bool want_trace) {
    validate_config(cfg);
    const std::size_t d = cfg.lower.size();
    const std::size_t pop = cfg.population;

    Rng rng(cfg.seed);
    const DrawFn draw = [&rng]() { return rng.uniform01(); };

    std::vector<std::vector<double>> positions(pop, std::vector<double>(d));
    for (std::size_t i = 0; i < pop; ++i)
        for (std::size_t j = 0; j < d; ++j)
            positions[i][j] = rng.uniform(cfg.lower[j], cfg.upper[j]);

    std::vector<double> fitness(pop);
    evaluate_all(cost, positions, fitness);
    auto leaders = select_leaders(fitness);

    GwoResult result;
    if (want_trace) {
        result.alpha_trace.reserve(cfg.iterations + 1);
        result.a_trace.reserve(cfg.iterations + 1);
        result.alpha_trace.push_back(fitness[leaders[0]]);
        result.a_trace.push_back(2.0);
    }

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const double a = coefficient_schedule(t, cfg.iterations);
        // Frozen leader snapshot; only followers move this iteration.
        const std::vector<double> alpha = positions[leaders[0]];
        const std::vector<double> beta = positions[leaders[1]];
        const std::vector<double> delta = positions[leaders[2]];
        for (std::size_t i = 0; i < pop; ++i) {
            if (i == leaders[0] || i == leaders[1] || i == leaders[2]) continue;
            positions[i] = leader_step(positions[i], alpha, beta, delta, a,
                                       cfg.lower, cfg.upper, draw);
        }
        evaluate_all(cost, positions, fitness);
        leaders = select_leaders(fitness);
        if (want_trace) {
            result.alpha_trace.push_back(fitness[leaders[0]]);
            result.a_trace.push_back(a);
        }
    }

    result.best_position = positions[leaders[0]];
    result.best_fitness = fitness[leaders[0]];
    return result;
}

MlpGwoResult train_mlp_gwo(std::size_t hidden_dim, ActivationKind hidden, ActivationKind output,
                           const Dataset& train, const GwoConfig& cfg) {
    if (train.n == 0) throw std::runtime_error("train_mlp_gwo: empty training set");
    const std::size_t d = mlp_param_count(hidden_dim);
    GwoConfig full = cfg;
    if (full.lower.empty() && full.upper.empty()) {
        full.lower.assign(d, -5.0);
        full.upper.assign(d, 5.0);
    }
    if (full.lower.size() != d)
        throw std::runtime_error("train_mlp_gwo: bounds dimension " +
                                 std::to_string(full.lower.size()) + " != parameter count " +
                                 std::to_string(d));
    const CostFn cost = [&](const std::vector<double>& v) {
        return mlp_mse_flat(v.data(), hidden_dim, hidden, output, train);
    };
    GwoResult r = gwo_optimize(cost, full, true);
    MlpGwoResult out;
    out.params = vector_to_param(r.best_position, hidden_dim, hidden, output);
    out.alpha_trace = std::move(r.alpha_trace);
    out.a_trace = std::move(r.a_trace);
    return out;
}

} // namespace solreg
