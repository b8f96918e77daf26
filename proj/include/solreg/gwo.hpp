#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "solreg/dataio.hpp"
#include "solreg/mlp.hpp"

namespace solreg {

struct GwoConfig {
    std::size_t population = 30; // >= 4: alpha, beta, delta plus followers
    std::size_t iterations = 500;
    std::vector<double> lower; // per-dimension bounds
    std::vector<double> upper;
    std::uint64_t seed = 0;
};

using CostFn = std::function<double(const std::vector<double>&)>;
using DrawFn = std::function<double()>; // uniform [0,1) source

// a = 2 * (1 - t/t_max): linear decay from 2 to 0.
double coefficient_schedule(std::size_t t, std::size_t t_max);

// Moves one follower toward the three leaders.  For each dimension and each
// leader (alpha, beta, delta in that order) two fresh draws r1, r2 are taken
// from `draw`; A = 2*a*r1 - a, C = 2*r2, d = |C*x_leader - x|, candidate =
// x_leader - A*d.  The three candidates are averaged and clamped to bounds.
std::vector<double> leader_step(const std::vector<double>& wolf,
                                const std::vector<double>& alpha,
                                const std::vector<double>& beta,
                                const std::vector<double>& delta,
                                double a,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                const DrawFn& draw);

struct GwoResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    // Entry t is the alpha fitness after iteration t (entry 0: initial
    // population), so the length is iterations + 1.
    std::vector<double> alpha_trace;
    std::vector<double> a_trace;
};

// Bound-constrained minimization.  Fitness is evaluated over fixed row
// chunks so results are bitwise reproducible regardless of thread count.
// Throws if the cost returns a non-finite value.
GwoResult gwo_optimize(const CostFn& cost, const GwoConfig& cfg, bool want_trace = true);

struct MlpGwoResult {
    MlpParams params;
    std::vector<double> alpha_trace;
    std::vector<double> a_trace;
};

// Searches the flattened MLP parameter vector against training-set MSE.
// Empty bounds in cfg default to [-5, +5] per dimension.
MlpGwoResult train_mlp_gwo(std::size_t hidden_dim, ActivationKind hidden, ActivationKind output,
                           const Dataset& train, const GwoConfig& cfg);

} // namespace solreg
