#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "solreg/dataio.hpp"

namespace solreg {

enum class MfKind { Triangular, Trapezoidal, Gbell, Gaussian };

std::string mf_kind_name(MfKind kind);
MfKind mf_kind_from_name(const std::string& name);
std::size_t mf_param_count(MfKind kind);

// One fuzzy membership function.  The parameter slots used per kind:
//   Triangular(a, b, c)      with a <= b <= c
//   Trapezoidal(a, b, c, d)  with a <= b <= c <= d
//   Gbell(a, b, c)           with a > 0, b > 0
//   Gaussian(c, sigma)       with sigma > 0
struct MembershipFunction {
    MfKind kind = MfKind::Gaussian;
    std::array<double, 4> p{};

    static MembershipFunction triangular(double a, double b, double c);
    static MembershipFunction trapezoidal(double a, double b, double c, double d);
    static MembershipFunction gbell(double a, double b, double c);
    static MembershipFunction gaussian(double c, double sigma);
};

// Evaluates to a membership degree in [0, 1] for any finite x.
double mf_eval(const MembershipFunction& mf, double x);

// d(mu)/d(p_i) into grad[0..3] (unused slots zeroed).  At the non-smooth
// points of the piecewise-linear families the one-sided value 0 is used.
void mf_param_grad(const MembershipFunction& mf, double x, double grad[4]);

// Takagi-Sugeno ANFIS over 5 inputs with 2 MFs per input (grid partition,
// 32 rules) and first-order linear consequents (p1..p5, r) per rule.
// Rule i uses MF index ((i >> input) & 1) for each input.
struct AnfisModel {
    static constexpr std::size_t kInputs = Dataset::kNumFeatures;
    static constexpr std::size_t kMfsPerInput = 2;
    static constexpr std::size_t kRules = 32;       // 2^5
    static constexpr std::size_t kConsequentCols = kInputs + 1;

    std::array<std::array<MembershipFunction, kMfsPerInput>, kInputs> premise;
    std::vector<double> consequents; // kRules x kConsequentCols, row-major

    std::size_t mf_index(std::size_t rule, std::size_t input) const {
        return (rule >> input) & 1u;
    }
};

struct AnfisOutput {
    double output = 0.0;
    std::array<double, AnfisModel::kRules> firing{};
    std::array<double, AnfisModel::kRules> normalized{};
    bool starved = false; // total firing below 1e-12; output forced to 0
};

// Grid-partition initialization on (normalized) training data: per input two
// MFs centered at min + range/3 and min + 2*range/3, widths derived from
// range/2 so adjacent MFs cross near 0.5.  Consequents start at zero.
// Deterministic; the seed is accepted for interface uniformity only.
AnfisModel anfis_init_grid(const Dataset& train, MfKind kind, std::uint64_t seed = 0);

AnfisOutput anfis_forward(const AnfisModel& model, const double* x);

double anfis_mse(const AnfisModel& model, const Dataset& data);

// Least-squares estimate of all 192 consequent coefficients with premises
// fixed, via normal equations with Tikhonov damping.  Starved rows are
// excluded from the system.  Throws if the damped solve still fails.
void lse_consequents(AnfisModel& model, const Dataset& train, double damping = 1e-8);

// One full-batch gradient-descent step on training MSE with respect to all
// premise parameters, consequents fixed.  Validity invariants re-imposed by
// projection (ordering for triangular/trapezoidal, floors for widths).
void premise_gradient_step(AnfisModel& model, const Dataset& train, double learning_rate);

struct AnfisTrainConfig {
    std::size_t epochs = 500;
    double premise_learning_rate = 0.01;
    std::uint64_t seed = 0;
};

struct AnfisTrainResult {
    AnfisModel model;
    std::vector<double> trace; // post-LSE training MSE per epoch
};

// Hybrid training: per epoch an LSE consequent solve followed by one premise
// gradient step.  Fully deterministic.
AnfisTrainResult train_anfis_hybrid(const AnfisModel& init, const Dataset& train,
                                    const AnfisTrainConfig& cfg);

// Plain-text persistence: MF family and parameters per (input, MF), then the
// 32x6 consequent matrix.
void save_anfis(const AnfisModel& model, const std::string& path);
AnfisModel load_anfis(const std::string& path);

} // namespace solreg
