#include "solreg/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "solreg/rng.hpp"

namespace solreg {

std::string activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Identity: return "identity";
    }
    throw std::runtime_error("activation_name: unknown kind");
}

ActivationKind activation_from_name(const std::string& name) {
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "identity") return ActivationKind::Identity;
    throw std::runtime_error("activation_from_name: unknown activation '" + name + "'");
}

double activation_eval(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::Tanh:
            return std::tanh(x);
        case ActivationKind::Sigmoid:
            // Branch on sign so exp never overflows.
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            {
                const double e = std::exp(x);
                return e / (1.0 + e);
            }
        case ActivationKind::Identity:
            return x;
    }
    throw std::runtime_error("activation_eval: unknown kind");
}

double activation_deriv_from_value(ActivationKind kind, double value) {
    switch (kind) {
        case ActivationKind::Tanh: return 1.0 - value * value;
        case ActivationKind::Sigmoid: return value * (1.0 - value);
        case ActivationKind::Identity: return 1.0;
    }
    throw std::runtime_error("activation_deriv_from_value: unknown kind");
}

std::size_t mlp_param_count(std::size_t hidden_dim) {
    return hidden_dim * Dataset::kNumFeatures + hidden_dim + hidden_dim + 1;
}

double mlp_forward(const MlpParams& p, const double* x) {
    if (p.w1.size() != p.hidden_dim * Dataset::kNumFeatures || p.b1.size() != p.hidden_dim ||
        p.w2.size() != p.hidden_dim)
        throw std::runtime_error("mlp_forward: dimension mismatch");
    double out = p.b2;
    for (std::size_t h = 0; h < p.hidden_dim; ++h) {
        double z = p.b1[h];
        const double* wr = p.w1.data() + h * Dataset::kNumFeatures;
        for (std::size_t j = 0; j < Dataset::kNumFeatures; ++j) z += wr[j] * x[j];
        out += p.w2[h] * activation_eval(p.hidden_activation, z);
    }
    return activation_eval(p.output_activation, out);
}

MlpParams mlp_init(std::size_t hidden_dim, std::uint64_t seed,
                   ActivationKind hidden, ActivationKind output) {
    if (hidden_dim < 1 || hidden_dim > 1024)
        throw std::runtime_error("mlp_init: hidden_dim must be in [1, 1024]");
    Rng rng(seed);
    MlpParams p;
    p.hidden_dim = hidden_dim;
    p.hidden_activation = hidden;
    p.output_activation = output;
    const double lim1 = 1.0 / std::sqrt(static_cast<double>(Dataset::kNumFeatures));
    const double lim2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    p.w1.resize(hidden_dim * Dataset::kNumFeatures);
    for (double& w : p.w1) w = rng.uniform(-lim1, lim1);
    p.b1.assign(hidden_dim, 0.0);
    p.w2.resize(hidden_dim);
    for (double& w : p.w2) w = rng.uniform(-lim2, lim2);
    p.b2 = 0.0;
    return p;
}

double mlp_mse(const MlpParams& p, const Dataset& data) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double e = mlp_forward(p, data.row(i)) - data.targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(data.n);
}

double mlp_mse_flat(const double* v, std::size_t hidden_dim,
                    ActivationKind hidden, ActivationKind output, const Dataset& data) {
    const std::size_t F = Dataset::kNumFeatures;
    const double* w1 = v;
    const double* b1 = v + hidden_dim * F;
    const double* w2 = b1 + hidden_dim;
    const double b2 = w2[hidden_dim];
    double sum = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double* x = data.row(i);
        double out = b2;
        for (std::size_t h = 0; h < hidden_dim; ++h) {
            double z = b1[h];
            const double* wr = w1 + h * F;
            for (std::size_t j = 0; j < F; ++j) z += wr[j] * x[j];
            out += w2[h] * activation_eval(hidden, z);
        }
        const double e = activation_eval(output, out) - data.targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(data.n);
}

std::vector<double> backprop_gradient(const MlpParams& p, const Dataset& batch) {
    if (batch.n == 0) throw std::runtime_error("backprop_gradient: empty batch");
    const std::size_t F = Dataset::kNumFeatures;
    const std::size_t H = p.hidden_dim;
    std::vector<double> grad(mlp_param_count(H), 0.0);
    double* gw1 = grad.data();
    double* gb1 = grad.data() + H * F;
    double* gw2 = gb1 + H;
    double& gb2 = gw2[H];

    std::vector<double> act(H);
    for (std::size_t i = 0; i < batch.n; ++i) {
        const double* x = batch.row(i);
        double pre_out = p.b2;
        for (std::size_t h = 0; h < H; ++h) {
            double z = p.b1[h];
            const double* wr = p.w1.data() + h * F;
            for (std::size_t j = 0; j < F; ++j) z += wr[j] * x[j];
            act[h] = activation_eval(p.hidden_activation, z);
            pre_out += p.w2[h] * act[h];
        }
        const double out = activation_eval(p.output_activation, pre_out);
        // d(MSE)/d(pre_out) for this row
        const double delta_out = 2.0 * (out - batch.targets[i]) *
                                 activation_deriv_from_value(p.output_activation, out) /
                                 static_cast<double>(batch.n);
        gb2 += delta_out;
        for (std::size_t h = 0; h < H; ++h) {
            gw2[h] += delta_out * act[h];
            const double delta_h =
                delta_out * p.w2[h] * activation_deriv_from_value(p.hidden_activation, act[h]);
            gb1[h] += delta_h;
            double* gr = gw1 + h * F;
            for (std::size_t j = 0; j < F; ++j) gr[j] += delta_h * x[j];
        }
    }
    return grad;
}

MlpTrainResult train_mlp_gd(const MlpParams& init, const Dataset& train, const TrainConfig& cfg) {
    if (!(cfg.learning_rate >= 0.0)) throw std::runtime_error("train_mlp_gd: negative learning rate");
    if (cfg.epochs < 1) throw std::runtime_error("train_mlp_gd: epochs must be >= 1");
    if (train.n == 0) throw std::runtime_error("train_mlp_gd: empty training set");

    MlpTrainResult result;
    result.params = init;
    result.trace.reserve(cfg.epochs);
    std::vector<double> v = param_to_vector(result.params);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<double> grad = backprop_gradient(result.params, train);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= cfg.learning_rate * grad[k];
        result.params = vector_to_param(v, init.hidden_dim, init.hidden_activation, init.output_activation);
        const double mse = mlp_mse(result.params, train);
        if (!std::isfinite(mse))
            throw std::runtime_error("train_mlp_gd: training diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));
        result.trace.push_back(mse);
    }
    return result;
}

std::vector<double> param_to_vector(const MlpParams& p) {
    std::vector<double> v;
    v.reserve(mlp_param_count(p.hidden_dim));
    v.insert(v.end(), p.w1.begin(), p.w1.end());
    v.insert(v.end(), p.b1.begin(), p.b1.end());
    v.insert(v.end(), p.w2.begin(), p.w2.end());
    v.push_back(p.b2);
    return v;
}

MlpParams vector_to_param(const std::vector<double>& v, std::size_t hidden_dim,
                          ActivationKind hidden, ActivationKind output) {
    if (v.size() != mlp_param_count(hidden_dim))
        throw std::runtime_error("vector_to_param: expected length " +
                                 std::to_string(mlp_param_count(hidden_dim)) + ", got " +
                                 std::to_string(v.size()));
    const std::size_t F = Dataset::kNumFeatures;
    MlpParams p;
    p.hidden_dim = hidden_dim;
    p.hidden_activation = hidden;
    p.output_activation = output;
    auto it = v.begin();
    p.w1.assign(it, it + hidden_dim * F);
    it += hidden_dim * F;
    p.b1.assign(it, it + hidden_dim);
    it += hidden_dim;
    p.w2.assign(it, it + hidden_dim);
    it += hidden_dim;
    p.b2 = *it;
    return p;
}

void save_mlp(const MlpParams& p, const std::string& path) {
    std::ofstream fout(path);
    if (!fout) throw std::runtime_error("save_mlp: cannot open " + path);
    fout.precision(17);
    fout << "model mlp\n";
    fout << "hidden_dim " << p.hidden_dim << '\n';
    fout << "hidden_activation " << activation_name(p.hidden_activation) << '\n';
    fout << "output_activation " << activation_name(p.output_activation) << '\n';
    fout << "params"; // rows of w1, then b1, then w2, then b2
    for (double x : param_to_vector(p)) fout << ' ' << x;
    fout << '\n';
}

MlpParams load_mlp(const std::string& path) {
    std::ifstream fin(path);
    if (!fin) throw std::runtime_error("load_mlp: cannot open " + path);
    std::string key, model, hidden_name, output_name;
    std::size_t hidden_dim = 0;
    fin >> key >> model;
    if (key != "model" || model != "mlp") throw std::runtime_error("load_mlp: not an mlp model file");
    fin >> key >> hidden_dim;
    fin >> key >> hidden_name;
    fin >> key >> output_name;
    fin >> key;
    std::vector<double> v(mlp_param_count(hidden_dim));
    for (double& x : v)
        if (!(fin >> x)) throw std::runtime_error("load_mlp: truncated parameter array");
    return vector_to_param(v, hidden_dim, activation_from_name(hidden_name),
                           activation_from_name(output_name));
}

} // namespace solreg
