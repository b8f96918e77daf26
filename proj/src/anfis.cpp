#include "solreg/anfis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace solreg {

namespace {

constexpr double kStarvationFloor = 1e-12;
constexpr double kWidthFloor = 1e-6;

constexpr std::size_t kRules = AnfisModel::kRules;
constexpr std::size_t kInputs = AnfisModel::kInputs;
constexpr std::size_t kCoeffs = kRules * AnfisModel::kConsequentCols; // 192

// Symmetric positive definite solve (in-place Cholesky), used for the damped
// normal equations.  Returns false if a pivot collapses.
bool cholesky_solve(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = A[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= A[j * n + k] * A[j * n + k];
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        A[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
            A[i * n + j] = s / d;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
        b[i] = s / A[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= A[k * n + ii] * b[k];
        b[ii] = s / A[ii * n + ii];
    }
    return true;
}

} // namespace

std::string mf_kind_name(MfKind kind) {
    switch (kind) {
        case MfKind::Triangular: return "triangular";
        case MfKind::Trapezoidal: return "trapezoidal";
        case MfKind::Gbell: return "gbell";
        case MfKind::Gaussian: return "gaussian";
    }
    throw std::runtime_error("mf_kind_name: unknown kind");
}

MfKind mf_kind_from_name(const std::string& name) {
    if (name == "triangular") return MfKind::Triangular;
    if (name == "trapezoidal") return MfKind::Trapezoidal;
    if (name == "gbell") return MfKind::Gbell;
    if (name == "gaussian") return MfKind::Gaussian;
    throw std::runtime_error("mf_kind_from_name: unknown MF family '" + name + "'");
}

std::size_t mf_param_count(MfKind kind) {
    switch (kind) {
        case MfKind::Triangular: return 3;
        case MfKind::Trapezoidal: return 4;
        case MfKind::Gbell: return 3;
        case MfKind::Gaussian: return 2;
    }
    throw std::runtime_error("mf_param_count: unknown kind");
}

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
    if (!(a <= b && b <= c)) throw std::runtime_error("triangular MF requires a <= b <= c");
    return {MfKind::Triangular, {a, b, c, 0.0}};
}

MembershipFunction MembershipFunction::trapezoidal(double a, double b, double c, double d) {
    if (!(a <= b && b <= c && c <= d))
        throw std::runtime_error("trapezoidal MF requires a <= b <= c <= d");
    return {MfKind::Trapezoidal, {a, b, c, d}};
}

MembershipFunction MembershipFunction::gbell(double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0)) throw std::runtime_error("gbell MF requires a > 0 and b > 0");
    return {MfKind::Gbell, {a, b, c, 0.0}};
}

MembershipFunction MembershipFunction::gaussian(double c, double sigma) {
    if (!(sigma > 0.0)) throw std::runtime_error("gaussian MF requires sigma > 0");
    return {MfKind::Gaussian, {c, sigma, 0.0, 0.0}};
}

double mf_eval(const MembershipFunction& mf, double x) {
    switch (mf.kind) {
        case MfKind::Triangular: {
            const double a = mf.p[0], b = mf.p[1], c = mf.p[2];
            if (x < a || x > c) return 0.0;
            if (x < b) return (x - a) / (b - a); // x >= a and x < b imply b > a
            if (x > b) return (c - x) / (c - b);
            return 1.0;
        }
        case MfKind::Trapezoidal: {
            const double a = mf.p[0], b = mf.p[1], c = mf.p[2], d = mf.p[3];
            if (x < a || x > d) return 0.0;
            if (x < b) return (x - a) / (b - a);
            if (x > c) return (d - x) / (d - c);
            return 1.0;
        }
        case MfKind::Gbell: {
            const double a = mf.p[0], b = mf.p[1], c = mf.p[2];
            const double u2 = ((x - c) / a) * ((x - c) / a);
            const double t = std::pow(u2, b);
            return 1.0 / (1.0 + t);
        }
        case MfKind::Gaussian: {
            const double c = mf.p[0], sigma = mf.p[1];
            const double z = (x - c) / sigma;
            return std::exp(-0.5 * z * z);
        }
    }
    throw std::runtime_error("mf_eval: unknown kind");
}

void mf_param_grad(const MembershipFunction& mf, double x, double grad[4]) {
    grad[0] = grad[1] = grad[2] = grad[3] = 0.0;
    switch (mf.kind) {
        case MfKind::Triangular: {
            const double a = mf.p[0], b = mf.p[1], c = mf.p[2];
            if (x > a && x < b) {
                const double w = (b - a) * (b - a);
                grad[0] = (x - b) / w;
                grad[1] = -(x - a) / w;
            } else if (x > b && x < c) {
                const double w = (c - b) * (c - b);
                grad[1] = (c - x) / w;
                grad[2] = (x - b) / w;
            }
            return;
        }
        case MfKind::Trapezoidal: {
            const double a = mf.p[0], b = mf.p[1], c = mf.p[2], d = mf.p[3];
            if (x > a && x < b) {
                const double w = (b - a) * (b - a);
                grad[0] = (x - b) / w;
                grad[1] = -(x - a) / w;
            } else if (x > c && x < d) {
                const double w = (d - c) * (d - c);
                grad[2] = (d - x) / w;
                grad[3] = (x - c) / w;
            }
            return;
        }
        case MfKind::Gbell: {
            const double a = mf.p[0], b = mf.p[1], c = mf.p[2];
            const double u2 = ((x - c) / a) * ((x - c) / a);
            const double t = std::pow(u2, b);
            if (!std::isfinite(t) || t == 0.0) return; // flat tails / peak
            const double mu = 1.0 / (1.0 + t);
            const double mu2 = mu * mu;
            grad[0] = mu2 * 2.0 * b * t / a;
            grad[1] = -mu2 * t * std::log(u2);
            grad[2] = mu2 * 2.0 * b * t / (x - c);
            return;
        }
        case MfKind::Gaussian: {
            const double c = mf.p[0], sigma = mf.p[1];
            const double z = (x - c) / sigma;
            const double mu = std::exp(-0.5 * z * z);
            grad[0] = mu * (x - c) / (sigma * sigma);
            grad[1] = mu * (x - c) * (x - c) / (sigma * sigma * sigma);
            return;
        }
    }
    throw std::runtime_error("mf_param_grad: unknown kind");
}

AnfisModel anfis_init_grid(const Dataset& train, MfKind kind, std::uint64_t /*seed*/) {
    if (train.n == 0) throw std::runtime_error("anfis_init_grid: empty training set");
    AnfisModel model;
    model.consequents.assign(kCoeffs, 0.0);
    for (std::size_t j = 0; j < kInputs; ++j) {
        double lo = train.features[j];
        double hi = train.features[j];
        for (std::size_t i = 1; i < train.n; ++i) {
            lo = std::min(lo, train.features[i * kInputs + j]);
            hi = std::max(hi, train.features[i * kInputs + j]);
        }
        const double range = hi - lo;
        if (!(range > 0.0))
            throw std::runtime_error("anfis_init_grid: degenerate range for input " + std::to_string(j));
        const double width = range / 2.0;
        for (std::size_t k = 0; k < AnfisModel::kMfsPerInput; ++k) {
            const double center = lo + range * static_cast<double>(k + 1) / 3.0;
            switch (kind) {
                case MfKind::Triangular:
                    model.premise[j][k] =
                        MembershipFunction::triangular(center - width, center, center + width);
                    break;
                case MfKind::Trapezoidal:
                    model.premise[j][k] = MembershipFunction::trapezoidal(
                        center - width, center - width / 4.0, center + width / 4.0, center + width);
                    break;
                case MfKind::Gbell:
                    // half-width at half-maximum = range/6 puts the 0.5
                    // crossing at the midpoint between the two centers
                    model.premise[j][k] = MembershipFunction::gbell(range / 6.0, 2.0, center);
                    break;
                case MfKind::Gaussian:
                    model.premise[j][k] = MembershipFunction::gaussian(
                        center, (range / 6.0) / std::sqrt(2.0 * std::log(2.0)));
                    break;
            }
        }
    }
    return model;
}

AnfisOutput anfis_forward(const AnfisModel& model, const double* x) {
    double mu[kInputs][AnfisModel::kMfsPerInput];
    for (std::size_t j = 0; j < kInputs; ++j)
        for (std::size_t k = 0; k < AnfisModel::kMfsPerInput; ++k)
            mu[j][k] = mf_eval(model.premise[j][k], x[j]);

    AnfisOutput out;
    double total = 0.0;
    for (std::size_t i = 0; i < kRules; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < kInputs; ++j) w *= mu[j][model.mf_index(i, j)];
        out.firing[i] = w;
        total += w;
    }
    if (total < kStarvationFloor) {
        out.starved = true;
        out.output = 0.0;
        return out;
    }
    double y = 0.0;
    for (std::size_t i = 0; i < kRules; ++i) {
        out.normalized[i] = out.firing[i] / total;
        const double* q = model.consequents.data() + i * AnfisModel::kConsequentCols;
        double f = q[kInputs];
        for (std::size_t j = 0; j < kInputs; ++j) f += q[j] * x[j];
        y += out.normalized[i] * f;
    }
    out.output = y;
    return out;
}

double anfis_mse(const AnfisModel& model, const Dataset& data) {
    if (data.n == 0) throw std::runtime_error("anfis_mse: empty dataset");
    double sum = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double e = anfis_forward(model, data.row(i)).output - data.targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(data.n);
}

void lse_consequents(AnfisModel& model, const Dataset& train, double damping) {
    if (train.n == 0) throw std::runtime_error("lse_consequents: empty training set");

    // Accumulate the normal equations over fixed row chunks (partial sums
    // combined in chunk order, so results do not depend on thread count).
    constexpr std::size_t kChunks = 8;
    std::vector<std::vector<double>> partial_ata(kChunks);
    std::vector<std::vector<double>> partial_atb(kChunks);

    auto accumulate = [&](std::size_t chunk) {
        std::vector<double>& ata = partial_ata[chunk];
        std::vector<double>& atb = partial_atb[chunk];
        ata.assign(kCoeffs * kCoeffs, 0.0);
        atb.assign(kCoeffs, 0.0);
        std::vector<double> phi(kCoeffs);
        const std::size_t begin = train.n * chunk / kChunks;
        const std::size_t end = train.n * (chunk + 1) / kChunks;
        for (std::size_t r = begin; r < end; ++r) {
            const double* x = train.row(r);
            const AnfisOutput fwd = anfis_forward(model, x);
            if (fwd.starved) continue;
            for (std::size_t i = 0; i < kRules; ++i) {
                double* slot = phi.data() + i * AnfisModel::kConsequentCols;
                for (std::size_t j = 0; j < kInputs; ++j) slot[j] = fwd.normalized[i] * x[j];
                slot[kInputs] = fwd.normalized[i];
            }
            const double y = train.targets[r];
            for (std::size_t i = 0; i < kCoeffs; ++i) {
                const double pi = phi[i];
                if (pi == 0.0) continue;
                double* row = ata.data() + i * kCoeffs;
                for (std::size_t j = i; j < kCoeffs; ++j) row[j] += pi * phi[j];
                atb[i] += pi * y;
            }
        }
    };

    if (train.n >= 256 && std::thread::hardware_concurrency() > 1) {
        std::vector<std::thread> workers;
        for (std::size_t c = 0; c < kChunks; ++c) workers.emplace_back(accumulate, c);
        for (auto& w : workers) w.join();
    } else {
        for (std::size_t c = 0; c < kChunks; ++c) accumulate(c);
    }

    std::vector<double> ata(kCoeffs * kCoeffs, 0.0);
    std::vector<double> atb(kCoeffs, 0.0);
    for (std::size_t c = 0; c < kChunks; ++c) {
        for (std::size_t i = 0; i < kCoeffs * kCoeffs; ++i) ata[i] += partial_ata[c][i];
        for (std::size_t i = 0; i < kCoeffs; ++i) atb[i] += partial_atb[c][i];
    }
    for (std::size_t i = 0; i < kCoeffs; ++i) {
        ata[i * kCoeffs + i] += damping;
        for (std::size_t j = 0; j < i; ++j) ata[i * kCoeffs + j] = ata[j * kCoeffs + i];
    }

    if (!cholesky_solve(ata, atb, kCoeffs))
        throw std::runtime_error("lse_consequents: damped normal equations are numerically singular");
    model.consequents = std::move(atb);
}

void premise_gradient_step(AnfisModel& model, const Dataset& train, double learning_rate) {
    if (!(learning_rate >= 0.0)) throw std::runtime_error("premise_gradient_step: negative learning rate");
    if (train.n == 0) throw std::runtime_error("premise_gradient_step: empty training set");

    double grad[kInputs][AnfisModel::kMfsPerInput][4] = {};
    double mu[kInputs][AnfisModel::kMfsPerInput];
    double dmu[kInputs][AnfisModel::kMfsPerInput][4];

    const double scale = 2.0 / static_cast<double>(train.n);
    for (std::size_t r = 0; r < train.n; ++r) {
        const double* x = train.row(r);
        for (std::size_t j = 0; j < kInputs; ++j)
            for (std::size_t k = 0; k < AnfisModel::kMfsPerInput; ++k) {
                mu[j][k] = mf_eval(model.premise[j][k], x[j]);
                mf_param_grad(model.premise[j][k], x[j], dmu[j][k]);
            }

        double firing[kRules];
        double total = 0.0;
        for (std::size_t i = 0; i < kRules; ++i) {
            double w = 1.0;
            for (std::size_t j = 0; j < kInputs; ++j) w *= mu[j][model.mf_index(i, j)];
            firing[i] = w;
            total += w;
        }
        if (total < kStarvationFloor) continue; // output pinned at 0; no premise gradient

        double rule_out[kRules];
        double y = 0.0;
        for (std::size_t i = 0; i < kRules; ++i) {
            const double* q = model.consequents.data() + i * AnfisModel::kConsequentCols;
            double f = q[kInputs];
            for (std::size_t j = 0; j < kInputs; ++j) f += q[j] * x[j];
            rule_out[i] = f;
            y += firing[i] / total * f;
        }
        const double err_coef = scale * (y - train.targets[r]);

        for (std::size_t i = 0; i < kRules; ++i) {
            // d(output)/d(w_i) = (f_i - output) / total
            const double g_rule = err_coef * (rule_out[i] - y) / total;
            if (g_rule == 0.0) continue;
            // product of the other four membership values per input
            double prefix[kInputs + 1];
            double suffix[kInputs + 1];
            prefix[0] = 1.0;
            suffix[kInputs] = 1.0;
            for (std::size_t j = 0; j < kInputs; ++j)
                prefix[j + 1] = prefix[j] * mu[j][model.mf_index(i, j)];
            for (std::size_t j = kInputs; j-- > 0;)
                suffix[j] = suffix[j + 1] * mu[j][model.mf_index(i, j)];
            for (std::size_t j = 0; j < kInputs; ++j) {
                const std::size_t k = model.mf_index(i, j);
                const double excl = prefix[j] * suffix[j + 1];
                if (excl == 0.0) continue;
                const double gw = g_rule * excl;
                for (std::size_t t = 0; t < 4; ++t) grad[j][k][t] += gw * dmu[j][k][t];
            }
        }
    }

    for (std::size_t j = 0; j < kInputs; ++j)
        for (std::size_t k = 0; k < AnfisModel::kMfsPerInput; ++k) {
            MembershipFunction& mf = model.premise[j][k];
            const std::size_t np = mf_param_count(mf.kind);
            for (std::size_t t = 0; t < np; ++t) mf.p[t] -= learning_rate * grad[j][k][t];
            // project back onto the valid parameter set
            switch (mf.kind) {
                case MfKind::Triangular:
                    std::sort(mf.p.begin(), mf.p.begin() + 3);
                    break;
                case MfKind::Trapezoidal:
                    std::sort(mf.p.begin(), mf.p.begin() + 4);
                    break;
                case MfKind::Gbell:
                    mf.p[0] = std::max(mf.p[0], kWidthFloor);
                    mf.p[1] = std::max(mf.p[1], kWidthFloor);
                    break;
                case MfKind::Gaussian:
                    mf.p[1] = std::max(mf.p[1], kWidthFloor);
                    break;
            }
        }
}

AnfisTrainResult train_anfis_hybrid(const AnfisModel& init, const Dataset& train,
                                    const AnfisTrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::runtime_error("train_anfis_hybrid: epochs must be >= 1");
    AnfisTrainResult result;
    result.model = init;
    result.trace.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        lse_consequents(result.model, train);
        result.trace.push_back(anfis_mse(result.model, train));
        premise_gradient_step(result.model, train, cfg.premise_learning_rate);
    }
    // the last premise step may have moved off the LSE optimum; re-solve
    lse_consequents(result.model, train);
    return result;
}

void save_anfis(const AnfisModel& model, const std::string& path) {
    std::ofstream fout(path);
    if (!fout) throw std::runtime_error("save_anfis: cannot open " + path);
    fout.precision(17);
    fout << "model anfis\n";
    fout << "premise\n";
    for (std::size_t j = 0; j < kInputs; ++j)
        for (std::size_t k = 0; k < AnfisModel::kMfsPerInput; ++k) {
            const MembershipFunction& mf = model.premise[j][k];
            fout << j << ' ' << k << ' ' << mf_kind_name(mf.kind);
            for (std::size_t t = 0; t < mf_param_count(mf.kind); ++t) fout << ' ' << mf.p[t];
            fout << '\n';
        }
    fout << "consequents\n";
    for (std::size_t i = 0; i < kRules; ++i) {
        for (std::size_t c = 0; c < AnfisModel::kConsequentCols; ++c)
            fout << (c ? " " : "") << model.consequents[i * AnfisModel::kConsequentCols + c];
        fout << '\n';
    }
}

AnfisModel load_anfis(const std::string& path) {
    std::ifstream fin(path);
    if (!fin) throw std::runtime_error("load_anfis: cannot open " + path);
    std::string key, name;
    fin >> key >> name;
    if (key != "model" || name != "anfis") throw std::runtime_error("load_anfis: not an anfis model file");
    fin >> key; // "premise"
    AnfisModel model;
    for (std::size_t row = 0; row < kInputs * AnfisModel::kMfsPerInput; ++row) {
        std::size_t j = 0, k = 0;
        fin >> j >> k >> name;
        if (!fin || j >= kInputs || k >= AnfisModel::kMfsPerInput)
            throw std::runtime_error("load_anfis: malformed premise section");
        MembershipFunction mf;
        mf.kind = mf_kind_from_name(name);
        for (std::size_t t = 0; t < mf_param_count(mf.kind); ++t)
            if (!(fin >> mf.p[t])) throw std::runtime_error("load_anfis: truncated MF parameters");
        model.premise[j][k] = mf;
    }
    fin >> key; // "consequents"
    model.consequents.resize(kCoeffs);
    for (double& v : model.consequents)
        if (!(fin >> v)) throw std::runtime_error("load_anfis: truncated consequent matrix");
    return model;
}

} // namespace solreg
