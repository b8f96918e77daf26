#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "solreg/mlp.hpp"
#include "solreg/rng.hpp"
#include "test_util.hpp"

using namespace solreg;

TEST_CASE("activation values at reference points") {
    CHECK(activation_eval(ActivationKind::Tanh, 0.0) == 0.0);
    CHECK(activation_eval(ActivationKind::Sigmoid, 0.0) == 0.5);
    // independent evaluation of (e - 1/e)/(e + 1/e)
    const double e1 = std::exp(1.0);
    const double tanh1 = (e1 - 1.0 / e1) / (e1 + 1.0 / e1);
    CHECK(activation_eval(ActivationKind::Tanh, 1.0) == doctest::Approx(tanh1).epsilon(1e-15));
    CHECK(activation_eval(ActivationKind::Identity, -3.5) == -3.5);
}

TEST_CASE("activations are numerically stable at large magnitudes") {
    CHECK(activation_eval(ActivationKind::Sigmoid, 700.0) == doctest::Approx(1.0));
    CHECK(activation_eval(ActivationKind::Sigmoid, -700.0) == doctest::Approx(0.0));
    CHECK(activation_eval(ActivationKind::Tanh, 700.0) == doctest::Approx(1.0));
    CHECK(std::isfinite(activation_eval(ActivationKind::Sigmoid, -700.0)));
}

TEST_CASE("tanh odd symmetry and sigmoid complement") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-20, 20);
        CHECK(activation_eval(ActivationKind::Tanh, -x) ==
              doctest::Approx(-activation_eval(ActivationKind::Tanh, x)).epsilon(1e-12));
        CHECK(activation_eval(ActivationKind::Sigmoid, x) +
                  activation_eval(ActivationKind::Sigmoid, -x) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("forward pass of the zero network") {
    MlpParams p = vector_to_param(std::vector<double>(mlp_param_count(4), 0.0), 4);
    const double x[5] = {1.0, -2.0, 3.0, 0.5, -0.25};
    CHECK(mlp_forward(p, x) == 0.0);
}

TEST_CASE("forward pass: output bias passes through with zero weights") {
    MlpParams p = vector_to_param(std::vector<double>(mlp_param_count(3), 0.0), 3);
    p.b2 = 0.75;
    const double x[5] = {1, 2, 3, 4, 5};
    CHECK(mlp_forward(p, x) == 0.75);
}

TEST_CASE("forward pass composes with the activation") {
    MlpParams p;
    p.hidden_dim = 1;
    p.w1 = {1, 0, 0, 0, 0};
    p.b1 = {0};
    p.w2 = {1};
    p.b2 = 0;
    const double x[5] = {1.0, 9.0, -4.0, 2.0, 7.0};
    CHECK(mlp_forward(p, x) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("mlp_init is deterministic with bounded weights") {
    const auto a = mlp_init(20, 99);
    const auto b = mlp_init(20, 99);
    CHECK(param_to_vector(a) == param_to_vector(b));
    CHECK(param_to_vector(a).size() == 141);
    const double lim1 = 1.0 / std::sqrt(5.0);
    for (double w : a.w1) CHECK(std::abs(w) <= lim1);
    for (double b1 : a.b1) CHECK(b1 == 0.0);
    CHECK(a.b2 == 0.0);
    CHECK(param_to_vector(mlp_init(20, 100)) != param_to_vector(a));
    CHECK_THROWS_AS(mlp_init(0, 1), std::runtime_error);
    CHECK_THROWS_AS(mlp_init(2000, 1), std::runtime_error);
}

TEST_CASE("zero network on zero targets has zero gradient") {
    MlpParams p = vector_to_param(std::vector<double>(mlp_param_count(6), 0.0), 6);
    const auto data = testutil::random_dataset(20, 5, [](const double*) { return 0.0; });
    for (double g : backprop_gradient(p, data)) CHECK(g == 0.0);
}

TEST_CASE("backprop matches central finite differences over random instances") {
    Rng rng(21);
    double worst = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t hidden = 1 + static_cast<std::size_t>(rng.uniform01() * 8);
        const auto hidden_act = trial % 2 ? ActivationKind::Tanh : ActivationKind::Sigmoid;
        const auto output_act = trial % 3 ? ActivationKind::Identity : ActivationKind::Tanh;
        MlpParams p = mlp_init(hidden, rng.next_u64(), hidden_act, output_act);
        for (double& w : p.b1) w = rng.uniform(-0.5, 0.5);
        p.b2 = rng.uniform(-0.5, 0.5);
        const auto data = testutil::random_dataset(
            4 + trial % 7, rng.next_u64(), [&rng](const double*) { return 0.0; });
        Dataset noisy = data;
        for (double& t : noisy.targets) t = rng.uniform(-1, 1);

        const auto analytic = backprop_gradient(p, noisy);
        const auto fd = testutil::finite_difference(
            [&](const std::vector<double>& v) {
                return mlp_mse(vector_to_param(v, hidden, hidden_act, output_act), noisy);
            },
            param_to_vector(p), 1e-6);
        worst = std::max(worst, testutil::max_relative_error(analytic, fd, 1e-4));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("gradient of a duplicated row equals the single-row gradient") {
    MlpParams p = mlp_init(5, 77);
    Dataset one = testutil::random_dataset(1, 8, [](const double* x) { return x[0] * 0.5; });
    Dataset many = one;
    for (int k = 0; k < 6; ++k) {
        many.features.insert(many.features.end(), one.features.begin(),
                             one.features.begin() + Dataset::kNumFeatures);
        many.targets.push_back(one.targets[0]);
        ++many.n;
    }
    const auto ga = backprop_gradient(p, one);
    const auto gb = backprop_gradient(p, many);
    for (std::size_t k = 0; k < ga.size(); ++k)
        CHECK(ga[k] == doctest::Approx(gb[k]).epsilon(1e-12));
}

TEST_CASE("train_mlp_gd with zero learning rate leaves parameters unchanged") {
    const auto data = testutil::random_dataset(30, 4, [](const double* x) { return x[1]; });
    MlpParams init = mlp_init(4, 12);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 5;
    const auto r = train_mlp_gd(init, data, cfg);
    CHECK(param_to_vector(r.params) == param_to_vector(init));
    CHECK(r.trace.size() == 5);
    for (double v : r.trace) CHECK(v == doctest::Approx(r.trace[0]));
}

TEST_CASE("train_mlp_gd fits a linearly representable target") {
    // independent oracle: ordinary least squares on (x1, 1) has zero
    // residual for y = 0.3*x1, so a linear network can represent it
    const auto data = testutil::random_dataset(100, 9, [](const double* x) { return 0.3 * x[0]; });
    {
        std::vector<double> A(data.n * 2), b(data.targets);
        for (std::size_t i = 0; i < data.n; ++i) {
            A[i * 2] = data.row(i)[0];
            A[i * 2 + 1] = 1.0;
        }
        const auto coef = testutil::qr_least_squares(A, b, data.n, 2);
        double residual = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) {
            const double e = coef[0] * data.row(i)[0] + coef[1] - data.targets[i];
            residual += e * e;
        }
        REQUIRE(residual / data.n < 1e-20);
    }

    MlpParams init = mlp_init(8, 3, ActivationKind::Tanh, ActivationKind::Identity);
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 2000;
    const auto r = train_mlp_gd(init, data, cfg);
    CHECK(r.trace.size() == 2000);
    CHECK(r.trace.back() < 1e-4);
    CHECK(r.trace.back() <= r.trace.front());
}

TEST_CASE("train_mlp_gd applies exactly one step when epochs == 1") {
    const auto data = testutil::random_dataset(10, 2, [](const double* x) { return x[2]; });
    MlpParams init = mlp_init(3, 1);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 1;
    const auto r = train_mlp_gd(init, data, cfg);
    const auto grad = backprop_gradient(init, data);
    const auto v0 = param_to_vector(init);
    const auto v1 = param_to_vector(r.params);
    for (std::size_t k = 0; k < v0.size(); ++k)
        CHECK(v1[k] == doctest::Approx(v0[k] - 0.1 * grad[k]).epsilon(1e-15));
    CHECK(r.trace.size() == 1);
}

TEST_CASE("loss trace is non-increasing on a convex sub-case") {
    // identity activations make the model linear in its parameters
    const auto data = testutil::random_dataset(60, 14, [](const double* x) {
        return 0.2 * x[0] - 0.1 * x[3] + 0.05;
    });
    MlpParams init = mlp_init(4, 5, ActivationKind::Identity, ActivationKind::Identity);
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.epochs = 300;
    const auto r = train_mlp_gd(init, data, cfg);
    for (std::size_t e = 1; e < r.trace.size(); ++e) CHECK(r.trace[e] <= r.trace[e - 1] + 1e-15);
}

TEST_CASE("forward output is Lipschitz in any single weight") {
    MlpParams p = mlp_init(6, 31);
    const double x[5] = {0.3, -0.7, 0.1, 0.9, -0.2};
    const double base = mlp_forward(p, x);
    // perturbing w2[h] by eps changes the output by at most eps (|Q| <= 1)
    const double eps = 1e-3;
    for (std::size_t h = 0; h < p.hidden_dim; ++h) {
        MlpParams q = p;
        q.w2[h] += eps;
        CHECK(std::abs(mlp_forward(q, x) - base) <= eps + 1e-12);
    }
    // perturbing w1[h][j] changes the output by at most |w2[h]|*|x_j|*eps
    for (std::size_t h = 0; h < p.hidden_dim; ++h) {
        MlpParams q = p;
        q.w1[h * 5 + 1] += eps;
        CHECK(std::abs(mlp_forward(q, x) - base) <= std::abs(p.w2[h]) * std::abs(x[1]) * eps + 1e-12);
    }
}

TEST_CASE("parameter vector codec") {
    MlpParams p = mlp_init(20, 55);
    const auto v = param_to_vector(p);
    CHECK(v.size() == 141);
    const MlpParams q = vector_to_param(v, 20, p.hidden_activation, p.output_activation);
    CHECK(param_to_vector(q) == v);
    CHECK(q.w1 == p.w1);
    CHECK(q.b2 == p.b2);
    CHECK_THROWS_WITH_AS(vector_to_param(std::vector<double>(140, 0.0), 20),
                         doctest::Contains("expected length 141"), std::runtime_error);
}

TEST_CASE("model persistence round trip") {
    MlpParams p = mlp_init(7, 1234, ActivationKind::Tanh, ActivationKind::Tanh);
    const auto path = (std::filesystem::temp_directory_path() / "solreg_mlp_model.txt").string();
    save_mlp(p, path);
    const MlpParams q = load_mlp(path);
    CHECK(param_to_vector(q) == param_to_vector(p));
    CHECK(q.hidden_activation == p.hidden_activation);
    CHECK(q.output_activation == p.output_activation);
    std::remove(path.c_str());
}
