#include <doctest.h>

#include <cmath>

#include "funcnn/errors.hpp"
#include "funcnn/fdnn.hpp"
#include "support/fd_check.hpp"

using namespace funcnn;

namespace {

FdnnArch small_arch(const GridPtr& grid, Activation hidden, Activation out, int layers = 1,
                    int neurons = 2, int s_points = 11) {
    FdnnArch arch;
    arch.inputs = 1;
    arch.input_grid = grid;
    for (int l = 0; l < layers; ++l) arch.hidden.push_back({neurons, s_points, hidden});
    arch.output_act = out;
    return arch;
}

}  // namespace

TEST_CASE("fdnn init shapes and determinism") {
    const GridPtr grid = make_uniform_grid(200, 0.0, 1.0);
    FdnnArch arch;
    arch.inputs = 1;
    arch.input_grid = grid;
    arch.hidden.push_back({2, 50, Activation::Tanh});
    arch.output_act = Activation::Linear;

    const FdnnModel m = FdnnModel::init(arch, 42);
    REQUIRE(m.hidden().size() == 1);
    CHECK(m.hidden()[0].bias.size() == 2);
    CHECK(m.hidden()[0].bias[0].size() == 50);
    CHECK(m.hidden()[0].weight.size() == 2);
    CHECK(m.hidden()[0].weight[0].rows() == 50);
    CHECK(m.hidden()[0].weight[0].cols() == 200);
    CHECK(m.parameter_count() == 2 * 50 + 2 * 50 * 200 + 2 * 50 + 1);

    const FdnnModel m2 = FdnnModel::init(arch, 42);
    const auto p1 = m.parameters();
    const auto p2 = m2.parameters();
    CHECK(p1 == p2);
}

TEST_CASE("fdnn rejects inconsistent chaining") {
    const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
    const FdnnModel good = FdnnModel::init(small_arch(grid, Activation::Tanh, Activation::Linear, 2), 1);

    std::vector<ContinuousLayer> layers(good.hidden());
    layers[1].j_in = 3;  // first layer emits 2
    layers[1].weight.resize(static_cast<std::size_t>(layers[1].k_out) * 3,
                            layers[1].weight[0]);
    CHECK_THROWS_AS(FdnnModel(1, layers, good.output()), std::invalid_argument);
}

TEST_CASE("fdnn forward on zero and unit parameter configurations") {
    const GridPtr grid = make_uniform_grid(101, 0.0, 1.0);
    FdnnModel model = FdnnModel::init(small_arch(grid, Activation::Linear, Activation::Linear), 3);
    std::vector<double> zeros(model.parameters().size(), 0.0);
    model.set_parameters(zeros);

    FdnnCache cache;
    const std::vector<GridFunction> x = {GridFunction(grid, Vec::Ones(101))};
    CHECK(model.forward(x, cache) == 0.0);

    FdnnModel sigmoid_out =
        FdnnModel::init(small_arch(grid, Activation::Linear, Activation::Sigmoid), 3);
    sigmoid_out.set_parameters(zeros);
    CHECK(sigmoid_out.forward(x, cache) == 0.5);

    // one hidden layer, identity activations, all weights 1, biases 0:
    // H(s) = integral of x = 1, output = integral of H = 1.
    FdnnModel ones = FdnnModel::init(small_arch(grid, Activation::Linear, Activation::Linear, 1, 1), 3);
    std::vector<double> p = ones.parameters();
    for (double& v : p) v = 1.0;
    p.back() = 0.0;  // output bias
    for (int i = 0; i < 11; ++i) p[i] = 0.0;  // hidden bias function
    ones.set_parameters(p);
    CHECK(ones.forward(x, cache) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fdnn backward trivial readouts") {
    const GridPtr grid = make_uniform_grid(31, 0.0, 1.0);
    FdnnModel model = FdnnModel::init(small_arch(grid, Activation::Linear, Activation::Linear), 5);
    std::vector<double> zeros(model.parameters().size(), 0.0);
    model.set_parameters(zeros);

    FdnnCache cache;
    const std::vector<GridFunction> x = {GridFunction(grid, grid->points())};
    model.forward(x, cache);
    const FdnnGradients grads = model.backward(cache, 1.0);
    CHECK(grads.out_bias == 1.0);  // sigma' = 1 for the linear output

    // d yhat / d w_out_j(t) = sigma'(pre) H_j(t) pointwise
    FdnnModel random_model =
        FdnnModel::init(small_arch(grid, Activation::Tanh, Activation::Sigmoid), 6);
    const Vec yhat = Vec::Constant(1, random_model.forward(x, cache));
    const FdnnGradients g2 = random_model.backward(cache, 1.0);
    const double sp = activate_deriv(Activation::Sigmoid, cache.out_pre(0));
    for (int j = 0; j < random_model.output().j_in; ++j) {
        const Vec expected = sp * cache.h.back()[j].row(0).transpose();
        CHECK((g2.out_weight[j] - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("fdnn gradients match central finite differences") {
    Rng seeds(2025);
    for (int trial = 0; trial < 6; ++trial) {
        const int layers = 1 + (trial % 2);
        const int neurons = 1 << (trial % 3);  // 1, 2, 4
        const Activation act = trial % 2 == 0 ? Activation::Tanh : Activation::Sigmoid;
        const LossKind loss = trial % 2 == 0 ? LossKind::SquaredError
                                             : LossKind::BinaryCrossEntropy;
        const ResponseKind kind =
            loss == LossKind::SquaredError ? ResponseKind::Continuous : ResponseKind::Binary;
        const Activation out = loss == LossKind::SquaredError ? Activation::Linear
                                                              : Activation::Sigmoid;
        const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
        FdnnModel model = FdnnModel::init(small_arch(grid, act, out, layers, neurons, 11),
                                          seeds.split(trial).seed());
        const CurveSet data = fdcheck::random_batch(grid, 6, kind, seeds.split(trial + 100).seed());
        const std::vector<int> idx = {0, 1, 2, 3, 4, 5};
        const fdcheck::Report report = fdcheck::certify(model, data, idx, loss);
        CAPTURE(trial);
        CHECK(report.max_rel_err <= 1e-5);
        CHECK(report.max_abs_err_small <= 1e-9);
    }
}

TEST_CASE("fdnn grad step basics") {
    const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
    FdnnModel model = FdnnModel::init(small_arch(grid, Activation::Tanh, Activation::Linear), 9);
    const std::vector<double> before = model.parameters();

    FdnnCache cache;
    const std::vector<GridFunction> x = {GridFunction(grid, grid->points())};
    model.forward(x, cache);
    FdnnGradients zero = model.backward(cache, 0.0);
    model.apply_gradients(zero, 0.1);
    CHECK(model.parameters() == before);

    FdnnGradients grads = model.backward(cache, 1.0);
    model.apply_gradients(grads, 0.0);
    CHECK(model.parameters() == before);

    grads.out_bias = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(model.apply_gradients(grads, 0.1), numeric_error);
    CHECK_THROWS_WITH_AS(model.apply_gradients(grads, 0.1), doctest::Contains("output bias"),
                         numeric_error);
}

TEST_CASE("gradient descent on a single scalar parameter converges at rate 1 - lr") {
    // Quadratic toy loss L = 0.5 (b - c)^2 on the output bias alone.
    const GridPtr grid = make_uniform_grid(5, 0.0, 1.0);
    FdnnModel model = FdnnModel::init(small_arch(grid, Activation::Linear, Activation::Linear), 1);
    std::vector<double> p(model.parameters().size(), 0.0);
    model.set_parameters(p);

    const double target = 3.0;
    const double lr = 0.25;
    double bias = 0.0;
    for (int it = 0; it < 10; ++it) {
        FdnnGradients grads;
        grads.hidden.resize(model.hidden().size());
        for (std::size_t l = 0; l < model.hidden().size(); ++l) {
            const ContinuousLayer& layer = model.hidden()[l];
            grads.hidden[l].bias.assign(layer.k_out, Vec::Zero(layer.out_grid->size()));
            grads.hidden[l].weight.assign(static_cast<std::size_t>(layer.k_out) * layer.j_in,
                                          Mat::Zero(layer.out_grid->size(), layer.in_grid->size()));
        }
        grads.out_weight.assign(model.output().j_in, Vec::Zero(model.output().in_grid->size()));
        grads.out_bias = bias - target;  // dL/db for L = 0.5 (b - c)^2
        model.apply_gradients(grads, lr);
        const double new_bias = model.parameters().back();
        CHECK(std::abs(new_bias - target) ==
              doctest::Approx((1.0 - lr) * std::abs(bias - target)).epsilon(1e-12));
        bias = new_bias;
    }
}

TEST_CASE("fdnn forward determinism and linear collapse") {
    const GridPtr grid = make_uniform_grid(64, 0.0, 1.0);
    FdnnModel model = FdnnModel::init(small_arch(grid, Activation::Linear, Activation::Linear), 17);
    // zero all biases so the map is exactly linear
    std::vector<double> p = model.parameters();
    FdnnModel probe = model;
    for (std::size_t l = 0; l < probe.hidden().size(); ++l) {
        for (Vec& b : probe.hidden()[l].bias) b.setZero();
    }
    probe.output().bias = 0.0;

    Rng rng(23);
    Vec x1(64), x2(64);
    for (int i = 0; i < 64; ++i) {
        x1(i) = rng.uniform(-1.0, 1.0);
        x2(i) = rng.uniform(-1.0, 1.0);
    }
    FdnnCache cache;
    const double f1 = probe.forward({GridFunction(grid, x1)}, cache);
    const double f1_again = probe.forward({GridFunction(grid, x1)}, cache);
    CHECK(f1 == f1_again);  // bit-identical

    const double f2 = probe.forward({GridFunction(grid, x2)}, cache);
    const double fsum = probe.forward({GridFunction(grid, (x1 + x2).eval())}, cache);
    const double fscaled = probe.forward({GridFunction(grid, (3.25 * x1).eval())}, cache);
    CHECK(std::abs(fsum - (f1 + f2)) < 1e-10);
    CHECK(std::abs(fscaled - 3.25 * f1) < 1e-10);
}

TEST_CASE("one full-batch step with small lr decreases the loss") {
    Rng seeds(31);
    for (int trial = 0; trial < 20; ++trial) {
        const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
        FdnnModel model = FdnnModel::init(
            small_arch(grid, Activation::Tanh, Activation::Linear, 1, 2, 11),
            seeds.split(trial).seed());
        const CurveSet data =
            fdcheck::random_batch(grid, 16, ResponseKind::Continuous, seeds.split(trial + 50).seed());
        std::vector<int> idx(16);
        for (int i = 0; i < 16; ++i) idx[i] = i;
        const double before = model.loss_and_gradients(data, idx, LossKind::SquaredError);
        model.step(1e-3);
        const double after = model.loss_and_gradients(data, idx, LossKind::SquaredError);
        CHECK(after < before);
    }
}

TEST_CASE("grid refinement with nearest-point resampling keeps predictions stable") {
    const GridPtr grid = make_uniform_grid(64, 0.0, 1.0);
    FdnnModel model =
        FdnnModel::init(small_arch(grid, Activation::Tanh, Activation::Linear, 1, 4, 50), 77);
    // brief training so the surfaces are not raw noise
    const CurveSet data = fdcheck::random_batch(grid, 32, ResponseKind::Continuous, 5);
    std::vector<int> idx(32);
    for (int i = 0; i < 32; ++i) idx[i] = i;
    for (int epoch = 0; epoch < 30; ++epoch) {
        model.loss_and_gradients(data, idx, LossKind::SquaredError);
        model.step(0.01);
    }

    // double the s-grid, copying parameters from the nearest old point
    const GridPtr fine = make_uniform_grid(100, 0.0, 1.0);
    ContinuousLayer layer = model.hidden()[0];
    const GridPtr coarse = layer.out_grid;
    auto nearest = [&](double s) {
        int best = 0;
        for (int i = 1; i < coarse->size(); ++i) {
            if (std::abs(coarse->points()(i) - s) < std::abs(coarse->points()(best) - s)) best = i;
        }
        return best;
    };
    ContinuousLayer refined = layer;
    refined.out_grid = fine;
    for (int k = 0; k < layer.k_out; ++k) {
        Vec b(fine->size());
        for (int i = 0; i < fine->size(); ++i) b(i) = layer.bias[k](nearest(fine->points()(i)));
        refined.bias[k] = b;
        for (int j = 0; j < layer.j_in; ++j) {
            Mat w(fine->size(), layer.in_grid->size());
            for (int i = 0; i < fine->size(); ++i) {
                w.row(i) = layer.w(k, j).row(nearest(fine->points()(i)));
            }
            refined.w(k, j) = w;
        }
    }
    FunctionalOutputLayer out = model.output();
    out.in_grid = fine;
    for (int j = 0; j < out.j_in; ++j) {
        Vec w(fine->size());
        for (int i = 0; i < fine->size(); ++i) w(i) = model.output().weight[j](nearest(fine->points()(i)));
        out.weight[j] = w;
    }
    FdnnModel refined_model(1, {refined}, out);

    const Vec coarse_pred = model.predict(data, idx);
    const Vec fine_pred = refined_model.predict(data, idx);
    const double rms_diff = std::sqrt((coarse_pred - fine_pred).squaredNorm() / idx.size());
    const double rms = std::sqrt(coarse_pred.squaredNorm() / idx.size());
    CHECK(rms_diff < 0.05 * rms);
}
