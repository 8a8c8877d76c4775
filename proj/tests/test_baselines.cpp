#include <doctest.h>

#include <cmath>

#include "funcnn/errors.hpp"
#include "funcnn/flm.hpp"
#include "funcnn/fnn.hpp"
#include "funcnn/mlp.hpp"
#include "support/fd_check.hpp"

using namespace funcnn;

TEST_CASE("flm recovers an exactly linear signal in the basis span") {
    const GridPtr grid = make_uniform_grid(100, 0.0, 1.0);
    const BsplineBasis basis(4, 3);
    Rng rng(17);

    CurveSet data = fdcheck::random_batch(grid, 120, ResponseKind::Continuous, 4);
    // y = integral of beta(t) x(t) dt with beta in the span
    Vec coef(basis.n_basis());
    for (int i = 0; i < coef.size(); ++i) coef(i) = rng.uniform(-2.0, 2.0);
    const Vec beta = basis.design(*grid) * coef;
    data.y = data.x[0] * (grid->weights().asDiagonal() * beta);

    std::vector<int> train(80), test(40);
    for (int i = 0; i < 80; ++i) train[i] = i;
    for (int i = 0; i < 40; ++i) test[i] = 80 + i;

    const FlmModel model = FlmModel::fit(data, train, basis, 0.0, LinkKind::Identity);
    const Vec pred = model.predict(data, test);
    CHECK((pred - gather_y(data, test)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("flm least squares leaves residuals orthogonal to the design") {
    const GridPtr grid = make_uniform_grid(80, 0.0, 1.0);
    const BsplineBasis basis(4, 2);
    CurveSet data = fdcheck::random_batch(grid, 100, ResponseKind::Continuous, 9);
    std::vector<int> train(100);
    for (int i = 0; i < 100; ++i) train[i] = i;

    const FlmModel model = FlmModel::fit(data, train, basis, 0.0, LinkKind::Identity);
    const Vec resid = gather_y(data, train) - model.predict(data, train);
    const Mat z = FlmModel::design_matrix(data, train, basis);
    CHECK(std::abs(resid.sum()) < 1e-8);  // intercept column
    CHECK((z.transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("flm singular design with ridge 0 advises ridge > 0") {
    const GridPtr grid = make_uniform_grid(60, 0.0, 1.0);
    const BsplineBasis basis(4, 4);  // 8 basis functions
    CurveSet data = fdcheck::random_batch(grid, 5, ResponseKind::Continuous, 2);  // n < p
    std::vector<int> train = {0, 1, 2, 3, 4};
    CHECK_THROWS_WITH_AS(FlmModel::fit(data, train, basis, 0.0, LinkKind::Identity),
                         doctest::Contains("ridge"), numeric_error);
    // the same design fits fine with a positive ridge
    CHECK_NOTHROW(FlmModel::fit(data, train, basis, 1e-6, LinkKind::Identity));
}

TEST_CASE("flm logistic link estimates probabilities") {
    const GridPtr grid = make_uniform_grid(60, 0.0, 1.0);
    const BsplineBasis basis(4, 3);
    Rng rng(21);
    const Mat curves = sample_gp_matrix(600, *grid, MaternParams{0.5, 1.0}, rng.split("x").seed());
    const Scenario sc{ScenarioKind::Linear, ResponseKind::Binary, 1.0};
    const CurveSet data = gen_dataset(sc, grid, {curves}, rng.split("y").seed());

    std::vector<int> train(500), test(100);
    for (int i = 0; i < 500; ++i) train[i] = i;
    for (int i = 0; i < 100; ++i) test[i] = 500 + i;
    const FlmModel model = FlmModel::fit(data, train, basis, 1e-6, LinkKind::Logistic);
    const Vec p = model.predict(data, test);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() <= 1.0);
    // better than chance on the signal it was generated from
    double err = 0.0;
    for (int i = 0; i < 100; ++i) {
        err += (p(i) >= 0.5 ? 1.0 : 0.0) != data.y(500 + i) ? 1.0 : 0.0;
    }
    CHECK(err / 100.0 < 0.45);
}

TEST_CASE("fnn with zero parameters predicts 0 and reduces to flm under identity") {
    const GridPtr grid = make_uniform_grid(90, 0.0, 1.0);
    FnnArch arch;
    arch.inputs = 1;
    arch.input_grid = grid;
    arch.functional_neurons = 1;
    arch.dense_widths = {};
    arch.hidden_act = Activation::Linear;
    arch.output_act = Activation::Linear;
    FnnModel model = FnnModel::init(arch, 3);
    std::vector<double> zeros(model.parameters().size(), 0.0);
    model.set_parameters(zeros);
    const CurveSet data = fdcheck::random_batch(grid, 10, ResponseKind::Continuous, 8);
    std::vector<int> idx(10);
    for (int i = 0; i < 10; ++i) idx[i] = i;
    CHECK(model.predict(data, idx).cwiseAbs().maxCoeff() == 0.0);

    // W(t) = reconstruction of flm beta, unit passthrough dense layer:
    // predictions coincide with the flm functional form
    const BsplineBasis basis(4, 3);
    Rng rng(5);
    Mat beta_coef(1, basis.n_basis());
    for (int i = 0; i < beta_coef.size(); ++i) beta_coef(0, i) = rng.uniform(-2.0, 2.0);
    const double alpha = 0.83;
    const FlmModel flm(grid, basis, alpha, beta_coef, 0.0, LinkKind::Identity);

    FnnModel twin = model;
    twin.func_weight()[0] = basis.design(*grid) * beta_coef.row(0).transpose();
    twin.func_bias()(0) = alpha;
    twin.dense().layers()[0].w(0, 0) = 1.0;
    twin.dense().layers()[0].b(0) = 0.0;
    CHECK((twin.predict(data, idx) - flm.predict(data, idx)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fnn and mlp gradients match central finite differences") {
    Rng seeds(88);
    const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        const LossKind loss =
            trial % 2 == 0 ? LossKind::SquaredError : LossKind::BinaryCrossEntropy;
        const ResponseKind kind =
            loss == LossKind::SquaredError ? ResponseKind::Continuous : ResponseKind::Binary;
        const Activation out =
            loss == LossKind::SquaredError ? Activation::Linear : Activation::Sigmoid;
        const CurveSet data = fdcheck::random_batch(grid, 6, kind, seeds.split(trial).seed());
        const std::vector<int> idx = {0, 1, 2, 3, 4, 5};

        FnnArch fa;
        fa.inputs = 1;
        fa.input_grid = grid;
        fa.functional_neurons = 3;
        fa.dense_widths = {4};
        fa.hidden_act = trial % 2 == 0 ? Activation::Tanh : Activation::Sigmoid;
        fa.output_act = out;
        FnnModel fnn = FnnModel::init(fa, seeds.split(trial + 10).seed());
        const fdcheck::Report fr = fdcheck::certify(fnn, data, idx, loss);
        CAPTURE(trial);
        CHECK(fr.max_rel_err <= 1e-5);
        CHECK(fr.max_abs_err_small <= 1e-9);

        MlpArch ma;
        ma.inputs = 1;
        ma.input_grid = grid;
        ma.dense_widths = {4, 3};
        ma.hidden_act = fa.hidden_act;
        ma.output_act = out;
        MlpModel mlp = MlpModel::init(ma, seeds.split(trial + 20).seed());
        const fdcheck::Report mr = fdcheck::certify(mlp, data, idx, loss);
        CHECK(mr.max_rel_err <= 1e-5);
        CHECK(mr.max_abs_err_small <= 1e-9);
    }
}

TEST_CASE("mlp with zero parameters predicts 0") {
    const GridPtr grid = make_uniform_grid(30, 0.0, 1.0);
    MlpArch arch;
    arch.inputs = 1;
    arch.input_grid = grid;
    arch.dense_widths = {8};
    arch.output_act = Activation::Linear;
    MlpModel model = MlpModel::init(arch, 4);
    std::vector<double> zeros(model.parameters().size(), 0.0);
    model.set_parameters(zeros);
    const CurveSet data = fdcheck::random_batch(grid, 5, ResponseKind::Continuous, 6);
    CHECK(model.predict(data, {0, 1, 2, 3, 4}).cwiseAbs().maxCoeff() == 0.0);
}
