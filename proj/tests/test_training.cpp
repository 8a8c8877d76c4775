#include <doctest.h>

#include <cmath>

#include "funcnn/benchmark.hpp"
#include "funcnn/errors.hpp"
#include "funcnn/fdnn.hpp"
#include "funcnn/training.hpp"
#include "support/fd_check.hpp"

using namespace funcnn;

TEST_CASE("loss_and_grad analytic cases") {
    auto [l0, g0] = loss_and_grad(LossKind::SquaredError, 1.7, 1.7);
    CHECK(l0 == 0.0);
    CHECK(g0 == 0.0);

    auto [l1, g1] = loss_and_grad(LossKind::BinaryCrossEntropy, 0.5, 1.0);
    CHECK(l1 == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(g1 == doctest::Approx(-2.0).epsilon(1e-15));

    CHECK_THROWS_AS(loss_and_grad(LossKind::BinaryCrossEntropy, 0.5, 0.3),
                    std::invalid_argument);
}

TEST_CASE("loss gradient matches scalar finite differences") {
    Rng rng(2);
    const double h = 1e-7;
    for (int i = 0; i < 200; ++i) {
        const LossKind kind = i % 2 == 0 ? LossKind::SquaredError : LossKind::BinaryCrossEntropy;
        const double yhat = kind == LossKind::SquaredError ? rng.uniform(-3.0, 3.0)
                                                           : rng.uniform(0.05, 0.95);
        const double y = kind == LossKind::SquaredError ? rng.uniform(-3.0, 3.0)
                                                        : static_cast<double>(rng.bernoulli(0.5));
        const auto [loss, grad] = loss_and_grad(kind, yhat, y);
        (void)loss;
        const double fd = (loss_and_grad(kind, yhat + h, y).first -
                           loss_and_grad(kind, yhat - h, y).first) /
                          (2.0 * h);
        CHECK(std::abs(fd - grad) < 1e-8 * std::max(1.0, std::abs(grad)));
    }
}

TEST_CASE("make_split deals disjoint sets and a seed-stable test block") {
    const Split a = make_split(1500, 500, 500, 500, 42);
    a.validate(1500);
    CHECK(a.train.size() == 500);
    CHECK(a.val.size() == 500);
    CHECK(a.test.size() == 500);

    // same seed, no validation carve: test block identical, train = pool
    const Split b = make_split(1500, 1000, 0, 500, 42);
    b.validate(1500);
    CHECK(b.test == a.test);
    std::vector<int> pool_a = a.train;
    pool_a.insert(pool_a.end(), a.val.begin(), a.val.end());
    CHECK(b.train == pool_a);

    CHECK_THROWS_AS(make_split(10, 8, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("evaluate metrics") {
    Vec y(4), yhat(4);
    y << 1.0, 2.0, 3.0, 4.0;
    yhat = y;
    const Metrics perfect = evaluate(yhat, y, ResponseKind::Continuous);
    CHECK(perfect.rmse == 0.0);
    CHECK(std::isnan(perfect.classification_error));

    Vec yb(4), pb(4);
    yb << 0.0, 1.0, 0.0, 1.0;
    pb << 0.5, 0.5, 0.5, 0.5;
    const Metrics half = evaluate(pb, yb, ResponseKind::Binary);
    CHECK(half.classification_error == 0.5);  // ties classified positive
    CHECK(half.mean_log_likelihood == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(evaluate(Vec(), Vec(), ResponseKind::Continuous), std::invalid_argument);
}

TEST_CASE("a perfect eta predictor scores RMSE about 1 on unit-noise data") {
    const GridPtr grid = make_uniform_grid(100, 0.0, 1.0);
    Rng rng(64);
    const Mat curves = sample_gp_matrix(500, *grid, MaternParams{0.5, 1.0}, rng.split("x").seed());
    const Scenario sc{ScenarioKind::SingleIndex, ResponseKind::Continuous, 1.0};
    const CurveSet data = gen_dataset(sc, grid, {curves}, rng.split("noise").seed());
    const Vec eta = true_response_batch(sc, *grid, data.x);
    const Metrics m = evaluate(eta, data.y, ResponseKind::Continuous);
    CHECK(std::abs(m.rmse - 1.0) < 0.1);
}

namespace {

CurveSet linear_data(const GridPtr& grid, int n, std::uint64_t seed) {
    const Rng rng(seed);
    const Mat curves = sample_gp_matrix(n, *grid, MaternParams{0.5, 1.0}, rng.split("gp").seed());
    const Scenario sc{ScenarioKind::Linear, ResponseKind::Continuous, 1.0};
    return gen_dataset(sc, grid, {curves}, rng.split("data").seed());
}

FdnnModel small_fdnn(const GridPtr& grid, std::uint64_t seed) {
    FdnnArch arch;
    arch.inputs = 1;
    arch.input_grid = grid;
    arch.hidden.push_back({2, 11, Activation::Tanh});
    arch.output_act = Activation::Linear;
    return FdnnModel::init(arch, seed);
}

}  // namespace

TEST_CASE("fit with max_epochs 0 reports initial metrics only") {
    const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
    CurveSet data = linear_data(grid, 60, 3);
    FdnnModel model = small_fdnn(grid, 7);
    const std::vector<double> before = model.parameters();

    TrainConfig cfg;
    cfg.max_epochs = 0;
    cfg.early_stopping = false;
    const Split split = make_split(60, 40, 0, 20, 1);
    const FitReport report = fit(model, data, split, cfg);
    CHECK(report.epochs_run == 0);
    CHECK(report.best_epoch == 0);
    CHECK(report.train_loss.empty());
    CHECK(model.parameters() == before);
    CHECK(std::isfinite(report.test_metrics.rmse));
}

TEST_CASE("full-batch training loss is non-increasing with the halving safeguard") {
    Rng seeds(19);
    for (int trial = 0; trial < 5; ++trial) {
        const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
        CurveSet data = linear_data(grid, 50, seeds.split(trial).seed());
        FdnnModel model = small_fdnn(grid, seeds.split(trial + 100).seed());
        TrainConfig cfg;
        cfg.lr = 0.5;  // aggressive on purpose; the safeguard must hold the line
        cfg.max_epochs = 60;
        cfg.early_stopping = false;
        const Split split = make_split(50, 50, 0, 0, 2);
        const FitReport report = fit(model, data, split, cfg);
        for (std::size_t e = 1; e < report.train_loss.size(); ++e) {
            CHECK(report.train_loss[e] <= report.train_loss[e - 1] + 1e-14);
        }
    }
}

TEST_CASE("early stopping restores the exact best-validation parameters") {
    const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
    CurveSet data = linear_data(grid, 90, 11);
    FdnnModel model = small_fdnn(grid, 23);
    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.max_epochs = 120;
    cfg.patience = 10;
    cfg.min_delta = 0.0;
    const Split split = make_split(90, 40, 30, 20, 5);
    const FitReport report = fit(model, data, split, cfg);
    REQUIRE(report.best_epoch >= 0);
    REQUIRE(!report.val_loss.empty());

    // re-evaluating the restored parameters reproduces the recorded best val loss
    const double vl = mean_loss(LossKind::SquaredError, model.predict(data, split.val),
                                gather_y(data, split.val));
    double best = std::numeric_limits<double>::infinity();
    for (double v : report.val_loss) best = std::min(best, v);
    if (report.best_epoch > 0) {
        CHECK(vl == report.val_loss[report.best_epoch - 1]);
        CHECK(vl == best);
    }
}

TEST_CASE("training divergence raises numeric_error naming the epoch") {
    const GridPtr grid = make_uniform_grid(21, 0.0, 1.0);
    CurveSet data = linear_data(grid, 40, 13);
    FdnnModel model = small_fdnn(grid, 29);
    TrainConfig cfg;
    cfg.lr = 1e9;
    cfg.max_epochs = 50;
    cfg.early_stopping = false;
    cfg.halve_on_increase = false;
    const Split split = make_split(40, 40, 0, 0, 3);
    CHECK_THROWS_WITH_AS(fit(model, data, split, cfg), doctest::Contains("epoch"), numeric_error);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.patience = 0;
    cfg.early_stopping = true;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.early_stopping = false;
    CHECK_NOTHROW(cfg.validate());
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("benchmark determinism and model-order exchangeability at toy scale") {
    BenchmarkConfig cfg;
    cfg.scenarios = {Scenario{ScenarioKind::Linear, ResponseKind::Continuous, 1.0}};
    ModelConfig flm;
    flm.kind = ModelKind::Flm;
    ModelConfig fbnn;
    fbnn.kind = ModelKind::Fbnn;
    fbnn.neurons = 2;
    fbnn.s_points = 15;
    fbnn.n_basis = 5;
    fbnn.train.max_epochs = 30;
    fbnn.train.patience = 5;
    cfg.models = {flm, fbnn};
    cfg.reps = 2;
    cfg.base_seed = 77;
    cfg.n = 120;
    cfg.m = 30;
    cfg.threads = 2;

    const BenchmarkReport a = run_benchmark(cfg);
    CHECK(a.all_ok());
    CHECK(a.cells.size() == 4);
    CHECK(a.aggregates.size() == 2);

    const BenchmarkReport b = run_benchmark(cfg);
    REQUIRE(b.cells.size() == a.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].metrics.rmse == b.cells[i].metrics.rmse);
    }

    // swapping model order must not change any cell's numbers
    std::swap(cfg.models[0], cfg.models[1]);
    const BenchmarkReport c = run_benchmark(cfg);
    for (const BenchmarkCell& cell : a.cells) {
        bool found = false;
        for (const BenchmarkCell& other : c.cells) {
            if (other.model == cell.model && other.rep == cell.rep) {
                CHECK(other.metrics.rmse == cell.metrics.rmse);
                found = true;
            }
        }
        CHECK(found);
    }

    CHECK_THROWS_AS(
        [&] {
            BenchmarkConfig bad = cfg;
            bad.reps = 0;
            run_benchmark(bad);
        }(),
        config_error);
}

TEST_CASE("benchmark records per-cell failures and continues") {
    BenchmarkConfig cfg;
    cfg.scenarios = {Scenario{ScenarioKind::Linear, ResponseKind::Continuous, 1.0}};
    ModelConfig bad;
    bad.kind = ModelKind::Flm;
    bad.n_basis = 60;  // more basis functions than training rows, ridge 0
    bad.ridge = 0.0;
    ModelConfig good;
    good.kind = ModelKind::Flm;
    cfg.models = {bad, good};
    cfg.reps = 1;
    cfg.n = 60;
    cfg.m = 40;
    cfg.threads = 1;

    const BenchmarkReport report = run_benchmark(cfg);
    CHECK(!report.all_ok());
    int failed = 0, ok = 0;
    for (const BenchmarkCell& cell : report.cells) {
        if (cell.ok) {
            ++ok;
        } else {
            ++failed;
            CHECK(!cell.error.empty());
        }
    }
    CHECK(failed == 1);
    CHECK(ok == 1);
}

TEST_CASE("standardizer centers and scales using train statistics") {
    const GridPtr grid = make_uniform_grid(25, 0.0, 1.0);
    CurveSet data = linear_data(grid, 80, 21);
    std::vector<int> train(60);
    for (int i = 0; i < 60; ++i) train[i] = i;
    const Standardizer s = Standardizer::fit(data, train);
    const CurveSet scaled = s.apply(data);
    Vec mean = Vec::Zero(25);
    for (int i : train) mean += scaled.x[0].row(i).transpose();
    mean /= 60.0;
    CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
}
