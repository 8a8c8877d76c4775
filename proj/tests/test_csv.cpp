#include <doctest.h>

#include <cmath>

#include "funcnn/csv.hpp"
#include "funcnn/errors.hpp"
#include "support/fd_check.hpp"

using namespace funcnn;

TEST_CASE("dataset csv round trip is value-exact") {
    const GridPtr grid = make_uniform_grid(40, 0.0, 1.0);
    const CurveSet data = fdcheck::random_batch(grid, 12, ResponseKind::Continuous, 3);
    const std::string text = dataset_to_csv(data);
    const CurveSet back = dataset_from_csv(text);
    CHECK(back.n() == data.n());
    CHECK(back.r() == 1);
    CHECK((back.y - data.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.x[0] - data.x[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.grid->points() - data.grid->points()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dataset_to_csv(back) == text);  // byte-stable after one round trip
}

TEST_CASE("multi-predictor dataset round trip") {
    const GridPtr grid = make_uniform_grid(25, 0.0, 1.0);
    CurveSet data = fdcheck::random_batch(grid, 8, ResponseKind::Binary, 5);
    const CurveSet second = fdcheck::random_batch(grid, 8, ResponseKind::Binary, 6);
    data.x.push_back(second.x[0]);
    data.validate();

    const std::string text = dataset_to_csv(data);
    CHECK(text.rfind("predictor:1", 0) == 0);
    const CurveSet back = dataset_from_csv(text);
    CHECK(back.r() == 2);
    CHECK(back.response == ResponseKind::Binary);
    CHECK((back.x[1] - data.x[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv parser reports row and column diagnostics") {
    // wrong field count on data row 3
    const std::string bad_count = "grid,0,0.5,1\n1.0,1,2,3\n2.0,1,2\n";
    CHECK_THROWS_AS(dataset_from_csv(bad_count), parse_error);
    try {
        dataset_from_csv(bad_count);
    } catch (const parse_error& e) {
        CHECK(e.row() == 3);
    }

    // non-numeric field
    const std::string bad_number = "grid,0,0.5,1\n1.0,1,x,3\n";
    try {
        dataset_from_csv(bad_number);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.row() == 2);
        CHECK(e.column() == 3);
    }

    // non-increasing grid
    const std::string bad_grid = "grid,0,0.5,0.4\n1.0,1,2,3\n";
    CHECK_THROWS_AS(dataset_from_csv(bad_grid), parse_error);

    // missing header
    CHECK_THROWS_AS(dataset_from_csv("1.0,2.0,3.0\n"), parse_error);
    CHECK_THROWS_AS(dataset_from_csv(""), parse_error);

    // mismatched responses across predictor blocks
    const std::string mismatch =
        "predictor:1\ngrid,0,1\n1.0,1,2\npredictor:2\ngrid,0,1\n9.0,1,2\n";
    CHECK_THROWS_AS(dataset_from_csv(mismatch), parse_error);
}

TEST_CASE("off-unit grids are normalized to [0,1]") {
    // ages 1..18 style header
    const std::string text = "grid,1,5,9,13,18\n0.25,1,2,3,4,5\n1.75,2,3,4,5,6\n";
    const CurveSet data = dataset_from_csv(text);
    CHECK(data.grid->points()(0) == 0.0);
    CHECK(data.grid->points()(4) == 1.0);
    CHECK(data.grid->points()(1) == doctest::Approx((5.0 - 1.0) / 17.0).epsilon(1e-15));
    CHECK(data.response == ResponseKind::Continuous);
}

TEST_CASE("17-digit serialization round-trips doubles exactly") {
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        double v;
        switch (i % 4) {
            case 0: v = rng.uniform(-1.0, 1.0); break;
            case 1: v = rng.normal() * 1e-12; break;
            case 2: v = rng.normal() * 1e12; break;
            default: v = rng.normal(); break;
        }
        const std::string s = format_17g(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("predictions csv layouts") {
    Vec yhat(3);
    yhat << 0.2, 0.5, 0.9;
    const std::string binary = predictions_to_csv(yhat, ResponseKind::Binary);
    CHECK(binary.rfind("probability,label\n", 0) == 0);
    CHECK(binary.find(",1\n") != std::string::npos);
    CHECK(binary.find(",0\n") != std::string::npos);

    const std::string cont = predictions_to_csv(yhat, ResponseKind::Continuous);
    CHECK(cont.rfind("prediction\n", 0) == 0);
}
