#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcnn/grid.hpp"
#include "funcnn/matern.hpp"

namespace funcnn {

enum class ScenarioKind { Linear, CAM, SingleIndex, MultipleIndex, Quadratic, ComplexQuadratic };
enum class ResponseKind { Continuous, Binary };

const char* scenario_kind_name(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& name);  // throws config_error
const char* response_kind_name(ResponseKind k);
ResponseKind parse_response_kind(const std::string& name);
std::vector<std::string> scenario_kind_names();

// One data-generating setting. For a continuous response the noise-free
// signal eta gets N(0, noise_sd^2) noise added; for a binary response eta is
// the logit and labels are Bernoulli(logistic(eta)). noise_sd is ignored in
// the binary case.
struct Scenario {
    ScenarioKind kind = ScenarioKind::Linear;
    ResponseKind response = ResponseKind::Continuous;
    double noise_sd = 1.0;

    std::string name() const;
};

// N functional predictors sampled on a shared grid plus scalar responses.
// Curves are stored one per row: x[r](i, :) is predictor r of sample i.
struct CurveSet {
    GridPtr grid;
    std::vector<Mat> x;  // per predictor: N x m
    Vec y;
    ResponseKind response = ResponseKind::Continuous;

    int n() const { return x.empty() ? 0 : static_cast<int>(x[0].rows()); }
    int r() const { return static_cast<int>(x.size()); }
    GridFunction curve(int i, int pred) const;
    void validate() const;
};

// Noise-free eta for one sample; x holds the R predictor curves on a common
// grid. Double integrals are evaluated as iterated quadratures on that grid.
double true_response(const Scenario& sc, const std::vector<GridFunction>& x);

// eta for every row of the curve matrices.
Vec true_response_batch(const Scenario& sc, const Grid& grid, const std::vector<Mat>& curves);

// Attach responses to pre-sampled curves: continuous -> eta + noise,
// binary -> Bernoulli(logistic(eta)). Deterministic given seed.
CurveSet gen_dataset(const Scenario& sc, const GridPtr& grid, const std::vector<Mat>& curves,
                     std::uint64_t seed);

}  // namespace funcnn
