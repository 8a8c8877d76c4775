#pragma once

// Finite-difference gradient certification harness shared by the unit and
// acceptance suites. Central differences of the mean loss are compared
// against Trainable::gradient_discrete() entry for entry; the oracle only
// uses predict() + mean_loss(), never the backward pass it certifies.

#include <cmath>
#include <vector>

#include "funcnn/loss.hpp"
#include "funcnn/matern.hpp"
#include "funcnn/rng.hpp"
#include "funcnn/scenario.hpp"
#include "funcnn/trainable.hpp"

namespace fdcheck {

// Central differences at h = 1e-6 carry an irreducible roundoff floor of
// about eps * |L| / (2 h) ~ 1e-10, so a relative comparison is meaningful
// only for gradients the oracle can resolve. Entries with |analytic| >= 1e-4
// must agree to 1e-5 relative error; smaller entries are held to a 1e-9
// absolute bound, which equals the relative criterion at the boundary and is
// far tighter than it below.
struct Report {
    double max_rel_err = 0.0;  // entries with |analytic| >= 1e-4
    double max_abs_err_small = 0.0;  // entries with |analytic| < 1e-4
    long checked = 0;

    bool passes() const { return max_rel_err <= 1e-5 && max_abs_err_small <= 1e-9; }
};

inline Report certify(funcnn::Trainable& model, const funcnn::CurveSet& data,
                      const std::vector<int>& idx, funcnn::LossKind loss, double h = 1e-6) {
    using funcnn::Vec;
    const Vec y = funcnn::gather_y(data, idx);
    model.loss_and_gradients(data, idx, loss);
    const std::vector<double> analytic = model.gradient_discrete();
    std::vector<double> params = model.parameters();

    Report report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        model.set_parameters(params);
        const double lp = funcnn::mean_loss(loss, model.predict(data, idx), y);
        params[i] = saved - h;
        model.set_parameters(params);
        const double lm = funcnn::mean_loss(loss, model.predict(data, idx), y);
        params[i] = saved;
        const double fd = (lp - lm) / (2.0 * h);
        if (std::abs(analytic[i]) >= 1e-4) {
            const double rel =
                std::abs(fd - analytic[i]) / std::max(std::abs(analytic[i]), std::abs(fd));
            report.max_rel_err = std::max(report.max_rel_err, rel);
        } else {
            report.max_abs_err_small =
                std::max(report.max_abs_err_small, std::abs(fd - analytic[i]));
        }
        ++report.checked;
    }
    model.set_parameters(params);
    return report;
}

// Small random regression / classification batch on a shared grid.
inline funcnn::CurveSet random_batch(const funcnn::GridPtr& grid, int n,
                                     funcnn::ResponseKind kind, std::uint64_t seed) {
    funcnn::Rng rng(seed);
    funcnn::Mat curves = funcnn::sample_gp_matrix(n, *grid, funcnn::MaternParams{0.5, 1.0},
                                                  rng.split("curves").seed());
    funcnn::CurveSet data;
    data.grid = grid;
    data.x = {std::move(curves)};
    data.response = kind;
    data.y.resize(n);
    funcnn::Rng yr = rng.split("y");
    for (int i = 0; i < n; ++i) {
        data.y(i) = kind == funcnn::ResponseKind::Binary ? yr.bernoulli(0.5)
                                                         : yr.uniform(-2.0, 2.0);
    }
    return data;
}

}  // namespace fdcheck
