#pragma once

#include <vector>

#include "funcnn/bspline.hpp"
#include "funcnn/scenario.hpp"

namespace funcnn {

enum class LinkKind { Identity, Logistic };

// Functional linear model E[Y|X] = link^{-1}(alpha + sum_r <beta_r, X_r>)
// with beta_r expanded in a B-spline basis and estimated by ridge-penalized
// least squares (identity link) or Newton iterations (logistic link).
class FlmModel {
public:
    FlmModel(GridPtr grid, BsplineBasis basis, double alpha, Mat beta_coef, double ridge,
             LinkKind link);

    // Fits on the rows named by train_idx. The intercept is not penalized.
    // Identity link: closed-form ridge solution on the basis-integral design.
    // Logistic link: Newton iterations until the gradient norm drops below
    // 1e-8 or 100 iterations. ridge = 0 with a rank-deficient design throws
    // numeric_error advising ridge > 0.
    static FlmModel fit(const CurveSet& data, const std::vector<int>& train_idx,
                        const BsplineBasis& basis, double ridge, LinkKind link);

    Vec predict(const CurveSet& data, const std::vector<int>& idx) const;

    double alpha() const { return alpha_; }
    const Mat& beta_coef() const { return beta_coef_; }
    const BsplineBasis& basis() const { return basis_; }
    const GridPtr& grid() const { return grid_; }
    LinkKind link() const { return link_; }
    double ridge() const { return ridge_; }

    // beta_r(t) on the model grid.
    GridFunction beta_function(int r) const;

    long parameter_count() const { return 1 + beta_coef_.size(); }

    // Design matrix of basis-curve integrals Z_{i,(r,b)} = integral of
    // v_b(t) X_{i,r}(t) dt for the given rows.
    static Mat design_matrix(const CurveSet& data, const std::vector<int>& idx,
                             const BsplineBasis& basis);

private:
    GridPtr grid_;
    BsplineBasis basis_;
    double alpha_ = 0.0;
    Mat beta_coef_;  // R x n_basis
    double ridge_ = 0.0;
    LinkKind link_ = LinkKind::Identity;
};

}  // namespace funcnn
