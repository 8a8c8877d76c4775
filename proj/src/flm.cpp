#include "funcnn/flm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "funcnn/errors.hpp"
#include "funcnn/trainable.hpp"

namespace funcnn {

FlmModel::FlmModel(GridPtr grid, BsplineBasis basis, double alpha, Mat beta_coef, double ridge,
                   LinkKind link)
    : grid_(std::move(grid)),
      basis_(std::move(basis)),
      alpha_(alpha),
      beta_coef_(std::move(beta_coef)),
      ridge_(ridge),
      link_(link) {
    if (!grid_) throw std::invalid_argument("FlmModel: missing grid");
    if (beta_coef_.cols() != basis_.n_basis()) {
        throw std::invalid_argument("FlmModel: coefficient columns must match basis size");
    }
}

Mat FlmModel::design_matrix(const CurveSet& data, const std::vector<int>& idx,
                            const BsplineBasis& basis) {
    const Mat v_w = data.grid->weights().asDiagonal() * basis.design(*data.grid);  // m x nb
    const int nb = basis.n_basis();
    Mat z(idx.size(), data.r() * nb);
    const std::vector<Mat> x = gather_x(data, idx);
    for (int r = 0; r < data.r(); ++r) {
        z.middleCols(static_cast<Eigen::Index>(r) * nb, nb).noalias() = x[r] * v_w;
    }
    return z;
}

FlmModel FlmModel::fit(const CurveSet& data, const std::vector<int>& train_idx,
                       const BsplineBasis& basis, double ridge, LinkKind link) {
    if (ridge < 0.0) throw std::invalid_argument("flm fit: ridge must be >= 0");
    data.validate();
    const Mat z = design_matrix(data, train_idx, basis);
    const Vec y = gather_y(data, train_idx);
    const Eigen::Index n = z.rows();
    const Eigen::Index p = z.cols() + 1;

    Mat d(n, p);  // [1 | Z]
    d.col(0).setOnes();
    d.rightCols(z.cols()) = z;

    Vec theta;
    if (link == LinkKind::Identity) {
        if (ridge == 0.0) {
            Eigen::ColPivHouseholderQR<Mat> qr(d);
            if (qr.rank() < p) {
                throw numeric_error(
                    "flm fit: singular normal equations with ridge = 0; use ridge > 0");
            }
            theta = qr.solve(y);
        } else {
            Mat a = d.transpose() * d;
            for (Eigen::Index i = 1; i < p; ++i) a(i, i) += ridge;
            Eigen::LDLT<Mat> ldlt(a);
            theta = ldlt.solve(d.transpose() * y);
            if (!theta.allFinite()) {
                throw numeric_error("flm fit: normal equations solve failed; increase ridge");
            }
        }
    } else {
        // Newton iterations for ridge-penalized logistic likelihood.
        theta = Vec::Zero(p);
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            const Vec eta = d * theta;
            const Vec prob = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
            Vec grad = d.transpose() * (prob - y);
            for (Eigen::Index i = 1; i < p; ++i) grad(i) += ridge * theta(i);
            if (grad.norm() < 1e-8) {
                converged = true;
                break;
            }
            const Vec w = (prob.array() * (1.0 - prob.array())).matrix();
            Mat hess = d.transpose() * w.asDiagonal() * d;
            for (Eigen::Index i = 1; i < p; ++i) hess(i, i) += ridge;
            hess.diagonal().array() += 1e-12;  // guards the separable-data limit
            const Vec delta = Eigen::LDLT<Mat>(hess).solve(grad);
            if (!delta.allFinite()) {
                throw numeric_error("flm fit: Newton step failed; increase ridge");
            }
            theta -= delta;
        }
        (void)converged;  // 100-iteration cap is an accepted stop per contract
    }

    const int nb = basis.n_basis();
    Mat beta(data.r(), nb);
    for (int r = 0; r < data.r(); ++r) {
        beta.row(r) = theta.segment(1 + static_cast<Eigen::Index>(r) * nb, nb).transpose();
    }
    return FlmModel(data.grid, basis, theta(0), std::move(beta), ridge, link);
}

Vec FlmModel::predict(const CurveSet& data, const std::vector<int>& idx) const {
    require_same_grid(*grid_, *data.grid, "FlmModel::predict");
    const Mat z = design_matrix(data, idx, basis_);
    Vec coef(z.cols());
    const int nb = basis_.n_basis();
    for (Eigen::Index r = 0; r < beta_coef_.rows(); ++r) {
        coef.segment(r * nb, nb) = beta_coef_.row(r).transpose();
    }
    Vec eta = (z * coef).array() + alpha_;
    if (link_ == LinkKind::Logistic) {
        return (1.0 / (1.0 + (-eta.array()).exp())).matrix();
    }
    return eta;
}

GridFunction FlmModel::beta_function(int r) const {
    if (r < 0 || r >= beta_coef_.rows()) {
        throw std::invalid_argument("FlmModel::beta_function: index out of range");
    }
    return GridFunction(grid_, basis_.design(*grid_) * beta_coef_.row(r).transpose());
}

}  // namespace funcnn
