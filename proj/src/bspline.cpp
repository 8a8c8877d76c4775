#include "funcnn/bspline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace funcnn {

BsplineBasis::BsplineBasis(int order, int interior_knot_count)
    : order_(order), interior_(interior_knot_count), n_basis_(interior_knot_count + order) {
    if (order < 1) {
        throw std::invalid_argument("BsplineBasis order must be >= 1");
    }
    if (interior_knot_count < 0) {
        throw std::invalid_argument("BsplineBasis interior knot count must be >= 0");
    }
    knots_.reserve(2 * order_ + interior_);
    for (int i = 0; i < order_; ++i) knots_.push_back(0.0);
    for (int i = 1; i <= interior_; ++i) {
        knots_.push_back(static_cast<double>(i) / (interior_ + 1));
    }
    for (int i = 0; i < order_; ++i) knots_.push_back(1.0);
}

Vec BsplineBasis::evaluate(double t) const {
    if (t < -1e-12 || t > 1.0 + 1e-12) {
        throw std::invalid_argument("BsplineBasis::evaluate: point " + std::to_string(t) +
                                    " outside the knot span [0, 1]");
    }
    t = std::min(std::max(t, 0.0), 1.0);

    const int n_knots = static_cast<int>(knots_.size());
    // Order-1 (piecewise constant) splines: indicator of [k_i, k_{i+1}),
    // with the final non-empty span closed on the right.
    std::vector<double> n(n_knots - 1, 0.0);
    for (int i = 0; i + 1 < n_knots; ++i) {
        const bool last_span = knots_[i] < knots_[i + 1] && knots_[i + 1] >= 1.0;
        if ((t >= knots_[i] && t < knots_[i + 1]) || (last_span && t >= knots_[i] && t <= knots_[i + 1])) {
            n[i] = 1.0;
            break;
        }
    }
    // Cox-de Boor recursion; 0/0 terms are taken as 0.
    for (int ord = 2; ord <= order_; ++ord) {
        for (int i = 0; i + ord < n_knots; ++i) {
            double left = 0.0, right = 0.0;
            const double dl = knots_[i + ord - 1] - knots_[i];
            const double dr = knots_[i + ord] - knots_[i + 1];
            if (dl > 0.0) left = (t - knots_[i]) / dl * n[i];
            if (dr > 0.0) right = (knots_[i + ord] - t) / dr * n[i + 1];
            n[i] = left + right;
        }
    }
    Vec out(n_basis_);
    for (int i = 0; i < n_basis_; ++i) out(i) = n[i];
    return out;
}

Mat BsplineBasis::design(const Grid& grid) const {
    Mat d(grid.size(), n_basis_);
    for (int i = 0; i < grid.size(); ++i) {
        d.row(i) = evaluate(grid.points()(i)).transpose();
    }
    return d;
}

Mat BsplineBasis::smooth(const Vec& points, const Mat& values) const {
    if (values.cols() != points.size()) {
        throw std::invalid_argument("BsplineBasis::smooth: values columns must match points");
    }
    if (points.size() < n_basis_) {
        throw std::invalid_argument("BsplineBasis::smooth: need at least n_basis sample points");
    }
    Mat d(points.size(), n_basis_);
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        d.row(i) = evaluate(points(i)).transpose();
    }
    Eigen::ColPivHouseholderQR<Mat> qr(d);
    return qr.solve(values.transpose()).transpose();  // one coefficient row per curve
}

}  // namespace funcnn
