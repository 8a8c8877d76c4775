#pragma once

#include <vector>

#include "funcnn/grid.hpp"

namespace funcnn {

// B-spline basis on [0, 1] with uniformly spaced interior knots and clamped
// (order-fold) boundary knots, evaluated by the Cox-de Boor recursion.
// n_basis = interior_knot_count + order. The basis is a partition of unity:
// at any t in [0, 1] the values are nonnegative and sum to 1.
class BsplineBasis {
public:
    BsplineBasis(int order, int interior_knot_count);

    int order() const { return order_; }
    int interior_knot_count() const { return interior_; }
    int n_basis() const { return n_basis_; }
    const std::vector<double>& knots() const { return knots_; }

    // All n_basis values at t. Throws std::invalid_argument outside [0, 1].
    Vec evaluate(double t) const;

    // |grid| x n_basis design matrix; row i holds the basis values at point i.
    Mat design(const Grid& grid) const;

    // Least-squares coefficients c minimizing ||design * c - values|| for a
    // curve sampled at `points` (each row of `values` is one curve).
    Mat smooth(const Vec& points, const Mat& values) const;

private:
    int order_;
    int interior_;
    int n_basis_;
    std::vector<double> knots_;
};

}  // namespace funcnn
