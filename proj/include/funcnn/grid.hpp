#pragma once

#include <Eigen/Dense>
#include <memory>

namespace funcnn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Ordered evaluation points on a sub-interval of [0, 1] with positive
// quadrature weights summing to the interval length. Every integral in the
// library is a weighted sum against a Grid's weights (trapezoidal rule).
//
// Grids are value-identified: two grids are the same iff their points match
// within 1e-12. Operations check that rather than pointer identity.
class Grid {
public:
    Grid(Vec points, Vec weights);

    // m equally spaced points from a to b with trapezoidal weights
    // h*(1/2, 1, ..., 1, 1/2), h = (b-a)/(m-1).
    static Grid uniform(int m, double a, double b);

    // Trapezoidal weights for arbitrary strictly increasing points.
    static Grid trapezoid(Vec points);

    int size() const { return static_cast<int>(points_.size()); }
    const Vec& points() const { return points_; }
    const Vec& weights() const { return weights_; }
    double a() const { return points_(0); }
    double b() const { return points_(points_.size() - 1); }
    double length() const { return b() - a(); }

    bool matches(const Grid& other, double tol = 1e-12) const;

private:
    Vec points_;
    Vec weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_uniform_grid(int m, double a, double b);

// Throws std::invalid_argument naming `what` if the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

// A function known by its values on a grid.
struct GridFunction {
    GridPtr grid;
    Vec values;

    GridFunction(GridPtr g, Vec v);
};

// A bivariate function w(s, t) on out_grid x in_grid; values(i, j) = w(s_i, t_j).
struct BivariateGridFunction {
    GridPtr out_grid;  // s-axis (rows)
    GridPtr in_grid;   // t-axis (cols)
    Mat values;

    BivariateGridFunction(GridPtr out, GridPtr in, Mat v);
};

// Trapezoidal quadrature of f over its grid.
double integrate(const GridFunction& f);

// integrate(f * g); f and g must share a grid.
double inner_product(const GridFunction& f, const GridFunction& g);

// (contract(w, h))(s_i) = sum_j in_weights_j * w(s_i, t_j) * h(t_j),
// the discretization of s -> integral of w(s, t) h(t) dt.
GridFunction contract(const BivariateGridFunction& w, const GridFunction& h);

}  // namespace funcnn
