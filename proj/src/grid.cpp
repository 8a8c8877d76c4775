#include "funcnn/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace funcnn {

namespace {

void check_grid_invariants(const Vec& points, const Vec& weights) {
    if (points.size() < 2) {
        throw std::invalid_argument("Grid needs at least 2 points");
    }
    if (weights.size() != points.size()) {
        throw std::invalid_argument("Grid weights length must match points length");
    }
    if (points(0) < -1e-12 || points(points.size() - 1) > 1.0 + 1e-12) {
        throw std::invalid_argument("Grid points must lie in [0, 1]");
    }
    for (Eigen::Index i = 0; i + 1 < points.size(); ++i) {
        if (!(points(i) < points(i + 1))) {
            throw std::invalid_argument("Grid points must be strictly increasing");
        }
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights(i) > 0.0)) {
            throw std::invalid_argument("Grid weights must all be positive");
        }
        sum += weights(i);
    }
    const double span = points(points.size() - 1) - points(0);
    if (std::abs(sum - span) > 1e-12) {
        throw std::invalid_argument("Grid weights must sum to the interval length");
    }
}

}  // namespace

Grid::Grid(Vec points, Vec weights) : points_(std::move(points)), weights_(std::move(weights)) {
    check_grid_invariants(points_, weights_);
}

Grid Grid::uniform(int m, double a, double b) {
    if (m < 2) {
        throw std::invalid_argument("uniform grid needs m >= 2, got " + std::to_string(m));
    }
    if (!(a < b)) {
        throw std::invalid_argument("uniform grid needs a < b");
    }
    const double h = (b - a) / (m - 1);
    Vec points(m);
    Vec weights(m);
    for (int i = 0; i < m; ++i) {
        points(i) = a + i * h;
        weights(i) = h;
    }
    points(m - 1) = b;  // avoid accumulated rounding at the right endpoint
    weights(0) = 0.5 * h;
    weights(m - 1) = 0.5 * h;
    return Grid(std::move(points), std::move(weights));
}

Grid Grid::trapezoid(Vec points) {
    const Eigen::Index m = points.size();
    if (m < 2) {
        throw std::invalid_argument("trapezoid grid needs at least 2 points");
    }
    Vec weights(m);
    weights(0) = 0.5 * (points(1) - points(0));
    for (Eigen::Index i = 1; i + 1 < m; ++i) {
        weights(i) = 0.5 * (points(i + 1) - points(i - 1));
    }
    weights(m - 1) = 0.5 * (points(m - 1) - points(m - 2));
    return Grid(std::move(points), std::move(weights));
}

bool Grid::matches(const Grid& other, double tol) const {
    if (size() != other.size()) return false;
    for (Eigen::Index i = 0; i < points_.size(); ++i) {
        if (std::abs(points_(i) - other.points_(i)) > tol) return false;
    }
    return true;
}

GridPtr make_uniform_grid(int m, double a, double b) {
    return std::make_shared<const Grid>(Grid::uniform(m, a, b));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!a.matches(b)) {
        throw std::invalid_argument(std::string(what) + ": grid mismatch (" +
                                    std::to_string(a.size()) + " points on [" +
                                    std::to_string(a.a()) + "," + std::to_string(a.b()) +
                                    "] vs " + std::to_string(b.size()) + " points on [" +
                                    std::to_string(b.a()) + "," + std::to_string(b.b()) + "])");
    }
}

GridFunction::GridFunction(GridPtr g, Vec v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) {
        throw std::invalid_argument("GridFunction needs a grid");
    }
    if (values.size() != grid->size()) {
        throw std::invalid_argument("GridFunction values length must match grid length");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("GridFunction values must be finite");
    }
}

BivariateGridFunction::BivariateGridFunction(GridPtr out, GridPtr in, Mat v)
    : out_grid(std::move(out)), in_grid(std::move(in)), values(std::move(v)) {
    if (!out_grid || !in_grid) {
        throw std::invalid_argument("BivariateGridFunction needs both grids");
    }
    if (values.rows() != out_grid->size() || values.cols() != in_grid->size()) {
        throw std::invalid_argument("BivariateGridFunction matrix must be |out_grid| x |in_grid|");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("BivariateGridFunction values must be finite");
    }
}

double integrate(const GridFunction& f) {
    return f.grid->weights().dot(f.values);
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(*f.grid, *g.grid, "inner_product");
    return (f.values.array() * g.values.array() * f.grid->weights().array()).sum();
}

GridFunction contract(const BivariateGridFunction& w, const GridFunction& h) {
    require_same_grid(*w.in_grid, *h.grid, "contract");
    Vec weighted = w.in_grid->weights().array() * h.values.array();
    return GridFunction(w.out_grid, w.values * weighted);
}

}  // namespace funcnn
