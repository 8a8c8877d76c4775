#include "funcnn/matern.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "funcnn/errors.hpp"

namespace funcnn {

double matern_cov(double d, const MaternParams& p) {
    if (d < 0.0) {
        throw std::invalid_argument("matern_cov: distance must be nonnegative");
    }
    if (!(p.rho > 0.0) || !(p.sigma2 > 0.0)) {
        throw std::invalid_argument("matern_cov: rho and sigma2 must be positive");
    }
    const double a = std::sqrt(5.0) * d / p.rho;
    return p.sigma2 * (1.0 + a + 5.0 * d * d / (3.0 * p.rho * p.rho)) * std::exp(-a);
}

Mat sample_gp_matrix(int n, const Grid& grid, const MaternParams& p, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sample_gp: n must be >= 1");
    }
    const int m = grid.size();
    Mat cov(m, m);
    for (int i = 0; i < m; ++i) {
        cov(i, i) = p.sigma2;
        for (int j = 0; j < i; ++j) {
            const double c = matern_cov(std::abs(grid.points()(i) - grid.points()(j)), p);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }

    Eigen::LLT<Mat> llt;
    double jitter = 1e-10 * p.sigma2;
    const double jitter_max = 1e-6 * p.sigma2;
    for (;;) {
        Mat shifted = cov;
        shifted.diagonal().array() += jitter;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) break;
        jitter *= 10.0;
        if (jitter > jitter_max * (1.0 + 1e-12)) {
            throw numeric_error("sample_gp: Cholesky factorization failed after jitter escalation to " +
                                std::to_string(jitter_max));
        }
    }
    const Mat lower = llt.matrixL();

    Rng rng(seed);
    Mat curves(n, m);
    Vec z(m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) z(j) = rng.normal();
        curves.row(i) = (lower * z).transpose();
    }
    return curves;
}

std::vector<GridFunction> sample_gp(int n, const GridPtr& grid, const MaternParams& p,
                                    std::uint64_t seed) {
    const Mat curves = sample_gp_matrix(n, *grid, p, seed);
    std::vector<GridFunction> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        out.emplace_back(grid, curves.row(i).transpose());
    }
    return out;
}

}  // namespace funcnn
