#pragma once

#include <cstdint>
#include <vector>

#include "funcnn/grid.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

// Matern covariance parameters. Smoothness is fixed at nu = 5/2, the one
// regime with a closed form and the only one used in the experiments.
struct MaternParams {
    double rho = 0.5;     // range
    double sigma2 = 1.0;  // marginal variance

    static constexpr double nu = 2.5;
};

// C(d) = sigma2 * (1 + sqrt(5) d / rho + 5 d^2 / (3 rho^2)) * exp(-sqrt(5) d / rho).
double matern_cov(double d, const MaternParams& p);

// n zero-mean Gaussian-process curves on `grid`, one per row. Builds the
// covariance matrix from matern_cov of pairwise distances, adds jitter
// 1e-10 * sigma2 to the diagonal (escalating tenfold up to 1e-6 * sigma2 on
// Cholesky failure), and multiplies standard normal draws. Deterministic
// given the seed.
Mat sample_gp_matrix(int n, const Grid& grid, const MaternParams& p, std::uint64_t seed);

std::vector<GridFunction> sample_gp(int n, const GridPtr& grid, const MaternParams& p,
                                    std::uint64_t seed);

}  // namespace funcnn
