#include "funcnn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace funcnn {

const char* loss_kind_name(LossKind k) {
    return k == LossKind::SquaredError ? "squared_error" : "binary_cross_entropy";
}

std::pair<double, double> loss_and_grad(LossKind kind, double yhat, double y) {
    if (kind == LossKind::SquaredError) {
        const double d = yhat - y;
        return {d * d, 2.0 * d};
    }
    if (y != 0.0 && y != 1.0) {
        throw std::invalid_argument("binary cross entropy requires y in {0, 1}");
    }
    constexpr double eps = 1e-12;
    const double p = std::min(std::max(yhat, eps), 1.0 - eps);
    const double loss = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    const double grad = (p - y) / (p * (1.0 - p));
    return {loss, grad};
}

double mean_loss(LossKind kind, const Vec& yhat, const Vec& y) {
    if (yhat.size() != y.size() || y.size() == 0) {
        throw std::invalid_argument("mean_loss: prediction/response size mismatch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        total += loss_and_grad(kind, yhat(i), y(i)).first;
    }
    return total / static_cast<double>(y.size());
}

}  // namespace funcnn
