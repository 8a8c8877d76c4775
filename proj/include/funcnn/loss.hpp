#pragma once

#include <string>
#include <utility>

#include "funcnn/grid.hpp"

namespace funcnn {

enum class LossKind { SquaredError, BinaryCrossEntropy };

const char* loss_kind_name(LossKind k);

// Per-sample loss and its derivative in yhat.
//   SquaredError:       ((yhat - y)^2, 2 (yhat - y))
//   BinaryCrossEntropy: (-(y ln p + (1-y) ln(1-p)), (p - y) / (p (1-p)))
// with p = yhat clamped to [1e-12, 1 - 1e-12]. Cross entropy requires
// y in {0, 1} and throws std::invalid_argument otherwise.
std::pair<double, double> loss_and_grad(LossKind kind, double yhat, double y);

// Mean loss over aligned prediction/response vectors.
double mean_loss(LossKind kind, const Vec& yhat, const Vec& y);

}  // namespace funcnn
