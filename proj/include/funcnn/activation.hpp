#pragma once

#include <cmath>
#include <string>

#include "funcnn/grid.hpp"

namespace funcnn {

enum class Activation { Linear, ReLU, Tanh, Sigmoid };

const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);  // throws config_error

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::Linear: return z;
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

// Derivative evaluated at the pre-activation. ReLU's subgradient at 0 is 0.
inline double activate_deriv(Activation a, double z) {
    switch (a) {
        case Activation::Linear: return 1.0;
        case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

inline Mat activate_mat(Activation a, const Mat& z) {
    switch (a) {
        case Activation::Linear: return z;
        case Activation::ReLU: return z.array().max(0.0).matrix();
        case Activation::Tanh: return z.array().tanh().matrix();
        case Activation::Sigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    }
    return z;
}

inline Mat activate_deriv_mat(Activation a, const Mat& z) {
    switch (a) {
        case Activation::Linear: return Mat::Ones(z.rows(), z.cols());
        case Activation::ReLU: return (z.array() > 0.0).cast<double>().matrix();
        case Activation::Tanh: {
            Mat t = z.array().tanh().matrix();
            return (1.0 - t.array().square()).matrix();
        }
        case Activation::Sigmoid: {
            Mat s = (1.0 / (1.0 + (-z.array()).exp())).matrix();
            return (s.array() * (1.0 - s.array())).matrix();
        }
    }
    return Mat::Ones(z.rows(), z.cols());
}

inline Vec activate_vec(Activation a, const Vec& z) {
    Vec out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = activate(a, z(i));
    return out;
}

inline Vec activate_deriv_vec(Activation a, const Vec& z) {
    Vec out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = activate_deriv(a, z(i));
    return out;
}

}  // namespace funcnn
