#include "funcnn/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace funcnn {

DenseStack::DenseStack(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (layers_[i].b.size() != layers_[i].w.rows()) {
            throw std::invalid_argument("DenseStack: bias length must match weight rows");
        }
        if (i > 0 && layers_[i].w.cols() != layers_[i - 1].w.rows()) {
            throw std::invalid_argument("DenseStack: layer dimension chaining violated");
        }
    }
}

DenseStack DenseStack::init(int input_dim, const std::vector<int>& hidden_widths,
                            Activation hidden_act, Activation output_act, Rng& rng) {
    if (input_dim < 1) throw std::invalid_argument("DenseStack::init: input_dim must be >= 1");
    std::vector<DenseLayer> layers;
    int in = input_dim;
    auto make_layer = [&rng](int rows, int cols, Activation act) {
        DenseLayer layer;
        layer.w.resize(rows, cols);
        const double a = std::sqrt(6.0 / (rows + cols));
        for (Eigen::Index i = 0; i < layer.w.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.w.cols(); ++j) layer.w(i, j) = rng.uniform(-a, a);
        }
        layer.b = Vec::Zero(rows);
        layer.act = act;
        return layer;
    };
    for (int width : hidden_widths) {
        if (width < 1) throw std::invalid_argument("DenseStack::init: widths must be >= 1");
        layers.push_back(make_layer(width, in, hidden_act));
        in = width;
    }
    layers.push_back(make_layer(1, in, output_act));
    return DenseStack(std::move(layers));
}

int DenseStack::input_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.front().w.cols());
}

int DenseStack::output_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.back().w.rows());
}

Mat DenseStack::forward_batch(const Mat& x, DenseCache& cache) const {
    if (x.cols() != input_dim()) {
        throw std::invalid_argument("DenseStack::forward: input width mismatch");
    }
    cache.h.assign(layers_.size() + 1, Mat());
    cache.pre.assign(layers_.size(), Mat());
    cache.h[0] = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Mat pre = cache.h[i] * layers_[i].w.transpose();
        pre.rowwise() += layers_[i].b.transpose();
        cache.h[i + 1] = activate_mat(layers_[i].act, pre);
        cache.pre[i] = std::move(pre);
    }
    return cache.h.back();
}

DenseGradients DenseStack::backward_batch(const DenseCache& cache, const Mat& dout,
                                          Mat* dinput) const {
    DenseGradients grads;
    grads.w.resize(layers_.size());
    grads.b.resize(layers_.size());
    Mat d = dout;
    for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
        const Mat e = d.array() * activate_deriv_mat(layers_[i].act, cache.pre[i]).array();
        grads.w[i].noalias() = e.transpose() * cache.h[i];
        grads.b[i] = e.colwise().sum().transpose();
        if (i > 0 || dinput != nullptr) d = e * layers_[i].w;
        if (i == 0 && dinput != nullptr) *dinput = d;
    }
    return grads;
}

void DenseStack::apply_gradients(const DenseGradients& grads, double lr) {
    if (grads.w.size() != layers_.size()) {
        throw std::invalid_argument("DenseStack::apply_gradients: shape mismatch");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        layers_[i].w -= lr * grads.w[i];
        layers_[i].b -= lr * grads.b[i];
    }
}

long DenseStack::parameter_count() const {
    long count = 0;
    for (const DenseLayer& layer : layers_) count += layer.w.size() + layer.b.size();
    return count;
}

void DenseStack::flatten(std::vector<double>& out) const {
    for (const DenseLayer& layer : layers_) {
        out.insert(out.end(), layer.w.data(), layer.w.data() + layer.w.size());
        out.insert(out.end(), layer.b.data(), layer.b.data() + layer.b.size());
    }
}

std::size_t DenseStack::unflatten(const std::vector<double>& p, std::size_t offset) {
    for (DenseLayer& layer : layers_) {
        std::copy(p.begin() + offset, p.begin() + offset + layer.w.size(), layer.w.data());
        offset += layer.w.size();
        std::copy(p.begin() + offset, p.begin() + offset + layer.b.size(), layer.b.data());
        offset += layer.b.size();
    }
    return offset;
}

void DenseStack::flatten_gradients(const DenseGradients& grads, std::vector<double>& out) {
    for (std::size_t i = 0; i < grads.w.size(); ++i) {
        out.insert(out.end(), grads.w[i].data(), grads.w[i].data() + grads.w[i].size());
        out.insert(out.end(), grads.b[i].data(), grads.b[i].data() + grads.b[i].size());
    }
}

}  // namespace funcnn
