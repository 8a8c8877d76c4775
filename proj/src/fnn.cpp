#include "funcnn/fnn.hpp"

#include <cmath>
#include <stdexcept>

#include "funcnn/errors.hpp"

namespace funcnn {

FnnModel::FnnModel(GridPtr grid, int inputs, int neurons, std::vector<Vec> func_weight,
                   Vec func_bias, Activation func_act, DenseStack dense)
    : grid_(std::move(grid)),
      inputs_(inputs),
      q_(neurons),
      func_weight_(std::move(func_weight)),
      func_bias_(std::move(func_bias)),
      func_act_(func_act),
      dense_(std::move(dense)) {
    if (!grid_) throw std::invalid_argument("FnnModel: missing grid");
    if (inputs_ < 1 || q_ < 1) throw std::invalid_argument("FnnModel: inputs and neurons must be >= 1");
    if (static_cast<int>(func_weight_.size()) != q_ * inputs_) {
        throw std::invalid_argument("FnnModel: needs neurons * inputs weight functions");
    }
    for (const Vec& w : func_weight_) {
        if (w.size() != grid_->size()) {
            throw std::invalid_argument("FnnModel: weight function length must match grid");
        }
    }
    if (func_bias_.size() != q_) throw std::invalid_argument("FnnModel: bias length must be neurons");
    if (dense_.input_dim() != q_) {
        throw std::invalid_argument("FnnModel: functional layer width must match first dense layer");
    }
    if (dense_.output_dim() != 1) throw std::invalid_argument("FnnModel: output width must be 1");
}

FnnModel FnnModel::init(const FnnArch& arch, std::uint64_t seed) {
    if (!arch.input_grid) throw std::invalid_argument("FnnModel::init: missing input grid");
    Rng rng(seed);
    const double measure = arch.input_grid->length();
    const double a = std::sqrt(6.0 / (arch.inputs * measure + 1.0)) / measure;
    std::vector<Vec> weights;
    for (int q = 0; q < arch.functional_neurons; ++q) {
        for (int r = 0; r < arch.inputs; ++r) {
            Vec w(arch.input_grid->size());
            for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-a, a);
            weights.push_back(std::move(w));
        }
    }
    DenseStack dense = DenseStack::init(arch.functional_neurons, arch.dense_widths,
                                        arch.hidden_act, arch.output_act, rng);
    return FnnModel(arch.input_grid, arch.inputs, arch.functional_neurons, std::move(weights),
                    Vec::Zero(arch.functional_neurons), arch.hidden_act, std::move(dense));
}

Vec FnnModel::forward_batch(const std::vector<Mat>& x, FnnCache& cache) const {
    if (static_cast<int>(x.size()) != inputs_) {
        throw std::invalid_argument("FnnModel::forward: predictor count mismatch");
    }
    const Eigen::Index n = x[0].rows();
    for (const Mat& xr : x) {
        if (xr.rows() != n || xr.cols() != grid_->size()) {
            throw std::invalid_argument("FnnModel::forward: curves must be N x |grid|");
        }
    }
    cache.x = x;
    const Vec& wq = grid_->weights();
    cache.func_pre.resize(n, q_);
    for (int q = 0; q < q_; ++q) {
        Vec pre = Vec::Constant(n, func_bias_(q));
        for (int r = 0; r < inputs_; ++r) {
            pre.noalias() += x[r] * (wq.asDiagonal() * func_weight_[q * inputs_ + r]);
        }
        cache.func_pre.col(q) = pre;
    }
    cache.func_h = activate_mat(func_act_, cache.func_pre);
    return dense_.forward_batch(cache.func_h, cache.dense).col(0);
}

FnnGradients FnnModel::backward_batch(const FnnCache& cache, const Vec& dl_dyhat) const {
    FnnGradients grads;
    Mat dfunc_h;
    grads.dense = dense_.backward_batch(cache.dense, dl_dyhat, &dfunc_h);
    const Mat e = dfunc_h.array() * activate_deriv_mat(func_act_, cache.func_pre).array();
    grads.func_bias = e.colwise().sum().transpose();
    grads.func_weight.resize(static_cast<std::size_t>(q_) * inputs_);
    for (int q = 0; q < q_; ++q) {
        for (int r = 0; r < inputs_; ++r) {
            // Functional gradient d yhat / d W_{q,r}(t) = e_q * X_r(t), summed over the batch.
            grads.func_weight[q * inputs_ + r] = cache.x[r].transpose() * e.col(q);
        }
    }
    return grads;
}

void FnnModel::apply_gradients(const FnnGradients& grads, double lr) {
    for (std::size_t i = 0; i < func_weight_.size(); ++i) {
        if (!grads.func_weight[i].allFinite()) {
            throw numeric_error("FnnModel: non-finite gradient in functional layer");
        }
        func_weight_[i] -= lr * grads.func_weight[i];
    }
    if (!grads.func_bias.allFinite()) {
        throw numeric_error("FnnModel: non-finite gradient in functional biases");
    }
    func_bias_ -= lr * grads.func_bias;
    dense_.apply_gradients(grads.dense, lr);
}

Vec FnnModel::predict(const CurveSet& data, const std::vector<int>& idx) const {
    FnnCache cache;
    return forward_batch(gather_x(data, idx), cache);
}

double FnnModel::loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                                    LossKind loss) {
    FnnCache cache;
    const Vec yhat = forward_batch(gather_x(data, idx), cache);
    const Vec y = gather_y(data, idx);
    const double inv_n = 1.0 / static_cast<double>(idx.size());
    Vec dl(yhat.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < yhat.size(); ++i) {
        const auto [li, gi] = loss_and_grad(loss, yhat(i), y(i));
        total += li;
        dl(i) = gi * inv_n;
    }
    grads_ = backward_batch(cache, dl);
    has_grads_ = true;
    return total * inv_n;
}

void FnnModel::step(double lr) {
    if (!has_grads_) throw std::logic_error("FnnModel::step: no gradients accumulated");
    apply_gradients(grads_, lr);
}

std::vector<double> FnnModel::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const Vec& w : func_weight_) p.insert(p.end(), w.data(), w.data() + w.size());
    p.insert(p.end(), func_bias_.data(), func_bias_.data() + func_bias_.size());
    dense_.flatten(p);
    return p;
}

void FnnModel::set_parameters(const std::vector<double>& p) {
    if (static_cast<long>(p.size()) != parameter_count()) {
        throw std::invalid_argument("FnnModel::set_parameters: size mismatch");
    }
    std::size_t off = 0;
    for (Vec& w : func_weight_) {
        std::copy(p.begin() + off, p.begin() + off + w.size(), w.data());
        off += w.size();
    }
    std::copy(p.begin() + off, p.begin() + off + func_bias_.size(), func_bias_.data());
    off += func_bias_.size();
    dense_.unflatten(p, off);
}

std::vector<double> FnnModel::gradient_discrete() const {
    if (!has_grads_) throw std::logic_error("FnnModel::gradient_discrete: no gradients accumulated");
    std::vector<double> g;
    g.reserve(parameter_count());
    const Vec& wq = grid_->weights();
    for (const Vec& w : grads_.func_weight) {
        const Vec scaled = w.array() * wq.array();
        g.insert(g.end(), scaled.data(), scaled.data() + scaled.size());
    }
    g.insert(g.end(), grads_.func_bias.data(), grads_.func_bias.data() + grads_.func_bias.size());
    DenseStack::flatten_gradients(grads_.dense, g);
    return g;
}

long FnnModel::parameter_count() const {
    return static_cast<long>(q_) * inputs_ * grid_->size() + q_ + dense_.parameter_count();
}

}  // namespace funcnn
