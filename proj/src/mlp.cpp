#include "funcnn/mlp.hpp"

#include <stdexcept>

#include "funcnn/errors.hpp"

namespace funcnn {

MlpModel::MlpModel(GridPtr grid, int inputs, DenseStack dense)
    : grid_(std::move(grid)), inputs_(inputs), dense_(std::move(dense)) {
    if (!grid_) throw std::invalid_argument("MlpModel: missing grid");
    if (inputs_ < 1) throw std::invalid_argument("MlpModel: inputs must be >= 1");
    if (dense_.input_dim() != inputs_ * grid_->size()) {
        throw std::invalid_argument("MlpModel: first layer width must equal m * R");
    }
    if (dense_.output_dim() != 1) throw std::invalid_argument("MlpModel: output width must be 1");
}

MlpModel MlpModel::init(const MlpArch& arch, std::uint64_t seed) {
    if (!arch.input_grid) throw std::invalid_argument("MlpModel::init: missing input grid");
    Rng rng(seed);
    DenseStack dense = DenseStack::init(arch.inputs * arch.input_grid->size(), arch.dense_widths,
                                        arch.hidden_act, arch.output_act, rng);
    return MlpModel(arch.input_grid, arch.inputs, std::move(dense));
}

Mat MlpModel::stack_features(const std::vector<Mat>& x) const {
    if (static_cast<int>(x.size()) != inputs_) {
        throw std::invalid_argument("MlpModel::forward: predictor count mismatch");
    }
    const Eigen::Index n = x[0].rows();
    Mat features(n, inputs_ * grid_->size());
    for (int r = 0; r < inputs_; ++r) {
        if (x[r].rows() != n || x[r].cols() != grid_->size()) {
            throw std::invalid_argument("MlpModel::forward: curves must be N x |grid|");
        }
        features.middleCols(static_cast<Eigen::Index>(r) * grid_->size(), grid_->size()) = x[r];
    }
    return features;
}

Vec MlpModel::forward_batch(const std::vector<Mat>& x, DenseCache& cache) const {
    return dense_.forward_batch(stack_features(x), cache).col(0);
}

Vec MlpModel::predict(const CurveSet& data, const std::vector<int>& idx) const {
    DenseCache cache;
    return forward_batch(gather_x(data, idx), cache);
}

double MlpModel::loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                                    LossKind loss) {
    DenseCache cache;
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
    grads_ = dense_.backward_batch(cache, dl, nullptr);
    has_grads_ = true;
    return total * inv_n;
}

void MlpModel::step(double lr) {
    if (!has_grads_) throw std::logic_error("MlpModel::step: no gradients accumulated");
    for (const Mat& w : grads_.w) {
        if (!w.allFinite()) throw funcnn::numeric_error("MlpModel: non-finite gradient");
    }
    dense_.apply_gradients(grads_, lr);
}

std::vector<double> MlpModel::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    dense_.flatten(p);
    return p;
}

void MlpModel::set_parameters(const std::vector<double>& p) {
    if (static_cast<long>(p.size()) != parameter_count()) {
        throw std::invalid_argument("MlpModel::set_parameters: size mismatch");
    }
    dense_.unflatten(p, 0);
}

std::vector<double> MlpModel::gradient_discrete() const {
    if (!has_grads_) throw std::logic_error("MlpModel::gradient_discrete: no gradients accumulated");
    std::vector<double> g;
    g.reserve(parameter_count());
    DenseStack::flatten_gradients(grads_, g);
    return g;
}

long MlpModel::parameter_count() const { return dense_.parameter_count(); }

}  // namespace funcnn
