#include "funcnn/fdnn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "funcnn/errors.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

void ContinuousLayer::validate() const {
    if (!in_grid || !out_grid) throw std::invalid_argument("ContinuousLayer: missing grids");
    if (j_in < 1 || k_out < 1) throw std::invalid_argument("ContinuousLayer: j_in and k_out must be >= 1");
    if (static_cast<int>(bias.size()) != k_out) {
        throw std::invalid_argument("ContinuousLayer: needs one bias function per neuron");
    }
    if (static_cast<int>(weight.size()) != k_out * j_in) {
        throw std::invalid_argument("ContinuousLayer: needs k_out * j_in weight surfaces");
    }
    for (const Vec& b : bias) {
        if (b.size() != out_grid->size()) {
            throw std::invalid_argument("ContinuousLayer: bias length must match out_grid");
        }
    }
    for (const Mat& w : weight) {
        if (w.rows() != out_grid->size() || w.cols() != in_grid->size()) {
            throw std::invalid_argument("ContinuousLayer: weight surface must be |out_grid| x |in_grid|");
        }
    }
}

void FunctionalOutputLayer::validate() const {
    if (!in_grid) throw std::invalid_argument("FunctionalOutputLayer: missing grid");
    if (j_in < 1) throw std::invalid_argument("FunctionalOutputLayer: j_in must be >= 1");
    if (static_cast<int>(weight.size()) != j_in) {
        throw std::invalid_argument("FunctionalOutputLayer: needs one weight function per input");
    }
    for (const Vec& w : weight) {
        if (w.size() != in_grid->size()) {
            throw std::invalid_argument("FunctionalOutputLayer: weight length must match in_grid");
        }
    }
}

FdnnModel::FdnnModel(int input_count, std::vector<ContinuousLayer> hidden,
                     FunctionalOutputLayer output)
    : input_count_(input_count), hidden_(std::move(hidden)), output_(std::move(output)) {
    validate();
}

void FdnnModel::validate() const {
    if (input_count_ < 1) throw std::invalid_argument("FdnnModel: input_count must be >= 1");
    int j = input_count_;
    const Grid* grid = nullptr;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        hidden_[l].validate();
        if (hidden_[l].j_in != j) {
            throw std::invalid_argument("FdnnModel: layer " + std::to_string(l) +
                                        " expects " + std::to_string(hidden_[l].j_in) +
                                        " inputs but receives " + std::to_string(j));
        }
        if (grid != nullptr) {
            require_same_grid(*grid, *hidden_[l].in_grid, "FdnnModel layer chaining");
        }
        j = hidden_[l].k_out;
        grid = hidden_[l].out_grid.get();
    }
    output_.validate();
    if (output_.j_in != j) {
        throw std::invalid_argument("FdnnModel: output layer expects " +
                                    std::to_string(output_.j_in) + " inputs but receives " +
                                    std::to_string(j));
    }
    if (grid != nullptr) {
        require_same_grid(*grid, *output_.in_grid, "FdnnModel output chaining");
    }
}

const GridPtr& FdnnModel::input_grid() const {
    return hidden_.empty() ? output_.in_grid : hidden_.front().in_grid;
}

FdnnModel FdnnModel::init(const FdnnArch& arch, std::uint64_t seed) {
    if (!arch.input_grid) throw std::invalid_argument("FdnnModel::init: missing input grid");
    Rng rng(seed);
    std::vector<ContinuousLayer> hidden;
    GridPtr in_grid = arch.input_grid;
    int j_in = arch.inputs;
    for (const FdnnLayerSpec& spec : arch.hidden) {
        ContinuousLayer layer;
        layer.in_grid = in_grid;
        layer.out_grid = make_uniform_grid(spec.s_points, 0.0, 1.0);
        layer.j_in = j_in;
        layer.k_out = spec.neurons;
        layer.act = spec.act;
        const double measure = in_grid->length();
        const double a = std::sqrt(6.0 / (j_in * measure + spec.neurons)) / measure;
        for (int k = 0; k < spec.neurons; ++k) {
            layer.bias.emplace_back(Vec::Zero(layer.out_grid->size()));
        }
        for (int k = 0; k < spec.neurons; ++k) {
            for (int j = 0; j < j_in; ++j) {
                Mat w(layer.out_grid->size(), in_grid->size());
                for (Eigen::Index r = 0; r < w.rows(); ++r) {
                    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-a, a);
                }
                layer.weight.push_back(std::move(w));
            }
        }
        in_grid = layer.out_grid;
        j_in = spec.neurons;
        hidden.push_back(std::move(layer));
    }

    FunctionalOutputLayer out;
    out.in_grid = in_grid;
    out.j_in = j_in;
    out.bias = 0.0;
    out.act = arch.output_act;
    const double measure = in_grid->length();
    const double a = std::sqrt(6.0 / (j_in * measure + 1.0)) / measure;
    for (int j = 0; j < j_in; ++j) {
        Vec w(in_grid->size());
        for (Eigen::Index t = 0; t < w.size(); ++t) w(t) = rng.uniform(-a, a);
        out.weight.push_back(std::move(w));
    }
    return FdnnModel(arch.inputs, std::move(hidden), std::move(out));
}

Vec FdnnModel::forward_batch(const std::vector<Mat>& x, FdnnCache& cache) const {
    if (static_cast<int>(x.size()) != input_count_) {
        throw std::invalid_argument("FdnnModel::forward: expected " + std::to_string(input_count_) +
                                    " predictors, got " + std::to_string(x.size()));
    }
    const Eigen::Index n = x[0].rows();
    for (const Mat& xr : x) {
        if (xr.rows() != n || xr.cols() != input_grid()->size()) {
            throw std::invalid_argument("FdnnModel::forward: curves must be N x |input grid|");
        }
    }

    cache.h.assign(hidden_.size() + 1, {});
    cache.pre.assign(hidden_.size(), {});
    cache.h[0] = x;

    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const ContinuousLayer& layer = hidden_[l];
        const Vec& wq = layer.in_grid->weights();
        cache.pre[l].resize(layer.k_out);
        cache.h[l + 1].resize(layer.k_out);
        for (int k = 0; k < layer.k_out; ++k) {
            Mat pre = Mat::Zero(n, layer.out_grid->size());
            for (int j = 0; j < layer.j_in; ++j) {
                // (N x m_t) * (m_t x m_s) quadrature contraction
                pre.noalias() += cache.h[l][j] * (wq.asDiagonal() * layer.w(k, j).transpose());
            }
            pre.rowwise() += layer.bias[k].transpose();
            cache.h[l + 1][k] = activate_mat(layer.act, pre);
            cache.pre[l][k] = std::move(pre);
        }
    }

    const Vec& wq = output_.in_grid->weights();
    Vec out_pre = Vec::Constant(n, output_.bias);
    for (int j = 0; j < output_.j_in; ++j) {
        out_pre.noalias() += cache.h.back()[j] * (wq.asDiagonal() * output_.weight[j]);
    }
    cache.out_pre = out_pre;
    cache.yhat = activate_vec(output_.act, out_pre);
    return cache.yhat;
}

FdnnGradients FdnnModel::backward_batch(const FdnnCache& cache, const Vec& dl_dyhat) const {
    if (cache.h.size() != hidden_.size() + 1 || cache.out_pre.size() != dl_dyhat.size()) {
        throw std::invalid_argument("FdnnModel::backward: cache does not match this model");
    }

    FdnnGradients grads;
    grads.hidden.resize(hidden_.size());

    // Output layer (functional neurons).
    const Vec dout = dl_dyhat.array() * activate_deriv_vec(output_.act, cache.out_pre).array();
    grads.out_bias = dout.sum();
    grads.out_weight.resize(output_.j_in);
    std::vector<Mat> delta(output_.j_in);  // adjoint d(loss)/dH_j(t), functional convention
    for (int j = 0; j < output_.j_in; ++j) {
        grads.out_weight[j] = cache.h.back()[j].transpose() * dout;
        delta[j] = dout * output_.weight[j].transpose();
    }

    // Hidden layers in reverse; the adjoint recursion integrates over the
    // layer's out-grid with the same trapezoidal weights as the forward pass.
    for (int l = static_cast<int>(hidden_.size()) - 1; l >= 0; --l) {
        const ContinuousLayer& layer = hidden_[l];
        const Vec& wq_s = layer.out_grid->weights();
        grads.hidden[l].bias.resize(layer.k_out);
        grads.hidden[l].weight.resize(static_cast<std::size_t>(layer.k_out) * layer.j_in);

        std::vector<Mat> delta_prev;
        if (l > 0) {
            delta_prev.assign(layer.j_in, Mat::Zero(dl_dyhat.size(), layer.in_grid->size()));
        }
        for (int k = 0; k < layer.k_out; ++k) {
            const Mat e = delta[k].array() * activate_deriv_mat(layer.act, cache.pre[l][k]).array();
            grads.hidden[l].bias[k] = e.colwise().sum().transpose();
            for (int j = 0; j < layer.j_in; ++j) {
                grads.hidden[l].weight[static_cast<std::size_t>(k) * layer.j_in + j].noalias() =
                    e.transpose() * cache.h[l][j];
                if (l > 0) {
                    delta_prev[j].noalias() += (e * wq_s.asDiagonal()) * layer.w(k, j);
                }
            }
        }
        if (l > 0) delta = std::move(delta_prev);
    }
    return grads;
}

double FdnnModel::forward(const std::vector<GridFunction>& x, FdnnCache& cache) const {
    std::vector<Mat> batch;
    batch.reserve(x.size());
    for (const GridFunction& xr : x) {
        require_same_grid(*input_grid(), *xr.grid, "FdnnModel::forward");
        batch.push_back(xr.values.transpose());
    }
    return forward_batch(batch, cache)(0);
}

FdnnGradients FdnnModel::backward(const FdnnCache& cache, double dl_dyhat) const {
    return backward_batch(cache, Vec::Constant(1, dl_dyhat));
}

namespace {

void check_finite(bool ok, const std::string& where) {
    if (!ok) throw numeric_error("FdnnModel: non-finite gradient in " + where);
}

}  // namespace

void FdnnModel::apply_gradients(const FdnnGradients& grads, double lr) {
    if (!(lr >= 0.0)) throw std::invalid_argument("apply_gradients: lr must be >= 0");
    if (grads.hidden.size() != hidden_.size() ||
        static_cast<int>(grads.out_weight.size()) != output_.j_in) {
        throw std::invalid_argument("apply_gradients: gradient shape mismatch");
    }
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        for (int k = 0; k < hidden_[l].k_out; ++k) {
            check_finite(grads.hidden[l].bias[k].allFinite(),
                         "hidden layer " + std::to_string(l) + " bias " + std::to_string(k));
            for (int j = 0; j < hidden_[l].j_in; ++j) {
                check_finite(grads.hidden[l].weight[k * hidden_[l].j_in + j].allFinite(),
                             "hidden layer " + std::to_string(l) + " weight (" +
                                 std::to_string(j) + "," + std::to_string(k) + ")");
            }
        }
    }
    for (int j = 0; j < output_.j_in; ++j) {
        check_finite(grads.out_weight[j].allFinite(), "output weight " + std::to_string(j));
    }
    check_finite(std::isfinite(grads.out_bias), "output bias");

    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        ContinuousLayer& layer = hidden_[l];
        for (int k = 0; k < layer.k_out; ++k) {
            layer.bias[k] -= lr * grads.hidden[l].bias[k];
            for (int j = 0; j < layer.j_in; ++j) {
                layer.w(k, j) -= lr * grads.hidden[l].weight[static_cast<std::size_t>(k) * layer.j_in + j];
            }
        }
    }
    for (int j = 0; j < output_.j_in; ++j) output_.weight[j] -= lr * grads.out_weight[j];
    output_.bias -= lr * grads.out_bias;
}

Vec FdnnModel::predict(const CurveSet& data, const std::vector<int>& idx) const {
    FdnnCache cache;
    return forward_batch(gather_x(data, idx), cache);
}

double FdnnModel::loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                                     LossKind loss) {
    FdnnCache cache;
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

void FdnnModel::step(double lr) {
    if (!has_grads_) throw std::logic_error("FdnnModel::step: no gradients accumulated");
    apply_gradients(grads_, lr);
}

std::vector<double> FdnnModel::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const ContinuousLayer& layer : hidden_) {
        for (const Vec& b : layer.bias) p.insert(p.end(), b.data(), b.data() + b.size());
        for (const Mat& w : layer.weight) p.insert(p.end(), w.data(), w.data() + w.size());
    }
    for (const Vec& w : output_.weight) p.insert(p.end(), w.data(), w.data() + w.size());
    p.push_back(output_.bias);
    return p;
}

void FdnnModel::set_parameters(const std::vector<double>& p) {
    if (static_cast<long>(p.size()) != parameter_count()) {
        throw std::invalid_argument("FdnnModel::set_parameters: size mismatch");
    }
    std::size_t off = 0;
    for (ContinuousLayer& layer : hidden_) {
        for (Vec& b : layer.bias) {
            std::copy(p.begin() + off, p.begin() + off + b.size(), b.data());
            off += b.size();
        }
        for (Mat& w : layer.weight) {
            std::copy(p.begin() + off, p.begin() + off + w.size(), w.data());
            off += w.size();
        }
    }
    for (Vec& w : output_.weight) {
        std::copy(p.begin() + off, p.begin() + off + w.size(), w.data());
        off += w.size();
    }
    output_.bias = p[off];
}

std::vector<double> FdnnModel::gradient_discrete() const {
    if (!has_grads_) throw std::logic_error("FdnnModel::gradient_discrete: no gradients accumulated");
    std::vector<double> g;
    g.reserve(parameter_count());
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const ContinuousLayer& layer = hidden_[l];
        const Vec& ws = layer.out_grid->weights();
        const Vec& wt = layer.in_grid->weights();
        for (const Vec& b : grads_.hidden[l].bias) {
            const Vec scaled = b.array() * ws.array();
            g.insert(g.end(), scaled.data(), scaled.data() + scaled.size());
        }
        for (const Mat& w : grads_.hidden[l].weight) {
            const Mat scaled = ws.asDiagonal() * w * wt.asDiagonal();
            g.insert(g.end(), scaled.data(), scaled.data() + scaled.size());
        }
    }
    const Vec& wt = output_.in_grid->weights();
    for (const Vec& w : grads_.out_weight) {
        const Vec scaled = w.array() * wt.array();
        g.insert(g.end(), scaled.data(), scaled.data() + scaled.size());
    }
    g.push_back(grads_.out_bias);
    return g;
}

long FdnnModel::parameter_count() const {
    long count = 1;  // output bias
    for (const ContinuousLayer& layer : hidden_) {
        count += static_cast<long>(layer.k_out) * layer.out_grid->size();
        count += static_cast<long>(layer.k_out) * layer.j_in * layer.out_grid->size() *
                 layer.in_grid->size();
    }
    count += static_cast<long>(output_.j_in) * output_.in_grid->size();
    return count;
}

}  // namespace funcnn
