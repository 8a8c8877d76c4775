#include "funcnn/fbnn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "funcnn/errors.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

FbnnLayer::FbnnLayer(GridPtr in, GridPtr out, int j, int k, BsplineBasis bias_b,
                     BsplineBasis out_b, BsplineBasis in_b, Activation a)
    : in_grid(std::move(in)),
      out_grid(std::move(out)),
      j_in(j),
      k_out(k),
      bias_basis(std::move(bias_b)),
      out_basis(std::move(out_b)),
      in_basis(std::move(in_b)),
      act(a) {
    bias_coef = Mat::Zero(k_out, bias_basis.n_basis());
    weight_coef.assign(static_cast<std::size_t>(k_out) * j_in,
                       Mat::Zero(out_basis.n_basis(), in_basis.n_basis()));
    refresh_design();
}

void FbnnLayer::refresh_design() {
    vstar = bias_basis.design(*out_grid);
    vout = out_basis.design(*out_grid);
    vin = in_basis.design(*in_grid);
    vin_w = in_grid->weights().asDiagonal() * vin;
}

void FbnnLayer::validate() const {
    if (!in_grid || !out_grid) throw std::invalid_argument("FbnnLayer: missing grids");
    if (j_in < 1 || k_out < 1) throw std::invalid_argument("FbnnLayer: j_in and k_out must be >= 1");
    if (bias_coef.rows() != k_out || bias_coef.cols() != bias_basis.n_basis()) {
        throw std::invalid_argument("FbnnLayer: bias_coef must be k_out x n_bias_basis");
    }
    if (static_cast<int>(weight_coef.size()) != k_out * j_in) {
        throw std::invalid_argument("FbnnLayer: needs k_out * j_in coefficient arrays");
    }
    for (const Mat& w : weight_coef) {
        if (w.rows() != out_basis.n_basis() || w.cols() != in_basis.n_basis()) {
            throw std::invalid_argument("FbnnLayer: weight_coef arrays must be C x D");
        }
    }
}

FbnnOutputLayer::FbnnOutputLayer(GridPtr in, int j, BsplineBasis basis, Activation a)
    : in_grid(std::move(in)), j_in(j), in_basis(std::move(basis)), act(a) {
    weight_coef = Mat::Zero(j_in, in_basis.n_basis());
    refresh_design();
}

void FbnnOutputLayer::refresh_design() {
    vin = in_basis.design(*in_grid);
    vin_w = in_grid->weights().asDiagonal() * vin;
}

void FbnnOutputLayer::validate() const {
    if (!in_grid) throw std::invalid_argument("FbnnOutputLayer: missing grid");
    if (j_in < 1) throw std::invalid_argument("FbnnOutputLayer: j_in must be >= 1");
    if (weight_coef.rows() != j_in || weight_coef.cols() != in_basis.n_basis()) {
        throw std::invalid_argument("FbnnOutputLayer: weight_coef must be j_in x n_basis");
    }
}

FbnnModel::FbnnModel(int input_count, std::vector<FbnnLayer> hidden, FbnnOutputLayer output)
    : input_count_(input_count), hidden_(std::move(hidden)), output_(std::move(output)) {
    validate();
}

void FbnnModel::validate() const {
    if (input_count_ < 1) throw std::invalid_argument("FbnnModel: input_count must be >= 1");
    int j = input_count_;
    const Grid* grid = nullptr;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        hidden_[l].validate();
        if (hidden_[l].j_in != j) {
            throw std::invalid_argument("FbnnModel: layer " + std::to_string(l) + " expects " +
                                        std::to_string(hidden_[l].j_in) + " inputs, receives " +
                                        std::to_string(j));
        }
        if (grid != nullptr) {
            require_same_grid(*grid, *hidden_[l].in_grid, "FbnnModel layer chaining");
        }
        j = hidden_[l].k_out;
        grid = hidden_[l].out_grid.get();
    }
    output_.validate();
    if (output_.j_in != j) {
        throw std::invalid_argument("FbnnModel: output layer expects " +
                                    std::to_string(output_.j_in) + " inputs, receives " +
                                    std::to_string(j));
    }
    if (grid != nullptr) {
        require_same_grid(*grid, *output_.in_grid, "FbnnModel output chaining");
    }
}

const GridPtr& FbnnModel::input_grid() const {
    return hidden_.empty() ? output_.in_grid : hidden_.front().in_grid;
}

FbnnModel FbnnModel::init(const FbnnArch& arch, std::uint64_t seed) {
    if (!arch.input_grid) throw std::invalid_argument("FbnnModel::init: missing input grid");
    Rng rng(seed);
    std::vector<FbnnLayer> hidden;
    GridPtr in_grid = arch.input_grid;
    int j_in = arch.inputs;
    for (const FbnnLayerSpec& spec : arch.hidden) {
        FbnnLayer layer(in_grid, make_uniform_grid(spec.s_points, 0.0, 1.0), j_in, spec.neurons,
                        BsplineBasis(spec.order, spec.n_bias_basis - spec.order),
                        BsplineBasis(spec.order, spec.n_out_basis - spec.order),
                        BsplineBasis(spec.order, spec.n_in_basis - spec.order), spec.act);
        const double a = 1.0 / std::sqrt(static_cast<double>(j_in) * layer.in_basis.n_basis());
        for (int k = 0; k < layer.k_out; ++k) {
            for (int j = 0; j < layer.j_in; ++j) {
                Mat& w = layer.wc(k, j);
                for (Eigen::Index r = 0; r < w.rows(); ++r) {
                    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-a, a);
                }
            }
        }
        in_grid = layer.out_grid;
        j_in = spec.neurons;
        hidden.push_back(std::move(layer));
    }

    FbnnOutputLayer out(in_grid, j_in,
                        BsplineBasis(arch.output_order, arch.output_basis - arch.output_order),
                        arch.output_act);
    const double a = 1.0 / std::sqrt(static_cast<double>(j_in) * out.in_basis.n_basis());
    for (Eigen::Index r = 0; r < out.weight_coef.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.weight_coef.cols(); ++c) {
            out.weight_coef(r, c) = rng.uniform(-a, a);
        }
    }
    return FbnnModel(arch.inputs, std::move(hidden), std::move(out));
}

Vec FbnnModel::forward_batch(const std::vector<Mat>& x, FbnnCache& cache) const {
    if (static_cast<int>(x.size()) != input_count_) {
        throw std::invalid_argument("FbnnModel::forward: expected " + std::to_string(input_count_) +
                                    " predictors, got " + std::to_string(x.size()));
    }
    const Eigen::Index n = x[0].rows();
    for (const Mat& xr : x) {
        if (xr.rows() != n || xr.cols() != input_grid()->size()) {
            throw std::invalid_argument("FbnnModel::forward: curves must be N x |input grid|");
        }
    }

    cache.h.assign(hidden_.size() + 1, {});
    cache.a.assign(hidden_.size(), {});
    cache.pre.assign(hidden_.size(), {});
    cache.h[0] = x;

    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const FbnnLayer& layer = hidden_[l];
        cache.a[l].resize(layer.j_in);
        for (int j = 0; j < layer.j_in; ++j) {
            cache.a[l][j].noalias() = cache.h[l][j] * layer.vin_w;  // N x D
        }
        cache.pre[l].resize(layer.k_out);
        cache.h[l + 1].resize(layer.k_out);
        for (int k = 0; k < layer.k_out; ++k) {
            Mat s = Mat::Zero(n, layer.out_basis.n_basis());  // N x C
            for (int j = 0; j < layer.j_in; ++j) {
                s.noalias() += cache.a[l][j] * layer.wc(k, j).transpose();
            }
            Mat pre = s * layer.vout.transpose();  // N x m_s
            pre.rowwise() += (layer.vstar * layer.bias_coef.row(k).transpose()).transpose();
            cache.h[l + 1][k] = activate_mat(layer.act, pre);
            cache.pre[l][k] = std::move(pre);
        }
    }

    cache.aout.resize(output_.j_in);
    Vec out_pre = Vec::Constant(n, output_.bias);
    for (int j = 0; j < output_.j_in; ++j) {
        cache.aout[j].noalias() = cache.h.back()[j] * output_.vin_w;  // N x C
        out_pre.noalias() += cache.aout[j] * output_.weight_coef.row(j).transpose();
    }
    cache.out_pre = out_pre;
    cache.yhat = activate_vec(output_.act, out_pre);
    return cache.yhat;
}

FbnnGradients FbnnModel::backward_batch(const FbnnCache& cache, const Vec& dl_dyhat) const {
    if (cache.h.size() != hidden_.size() + 1 || cache.out_pre.size() != dl_dyhat.size()) {
        throw std::invalid_argument("FbnnModel::backward: cache does not match this model");
    }
    FbnnGradients grads;
    grads.hidden.resize(hidden_.size());

    const Vec dout = dl_dyhat.array() * activate_deriv_vec(output_.act, cache.out_pre).array();
    grads.out_bias = dout.sum();
    grads.out_weight_coef.resize(output_.j_in, output_.in_basis.n_basis());
    std::vector<Mat> da(output_.j_in);  // adjoints of the A arrays feeding the output
    for (int j = 0; j < output_.j_in; ++j) {
        grads.out_weight_coef.row(j) = (cache.aout[j].transpose() * dout).transpose();
        da[j] = dout * output_.weight_coef.row(j);  // N x C
    }
    // dH for the last hidden layer, discrete convention (quadrature folded in).
    std::vector<Mat> dh(output_.j_in);
    for (int j = 0; j < output_.j_in; ++j) dh[j] = da[j] * output_.vin_w.transpose();  // N x m

    for (int l = static_cast<int>(hidden_.size()) - 1; l >= 0; --l) {
        const FbnnLayer& layer = hidden_[l];
        grads.hidden[l].bias_coef.resize(layer.k_out, layer.bias_basis.n_basis());
        grads.hidden[l].weight_coef.assign(static_cast<std::size_t>(layer.k_out) * layer.j_in, Mat());

        std::vector<Mat> da_prev;
        if (l > 0) {
            da_prev.assign(layer.j_in, Mat::Zero(dl_dyhat.size(), layer.in_basis.n_basis()));
        }
        for (int k = 0; k < layer.k_out; ++k) {
            const Mat e = dh[k].array() * activate_deriv_mat(layer.act, cache.pre[l][k]).array();
            grads.hidden[l].bias_coef.row(k) = e.colwise().sum() * layer.vstar;
            const Mat f = e * layer.vout;  // N x C
            for (int j = 0; j < layer.j_in; ++j) {
                grads.hidden[l].weight_coef[static_cast<std::size_t>(k) * layer.j_in + j].noalias() =
                    f.transpose() * cache.a[l][j];  // C x D
                if (l > 0) da_prev[j].noalias() += f * layer.wc(k, j);  // N x D
            }
        }
        if (l > 0) {
            dh.assign(layer.j_in, Mat());
            for (int j = 0; j < layer.j_in; ++j) dh[j] = da_prev[j] * layer.vin_w.transpose();
        }
    }
    return grads;
}

double FbnnModel::forward(const std::vector<GridFunction>& x, FbnnCache& cache) const {
    std::vector<Mat> batch;
    batch.reserve(x.size());
    for (const GridFunction& xr : x) {
        require_same_grid(*input_grid(), *xr.grid, "FbnnModel::forward");
        batch.push_back(xr.values.transpose());
    }
    return forward_batch(batch, cache)(0);
}

FbnnGradients FbnnModel::backward(const FbnnCache& cache, double dl_dyhat) const {
    return backward_batch(cache, Vec::Constant(1, dl_dyhat));
}

void FbnnModel::apply_gradients(const FbnnGradients& grads, double lr) {
    if (!(lr >= 0.0)) throw std::invalid_argument("apply_gradients: lr must be >= 0");
    if (grads.hidden.size() != hidden_.size()) {
        throw std::invalid_argument("apply_gradients: gradient shape mismatch");
    }
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        if (!grads.hidden[l].bias_coef.allFinite()) {
            throw numeric_error("FbnnModel: non-finite gradient in hidden layer " +
                                std::to_string(l) + " bias coefficients");
        }
        for (const Mat& w : grads.hidden[l].weight_coef) {
            if (!w.allFinite()) {
                throw numeric_error("FbnnModel: non-finite gradient in hidden layer " +
                                    std::to_string(l) + " weight coefficients");
            }
        }
    }
    if (!grads.out_weight_coef.allFinite() || !std::isfinite(grads.out_bias)) {
        throw numeric_error("FbnnModel: non-finite gradient in output layer");
    }

    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        hidden_[l].bias_coef -= lr * grads.hidden[l].bias_coef;
        for (std::size_t i = 0; i < hidden_[l].weight_coef.size(); ++i) {
            hidden_[l].weight_coef[i] -= lr * grads.hidden[l].weight_coef[i];
        }
    }
    output_.weight_coef -= lr * grads.out_weight_coef;
    output_.bias -= lr * grads.out_bias;
}

BivariateGridFunction FbnnModel::reconstruct_weight(int layer, int j, int k) const {
    if (layer < 0 || layer >= static_cast<int>(hidden_.size())) {
        throw std::invalid_argument("reconstruct_weight: layer index out of range");
    }
    const FbnnLayer& hl = hidden_[layer];
    if (j < 0 || j >= hl.j_in || k < 0 || k >= hl.k_out) {
        throw std::invalid_argument("reconstruct_weight: neuron index out of range");
    }
    return BivariateGridFunction(hl.out_grid, hl.in_grid, hl.vout * hl.wc(k, j) * hl.vin.transpose());
}

GridFunction FbnnModel::reconstruct_bias(int layer, int k) const {
    if (layer < 0 || layer >= static_cast<int>(hidden_.size())) {
        throw std::invalid_argument("reconstruct_bias: layer index out of range");
    }
    const FbnnLayer& hl = hidden_[layer];
    if (k < 0 || k >= hl.k_out) {
        throw std::invalid_argument("reconstruct_bias: neuron index out of range");
    }
    return GridFunction(hl.out_grid, hl.vstar * hl.bias_coef.row(k).transpose());
}

GridFunction FbnnModel::reconstruct_output_weight(int j) const {
    if (j < 0 || j >= output_.j_in) {
        throw std::invalid_argument("reconstruct_output_weight: index out of range");
    }
    return GridFunction(output_.in_grid, output_.vin * output_.weight_coef.row(j).transpose());
}

FdnnModel FbnnModel::to_fdnn() const {
    std::vector<ContinuousLayer> hidden;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const FbnnLayer& src = hidden_[l];
        ContinuousLayer layer;
        layer.in_grid = src.in_grid;
        layer.out_grid = src.out_grid;
        layer.j_in = src.j_in;
        layer.k_out = src.k_out;
        layer.act = src.act;
        for (int k = 0; k < src.k_out; ++k) {
            layer.bias.push_back(reconstruct_bias(static_cast<int>(l), k).values);
        }
        for (int k = 0; k < src.k_out; ++k) {
            for (int j = 0; j < src.j_in; ++j) {
                layer.weight.push_back(reconstruct_weight(static_cast<int>(l), j, k).values);
            }
        }
        hidden.push_back(std::move(layer));
    }
    FunctionalOutputLayer out;
    out.in_grid = output_.in_grid;
    out.j_in = output_.j_in;
    out.bias = output_.bias;
    out.act = output_.act;
    for (int j = 0; j < output_.j_in; ++j) {
        out.weight.push_back(reconstruct_output_weight(j).values);
    }
    return FdnnModel(input_count_, std::move(hidden), std::move(out));
}

Vec FbnnModel::predict(const CurveSet& data, const std::vector<int>& idx) const {
    FbnnCache cache;
    std::vector<Mat> x = gather_x(data, idx);
    if (!data.grid->matches(*input_grid())) {
        // Off-grid data: least-squares projection through the input basis.
        const BsplineBasis& basis =
            hidden_.empty() ? output_.in_basis : hidden_.front().in_basis;
        for (Mat& xr : x) {
            xr = project_curves(basis, data.grid->points(), xr, *input_grid());
        }
    }
    return forward_batch(x, cache);
}

double FbnnModel::loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                                     LossKind loss) {
    FbnnCache cache;
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

void FbnnModel::step(double lr) {
    if (!has_grads_) throw std::logic_error("FbnnModel::step: no gradients accumulated");
    apply_gradients(grads_, lr);
}

std::vector<double> FbnnModel::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const FbnnLayer& layer : hidden_) {
        p.insert(p.end(), layer.bias_coef.data(), layer.bias_coef.data() + layer.bias_coef.size());
        for (const Mat& w : layer.weight_coef) p.insert(p.end(), w.data(), w.data() + w.size());
    }
    p.insert(p.end(), output_.weight_coef.data(),
             output_.weight_coef.data() + output_.weight_coef.size());
    p.push_back(output_.bias);
    return p;
}

void FbnnModel::set_parameters(const std::vector<double>& p) {
    if (static_cast<long>(p.size()) != parameter_count()) {
        throw std::invalid_argument("FbnnModel::set_parameters: size mismatch");
    }
    std::size_t off = 0;
    for (FbnnLayer& layer : hidden_) {
        std::copy(p.begin() + off, p.begin() + off + layer.bias_coef.size(), layer.bias_coef.data());
        off += layer.bias_coef.size();
        for (Mat& w : layer.weight_coef) {
            std::copy(p.begin() + off, p.begin() + off + w.size(), w.data());
            off += w.size();
        }
    }
    std::copy(p.begin() + off, p.begin() + off + output_.weight_coef.size(),
              output_.weight_coef.data());
    off += output_.weight_coef.size();
    output_.bias = p[off];
}

std::vector<double> FbnnModel::gradient_discrete() const {
    if (!has_grads_) throw std::logic_error("FbnnModel::gradient_discrete: no gradients accumulated");
    // Coefficients are plain scalars, so the functional and discrete
    // conventions coincide.
    std::vector<double> g;
    g.reserve(parameter_count());
    for (const auto& layer : grads_.hidden) {
        g.insert(g.end(), layer.bias_coef.data(), layer.bias_coef.data() + layer.bias_coef.size());
        for (const Mat& w : layer.weight_coef) g.insert(g.end(), w.data(), w.data() + w.size());
    }
    g.insert(g.end(), grads_.out_weight_coef.data(),
             grads_.out_weight_coef.data() + grads_.out_weight_coef.size());
    g.push_back(grads_.out_bias);
    return g;
}

long FbnnModel::parameter_count() const {
    long count = 1;
    for (const FbnnLayer& layer : hidden_) {
        count += layer.bias_coef.size();
        count += static_cast<long>(layer.weight_coef.size()) *
                 (layer.out_basis.n_basis() * layer.in_basis.n_basis());
    }
    count += output_.weight_coef.size();
    return count;
}

Mat project_curves(const BsplineBasis& basis, const Vec& src_points, const Mat& src_values,
                   const Grid& dst_grid) {
    const Mat coef = basis.smooth(src_points, src_values);  // one row per curve
    return coef * basis.design(dst_grid).transpose();
}

}  // namespace funcnn
