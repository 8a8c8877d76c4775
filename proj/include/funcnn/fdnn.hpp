#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcnn/activation.hpp"
#include "funcnn/grid.hpp"
#include "funcnn/trainable.hpp"

namespace funcnn {

// One continuous hidden layer: k_out continuous neurons, each holding a bias
// function on out_grid and j_in bivariate weight surfaces on
// out_grid x in_grid. Neuron k maps the incoming functions H_j(t) to
//   H_k(s) = act(bias_k(s) + sum_j integral of weight_{k,j}(s, t) H_j(t) dt).
struct ContinuousLayer {
    GridPtr in_grid;
    GridPtr out_grid;
    int j_in = 0;
    int k_out = 0;
    std::vector<Vec> bias;    // k_out functions on out_grid
    std::vector<Mat> weight;  // k_out * j_in surfaces (index k * j_in + j), each |out| x |in|
    Activation act = Activation::Tanh;

    void validate() const;
    const Mat& w(int k, int j) const { return weight[static_cast<std::size_t>(k) * j_in + j]; }
    Mat& w(int k, int j) { return weight[static_cast<std::size_t>(k) * j_in + j]; }
};

// Functional output layer: scalar bias plus one weight function per incoming
// neuron; yhat = act(bias + sum_j integral of weight_j(t) H_j(t) dt).
struct FunctionalOutputLayer {
    GridPtr in_grid;
    int j_in = 0;
    double bias = 0.0;
    std::vector<Vec> weight;  // j_in functions on in_grid
    Activation act = Activation::Linear;

    void validate() const;
};

struct FdnnLayerSpec {
    int neurons = 4;
    int s_points = 50;
    Activation act = Activation::Tanh;
};

struct FdnnArch {
    int inputs = 1;
    GridPtr input_grid;
    std::vector<FdnnLayerSpec> hidden;
    Activation output_act = Activation::Linear;
};

// Gradients shaped like the model parameters. Values are functional
// gradients (no quadrature weights); see Trainable for the two conventions.
struct FdnnGradients {
    struct Layer {
        std::vector<Vec> bias;
        std::vector<Mat> weight;
    };
    std::vector<Layer> hidden;
    std::vector<Vec> out_weight;
    double out_bias = 0.0;
};

// Batch forward cache: h[0] holds the R input matrices (N x m_t each);
// h[l] and pre[l] hold the k_out activation / pre-activation matrices of
// hidden layer l (N x m_s each).
struct FdnnCache {
    std::vector<std::vector<Mat>> h;
    std::vector<std::vector<Mat>> pre;
    Vec out_pre;
    Vec yhat;
};

class FdnnModel : public Trainable {
public:
    FdnnModel(int input_count, std::vector<ContinuousLayer> hidden, FunctionalOutputLayer output);

    // Weight surfaces i.i.d. uniform on [-a, a] with
    // a = sqrt(6 / (J * measure + K)) / measure, measure = in-grid length,
    // so contract outputs stay O(1) regardless of grid size; all biases zero.
    // Deterministic given seed.
    static FdnnModel init(const FdnnArch& arch, std::uint64_t seed);

    int input_count() const { return input_count_; }
    const std::vector<ContinuousLayer>& hidden() const { return hidden_; }
    std::vector<ContinuousLayer>& hidden() { return hidden_; }
    const FunctionalOutputLayer& output() const { return output_; }
    FunctionalOutputLayer& output() { return output_; }
    const GridPtr& input_grid() const;

    // Batch forward over row-curves; returns predictions and fills the cache.
    Vec forward_batch(const std::vector<Mat>& x, FdnnCache& cache) const;

    // Accumulate summed functional gradients, weighting sample i by
    // dl_dyhat(i). The cache must come from forward_batch on this model.
    FdnnGradients backward_batch(const FdnnCache& cache, const Vec& dl_dyhat) const;

    // Single-sample convenience wrappers.
    double forward(const std::vector<GridFunction>& x, FdnnCache& cache) const;
    FdnnGradients backward(const FdnnCache& cache, double dl_dyhat) const;

    // Pointwise steepest descent: p <- p - lr * g. Throws numeric_error
    // naming the offending layer if any gradient entry is non-finite.
    void apply_gradients(const FdnnGradients& grads, double lr);

    // Trainable interface.
    Vec predict(const CurveSet& data, const std::vector<int>& idx) const override;
    double loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                              LossKind loss) override;
    void step(double lr) override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& p) override;
    std::vector<double> gradient_discrete() const override;
    long parameter_count() const override;
    std::string kind() const override { return "fdnn"; }

private:
    void validate() const;

    int input_count_ = 1;
    std::vector<ContinuousLayer> hidden_;
    FunctionalOutputLayer output_;
    FdnnGradients grads_;
    bool has_grads_ = false;
};

}  // namespace funcnn
