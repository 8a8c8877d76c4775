#pragma once

#include <vector>

#include "funcnn/activation.hpp"
#include "funcnn/grid.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

// Plain fully connected layers used by the FNN and MLP baselines.
struct DenseLayer {
    Mat w;  // out x in
    Vec b;  // out
    Activation act = Activation::Tanh;
};

struct DenseCache {
    std::vector<Mat> h;    // h[0] = input, h[i] = activation of layer i (N x width)
    std::vector<Mat> pre;  // pre-activations per layer
};

struct DenseGradients {
    std::vector<Mat> w;
    std::vector<Vec> b;
};

class DenseStack {
public:
    DenseStack() = default;
    explicit DenseStack(std::vector<DenseLayer> layers);

    // Glorot-uniform weights, zero biases: hidden widths then a final layer
    // of width 1 with output_act.
    static DenseStack init(int input_dim, const std::vector<int>& hidden_widths,
                           Activation hidden_act, Activation output_act, Rng& rng);

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    int input_dim() const;
    int output_dim() const;

    Mat forward_batch(const Mat& x, DenseCache& cache) const;

    // dout = dL/d(output) (N x out). Returns parameter gradients; if dinput
    // is non-null it receives dL/d(input).
    DenseGradients backward_batch(const DenseCache& cache, const Mat& dout, Mat* dinput) const;

    void apply_gradients(const DenseGradients& grads, double lr);

    long parameter_count() const;
    void flatten(std::vector<double>& out) const;
    std::size_t unflatten(const std::vector<double>& p, std::size_t offset);
    static void flatten_gradients(const DenseGradients& grads, std::vector<double>& out);

private:
    std::vector<DenseLayer> layers_;
};

}  // namespace funcnn
