#pragma once

#include <cstdint>
#include <vector>

#include "funcnn/dense.hpp"
#include "funcnn/trainable.hpp"

namespace funcnn {

// The functional neural network baseline: a first layer of functional
// neurons H_q = act(b_q + sum_r integral of W_{q,r}(t) X_r(t) dt), each
// producing a scalar, followed by ordinary dense layers.
struct FnnArch {
    int inputs = 1;
    GridPtr input_grid;
    int functional_neurons = 4;
    std::vector<int> dense_widths = {4};
    Activation hidden_act = Activation::Tanh;
    Activation output_act = Activation::Linear;
};

struct FnnGradients {
    std::vector<Vec> func_weight;  // Q * R functional gradients (no quadrature weights)
    Vec func_bias;                 // Q
    DenseGradients dense;
};

struct FnnCache {
    std::vector<Mat> x;  // inputs, N x m each
    Mat func_pre;        // N x Q
    Mat func_h;          // N x Q
    DenseCache dense;
};

class FnnModel : public Trainable {
public:
    FnnModel(GridPtr grid, int inputs, int neurons, std::vector<Vec> func_weight, Vec func_bias,
             Activation func_act, DenseStack dense);

    static FnnModel init(const FnnArch& arch, std::uint64_t seed);

    const GridPtr& grid() const { return grid_; }
    int inputs() const { return inputs_; }
    int neurons() const { return q_; }
    Activation func_act() const { return func_act_; }
    const std::vector<Vec>& func_weight() const { return func_weight_; }
    std::vector<Vec>& func_weight() { return func_weight_; }
    const Vec& func_bias() const { return func_bias_; }
    Vec& func_bias() { return func_bias_; }
    const DenseStack& dense() const { return dense_; }
    DenseStack& dense() { return dense_; }

    Vec forward_batch(const std::vector<Mat>& x, FnnCache& cache) const;
    FnnGradients backward_batch(const FnnCache& cache, const Vec& dl_dyhat) const;
    void apply_gradients(const FnnGradients& grads, double lr);

    Vec predict(const CurveSet& data, const std::vector<int>& idx) const override;
    double loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                              LossKind loss) override;
    void step(double lr) override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& p) override;
    std::vector<double> gradient_discrete() const override;
    long parameter_count() const override;
    std::string kind() const override { return "fnn"; }

private:
    GridPtr grid_;
    int inputs_ = 1;
    int q_ = 1;
    std::vector<Vec> func_weight_;  // index q * inputs + r
    Vec func_bias_;
    Activation func_act_ = Activation::Tanh;
    DenseStack dense_;
    FnnGradients grads_;
    bool has_grads_ = false;
};

}  // namespace funcnn
