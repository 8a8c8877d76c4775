#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcnn/activation.hpp"
#include "funcnn/bspline.hpp"
#include "funcnn/fdnn.hpp"
#include "funcnn/grid.hpp"
#include "funcnn/trainable.hpp"

namespace funcnn {

// Continuous hidden layer with basis-expanded parameters. The bias function
// is sum_b B_{k,b} vstar_b(s); the weight surface is
// sum_{c,d} W_{(j,k),c,d} v_c(s) v_d(t). Forward evaluation works through
// the integrals A_{j,d} = integral of v_d(t) H_j(t) dt, so only coefficient
// arrays are learned. Design matrices on the fixed grids are precomputed at
// construction.
struct FbnnLayer {
    GridPtr in_grid;
    GridPtr out_grid;
    int j_in = 0;
    int k_out = 0;
    BsplineBasis bias_basis;  // B functions, vstar on s
    BsplineBasis out_basis;   // C functions, v on s
    BsplineBasis in_basis;    // D functions, v on t
    Mat bias_coef;            // k_out x B
    std::vector<Mat> weight_coef;  // k_out * j_in arrays (index k * j_in + j), each C x D
    Activation act = Activation::Tanh;

    // Cached designs: vstar (m_s x B), vout (m_s x C), vin (m_t x D) and the
    // quadrature-weighted vin_w = diag(in weights) * vin.
    Mat vstar, vout, vin, vin_w;

    FbnnLayer(GridPtr in, GridPtr out, int j, int k, BsplineBasis bias_b, BsplineBasis out_b,
              BsplineBasis in_b, Activation a);
    void validate() const;
    void refresh_design();
    const Mat& wc(int k, int j) const { return weight_coef[static_cast<std::size_t>(k) * j_in + j]; }
    Mat& wc(int k, int j) { return weight_coef[static_cast<std::size_t>(k) * j_in + j]; }
};

// Output layer: yhat = act(bias + sum_j sum_c W_{j,c} A_{j,c}) with
// A_{j,c} = integral of v_c(t) H_j(t) dt.
struct FbnnOutputLayer {
    GridPtr in_grid;
    int j_in = 0;
    BsplineBasis in_basis;  // C functions
    double bias = 0.0;
    Mat weight_coef;  // j_in x C
    Activation act = Activation::Linear;

    Mat vin, vin_w;

    FbnnOutputLayer(GridPtr in, int j, BsplineBasis basis, Activation a);
    void validate() const;
    void refresh_design();
};

struct FbnnLayerSpec {
    int neurons = 4;
    int s_points = 50;
    int n_bias_basis = 7;  // B
    int n_out_basis = 7;   // C
    int n_in_basis = 7;    // D
    int order = 4;
    Activation act = Activation::Tanh;
};

struct FbnnArch {
    int inputs = 1;
    GridPtr input_grid;
    std::vector<FbnnLayerSpec> hidden;
    int output_basis = 7;
    int output_order = 4;
    Activation output_act = Activation::Linear;
};

struct FbnnGradients {
    struct Layer {
        Mat bias_coef;
        std::vector<Mat> weight_coef;
    };
    std::vector<Layer> hidden;
    Mat out_weight_coef;
    double out_bias = 0.0;
};

// Batch cache: h[0] holds inputs; a[l][j] holds the N x D integral arrays
// feeding hidden layer l; aout[j] the N x C arrays feeding the output layer.
struct FbnnCache {
    std::vector<std::vector<Mat>> h;
    std::vector<std::vector<Mat>> a;
    std::vector<std::vector<Mat>> pre;
    std::vector<Mat> aout;
    Vec out_pre;
    Vec yhat;
};

class FbnnModel : public Trainable {
public:
    FbnnModel(int input_count, std::vector<FbnnLayer> hidden, FbnnOutputLayer output);

    // Weight coefficients i.i.d. uniform on [-a, a] with a = 1 / sqrt(J * D)
    // (output layer: 1 / sqrt(J * C)); bias coefficients and the scalar bias
    // start at zero. Deterministic given seed.
    static FbnnModel init(const FbnnArch& arch, std::uint64_t seed);

    int input_count() const { return input_count_; }
    const std::vector<FbnnLayer>& hidden() const { return hidden_; }
    std::vector<FbnnLayer>& hidden() { return hidden_; }
    const FbnnOutputLayer& output() const { return output_; }
    FbnnOutputLayer& output() { return output_; }
    const GridPtr& input_grid() const;

    Vec forward_batch(const std::vector<Mat>& x, FbnnCache& cache) const;
    FbnnGradients backward_batch(const FbnnCache& cache, const Vec& dl_dyhat) const;

    double forward(const std::vector<GridFunction>& x, FbnnCache& cache) const;
    FbnnGradients backward(const FbnnCache& cache, double dl_dyhat) const;

    void apply_gradients(const FbnnGradients& grads, double lr);

    // w(s, t) = sum_{c,d} W_{(j,k),c,d} v_c(s) v_d(t) on out_grid x in_grid.
    BivariateGridFunction reconstruct_weight(int layer, int j, int k) const;
    GridFunction reconstruct_bias(int layer, int k) const;
    GridFunction reconstruct_output_weight(int j) const;

    // FDNN with this model's reconstructed weight surfaces and bias
    // functions; forward passes agree to quadrature-level rounding.
    FdnnModel to_fdnn() const;

    // Trainable interface.
    Vec predict(const CurveSet& data, const std::vector<int>& idx) const override;
    double loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                              LossKind loss) override;
    void step(double lr) override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& p) override;
    std::vector<double> gradient_discrete() const override;
    long parameter_count() const override;
    std::string kind() const override { return "fbnn"; }

private:
    void validate() const;

    int input_count_ = 1;
    std::vector<FbnnLayer> hidden_;
    FbnnOutputLayer output_;
    FbnnGradients grads_;
    bool has_grads_ = false;
};

// Least-squares projection of curves sampled at src_points onto dst_grid
// through the basis: coefficients fit per curve (rows), then evaluated on
// dst_grid. Curves already in the basis span are reproduced exactly.
Mat project_curves(const BsplineBasis& basis, const Vec& src_points, const Mat& src_values,
                   const Grid& dst_grid);

}  // namespace funcnn
