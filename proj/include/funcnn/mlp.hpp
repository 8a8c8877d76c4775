#pragma once

#include <cstdint>
#include <vector>

#include "funcnn/dense.hpp"
#include "funcnn/trainable.hpp"

namespace funcnn {

// Conventional neural network on the raw curve samples: curves are
// concatenated into an m * R feature vector and fed to dense layers.
struct MlpArch {
    int inputs = 1;
    GridPtr input_grid;
    std::vector<int> dense_widths = {16};
    Activation hidden_act = Activation::Tanh;
    Activation output_act = Activation::Linear;
};

class MlpModel : public Trainable {
public:
    MlpModel(GridPtr grid, int inputs, DenseStack dense);

    static MlpModel init(const MlpArch& arch, std::uint64_t seed);

    const GridPtr& grid() const { return grid_; }
    int inputs() const { return inputs_; }
    const DenseStack& dense() const { return dense_; }
    DenseStack& dense() { return dense_; }

    Vec forward_batch(const std::vector<Mat>& x, DenseCache& cache) const;

    Vec predict(const CurveSet& data, const std::vector<int>& idx) const override;
    double loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                              LossKind loss) override;
    void step(double lr) override;
    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& p) override;
    std::vector<double> gradient_discrete() const override;
    long parameter_count() const override;
    std::string kind() const override { return "mlp"; }

private:
    Mat stack_features(const std::vector<Mat>& x) const;

    GridPtr grid_;
    int inputs_ = 1;
    DenseStack dense_;
    DenseGradients grads_;
    bool has_grads_ = false;
};

}  // namespace funcnn
