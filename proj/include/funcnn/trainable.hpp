#pragma once

#include <string>
#include <vector>

#include "funcnn/loss.hpp"
#include "funcnn/scenario.hpp"

namespace funcnn {

// Contract shared by every gradient-trained model. Two gradient conventions
// live side by side:
//
//  * step() descends along the FUNCTIONAL gradients: pointwise partials of
//    the continuous objective, carrying no quadrature weights. Updating
//    p(.) <- p(.) - lr g(.) is steepest descent in the quadrature-weighted
//    discrete space and is invariant to grid refinement.
//
//  * gradient_discrete() returns those same gradients scaled by their
//    quadrature measures, i.e. the exact gradient of the discretized mean
//    loss with respect to the stored parameter values. Central finite
//    differences certify it entry for entry.
//
// For purely scalar-parameter models the two coincide.
class Trainable {
public:
    virtual ~Trainable() = default;

    // Predictions for the given rows (probabilities for sigmoid-output models).
    virtual Vec predict(const CurveSet& data, const std::vector<int>& idx) const = 0;

    // Mean loss over idx at the current parameters; retains the mean-loss
    // gradients internally for the next step() / gradient_discrete() call.
    virtual double loss_and_gradients(const CurveSet& data, const std::vector<int>& idx,
                                      LossKind loss) = 0;

    virtual void step(double lr) = 0;

    // Flat parameter snapshot; ordering is stable for a given architecture.
    virtual std::vector<double> parameters() const = 0;
    virtual void set_parameters(const std::vector<double>& p) = 0;

    virtual std::vector<double> gradient_discrete() const = 0;

    virtual long parameter_count() const = 0;
    virtual std::string kind() const = 0;
};

// Gather rows of a CurveSet into dense batch matrices.
std::vector<Mat> gather_x(const CurveSet& data, const std::vector<int>& idx);
Vec gather_y(const CurveSet& data, const std::vector<int>& idx);

}  // namespace funcnn
