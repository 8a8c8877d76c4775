#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "funcnn/loss.hpp"
#include "funcnn/trainable.hpp"

namespace funcnn {

struct TrainConfig {
    double lr = 0.01;
    int max_epochs = 2000;
    int batch_size = 0;  // 0 = full batch
    int patience = 50;
    double min_delta = 1e-5;
    bool early_stopping = true;
    // Full-batch safeguard: if a step increases the training loss, undo it,
    // halve lr and retry, keeping the per-epoch loss non-increasing.
    bool halve_on_increase = true;
    bool standardize = false;
    std::uint64_t seed = 0;  // mini-batch shuffling

    void validate() const;
};

struct Split {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;

    void validate(int n) const;  // disjoint, in range
};

// Shuffles 0..n-1 and deals the first n_train to train, the next n_val to
// val, and the LAST n_test to test. The test set therefore only depends on
// (n, n_test, seed): carving a validation block out of the training pool
// leaves it unchanged.
Split make_split(int n, int n_train, int n_val, int n_test, std::uint64_t seed);

struct Metrics {
    double rmse = std::numeric_limits<double>::quiet_NaN();
    double classification_error = std::numeric_limits<double>::quiet_NaN();
    double mean_log_likelihood = std::numeric_limits<double>::quiet_NaN();
};

// RMSE always; for binary responses also the 0.5-threshold classification
// error (ties classified positive) and the mean negative log-likelihood,
// reported under the mean_log_likelihood label.
Metrics evaluate(const Vec& yhat, const Vec& y, ResponseKind kind);
Metrics evaluate_model(const Trainable& model, const CurveSet& data, const std::vector<int>& idx);

struct FitReport {
    std::vector<double> train_loss;  // per epoch, after that epoch's update
    std::vector<double> val_loss;    // per epoch when a validation set is used
    int best_epoch = 0;
    int epochs_run = 0;
    Metrics train_metrics;
    Metrics test_metrics;
    double wall_seconds = 0.0;
};

// Gradient-descent training with optional early stopping. The loss kind
// follows the response kind (squared error / binary cross entropy). With
// early stopping the model is left at the best-validation parameters.
// A non-finite training loss raises numeric_error naming the epoch.
FitReport fit(Trainable& model, const CurveSet& data, const Split& split, const TrainConfig& cfg);

// Pointwise standardization of predictor curves: statistics from the given
// rows, applied to every curve. sd floors at 1e-12.
struct Standardizer {
    std::vector<Vec> mean;  // per predictor
    std::vector<Vec> sd;

    static Standardizer fit(const CurveSet& data, const std::vector<int>& idx);
    CurveSet apply(const CurveSet& data) const;
};

}  // namespace funcnn
