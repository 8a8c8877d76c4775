#include "funcnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "funcnn/errors.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
    if (max_epochs < 0) throw std::invalid_argument("TrainConfig: max_epochs must be >= 0");
    if (early_stopping && patience < 1) {
        throw std::invalid_argument("TrainConfig: patience must be >= 1 with early stopping");
    }
    if (min_delta < 0.0) throw std::invalid_argument("TrainConfig: min_delta must be >= 0");
}

void Split::validate(int n) const {
    std::vector<char> seen(n, 0);
    auto check = [&](const std::vector<int>& idx, const char* name) {
        for (int i : idx) {
            if (i < 0 || i >= n) {
                throw std::invalid_argument(std::string("Split: ") + name + " index out of range");
            }
            if (seen[i]) {
                throw std::invalid_argument(std::string("Split: ") + name +
                                            " overlaps another subset");
            }
            seen[i] = 1;
        }
    };
    check(train, "train");
    check(val, "val");
    check(test, "test");
}

Split make_split(int n, int n_train, int n_val, int n_test, std::uint64_t seed) {
    if (n_train < 0 || n_val < 0 || n_test < 0 || n_train + n_val + n_test > n) {
        throw std::invalid_argument("make_split: subset sizes exceed n");
    }
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Rng rng = Rng(seed).split("split");
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform01() * (i + 1));
        std::swap(perm[i], perm[std::min(j, i)]);
    }
    Split s;
    s.train.assign(perm.begin(), perm.begin() + n_train);
    s.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    s.test.assign(perm.end() - n_test, perm.end());
    return s;
}

Metrics evaluate(const Vec& yhat, const Vec& y, ResponseKind kind) {
    if (yhat.size() != y.size() || y.size() == 0) {
        throw std::invalid_argument("evaluate: needs aligned, nonempty predictions");
    }
    Metrics m;
    m.rmse = std::sqrt((yhat - y).squaredNorm() / static_cast<double>(y.size()));
    if (kind == ResponseKind::Binary) {
        double errors = 0.0;
        double nll = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double label = yhat(i) >= 0.5 ? 1.0 : 0.0;
            if (label != y(i)) errors += 1.0;
            nll += loss_and_grad(LossKind::BinaryCrossEntropy, yhat(i), y(i)).first;
        }
        m.classification_error = errors / static_cast<double>(y.size());
        m.mean_log_likelihood = nll / static_cast<double>(y.size());
    }
    return m;
}

Metrics evaluate_model(const Trainable& model, const CurveSet& data,
                       const std::vector<int>& idx) {
    if (idx.empty()) throw std::invalid_argument("evaluate_model: empty index set");
    return evaluate(model.predict(data, idx), gather_y(data, idx), data.response);
}

namespace {

double eval_loss(const Trainable& model, const CurveSet& data, const std::vector<int>& idx,
                 LossKind loss) {
    return mean_loss(loss, model.predict(data, idx), gather_y(data, idx));
}

}  // namespace

FitReport fit(Trainable& model, const CurveSet& data, const Split& split, const TrainConfig& cfg) {
    cfg.validate();
    split.validate(data.n());
    if (split.train.empty()) throw std::invalid_argument("fit: empty training set");
    const bool use_val = cfg.early_stopping && !split.val.empty();
    if (cfg.early_stopping && split.val.empty()) {
        throw std::invalid_argument("fit: early stopping requires a validation set");
    }
    const LossKind loss =
        data.response == ResponseKind::Binary ? LossKind::BinaryCrossEntropy : LossKind::SquaredError;
    const auto t0 = std::chrono::steady_clock::now();

    FitReport report;
    const bool full_batch =
        cfg.batch_size <= 0 || cfg.batch_size >= static_cast<int>(split.train.size());
    double lr = cfg.lr;

    double train_loss = model.loss_and_gradients(data, split.train, loss);
    std::vector<double> best_params;
    double best_val = std::numeric_limits<double>::infinity();
    int since_improve = 0;
    if (use_val) {
        best_val = eval_loss(model, data, split.val, loss);
        best_params = model.parameters();
        report.best_epoch = 0;
    }

    Rng shuffle_rng = Rng(cfg.seed).split("batches");
    bool lr_exhausted = false;
    const double lr_cap = cfg.lr * 1e3;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (full_batch) {
            const std::vector<double> prev = model.parameters();
            model.step(lr);
            double new_loss = model.loss_and_gradients(data, split.train, loss);
            if (cfg.halve_on_increase) {
                while (std::isnan(new_loss) || new_loss > train_loss) {
                    model.set_parameters(prev);
                    lr *= 0.5;
                    if (lr < 1e-14) {
                        lr_exhausted = true;
                        break;
                    }
                    model.loss_and_gradients(data, split.train, loss);
                    model.step(lr);
                    new_loss = model.loss_and_gradients(data, split.train, loss);
                }
                if (lr_exhausted) {
                    // keep the previous parameters; gradients refreshed for consistency
                    new_loss = model.loss_and_gradients(data, split.train, loss);
                } else {
                    // accepted step: let the rate recover so one conservative
                    // halving early on does not freeze the whole run
                    lr = std::min(lr * 1.1, lr_cap);
                }
            }
            if (!std::isfinite(new_loss)) {
                throw numeric_error("fit: training diverged at epoch " + std::to_string(epoch));
            }
            train_loss = new_loss;
        } else {
            std::vector<int> order = split.train;
            Rng r = shuffle_rng.split(static_cast<std::uint64_t>(epoch));
            for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
                const int j = static_cast<int>(r.uniform01() * (i + 1));
                std::swap(order[i], order[std::min(j, i)]);
            }
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t stop =
                    std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
                const std::vector<int> chunk(order.begin() + start, order.begin() + stop);
                model.loss_and_gradients(data, chunk, loss);
                model.step(lr);
            }
            train_loss = eval_loss(model, data, split.train, loss);
            if (!std::isfinite(train_loss)) {
                throw numeric_error("fit: training diverged at epoch " + std::to_string(epoch));
            }
        }

        report.train_loss.push_back(train_loss);
        report.epochs_run = epoch;

        if (use_val) {
            const double vl = eval_loss(model, data, split.val, loss);
            report.val_loss.push_back(vl);
            if (vl < best_val - cfg.min_delta) {
                best_val = vl;
                report.best_epoch = epoch;
                best_params = model.parameters();
                since_improve = 0;
            } else if (++since_improve >= cfg.patience) {
                break;
            }
        } else {
            report.best_epoch = epoch;
        }
        if (lr_exhausted) break;
    }

    if (use_val && !best_params.empty()) {
        model.set_parameters(best_params);
    }

    report.train_metrics = evaluate_model(model, data, split.train);
    if (!split.test.empty()) {
        report.test_metrics = evaluate_model(model, data, split.test);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

Standardizer Standardizer::fit(const CurveSet& data, const std::vector<int>& idx) {
    if (idx.empty()) throw std::invalid_argument("Standardizer: empty index set");
    Standardizer s;
    for (const Mat& xr : data.x) {
        Vec mean = Vec::Zero(xr.cols());
        for (int i : idx) mean += xr.row(i).transpose();
        mean /= static_cast<double>(idx.size());
        Vec var = Vec::Zero(xr.cols());
        for (int i : idx) {
            var += (xr.row(i).transpose() - mean).array().square().matrix();
        }
        var /= std::max<double>(1.0, static_cast<double>(idx.size()) - 1.0);
        s.mean.push_back(std::move(mean));
        s.sd.push_back(var.array().sqrt().max(1e-12).matrix());
    }
    return s;
}

CurveSet Standardizer::apply(const CurveSet& data) const {
    if (mean.size() != data.x.size()) {
        throw std::invalid_argument("Standardizer: predictor count mismatch");
    }
    CurveSet out = data;
    for (std::size_t r = 0; r < out.x.size(); ++r) {
        out.x[r] = (out.x[r].rowwise() - mean[r].transpose()).array().rowwise() /
                   sd[r].transpose().array();
    }
    return out;
}

}  // namespace funcnn
