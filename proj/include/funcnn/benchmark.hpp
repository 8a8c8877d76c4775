#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "funcnn/activation.hpp"
#include "funcnn/flm.hpp"
#include "funcnn/matern.hpp"
#include "funcnn/training.hpp"

namespace funcnn {

enum class ModelKind { Flm, Fdnn, Fbnn, Fnn, Mlp };

const char* model_kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string& name);  // throws config_error

// One model entry of a benchmark (or a single cmd_fit run).
struct ModelConfig {
    std::string name;  // table label; defaults to the kind name
    ModelKind kind = ModelKind::Fdnn;

    int hidden_layers = 1;  // fdnn / fbnn continuous hidden layers
    int neurons = 4;        // continuous neurons per hidden layer
    int s_points = 50;      // internal s-grid size
    int n_basis = 7;        // fbnn basis count (B = C = D) and flm basis size
    int basis_order = 4;
    Activation hidden_act = Activation::Tanh;

    int functional_neurons = 4;      // fnn first layer
    std::vector<int> dense_widths = {4};  // fnn trailing / mlp hidden widths

    double ridge = 1e-6;  // flm

    TrainConfig train;

    std::string label() const { return name.empty() ? model_kind_name(kind) : name; }
};

// Gradient-trained model for a config; output activation follows the
// response kind (linear for continuous, sigmoid for binary). FLM has no
// gradient path and is not built here.
std::unique_ptr<Trainable> build_model(const ModelConfig& cfg, const GridPtr& grid, int inputs,
                                       ResponseKind response, std::uint64_t seed);

struct BenchmarkConfig {
    std::vector<Scenario> scenarios;
    std::vector<ModelConfig> models;
    int reps = 10;
    std::uint64_t base_seed = 1;
    int n = 1500;
    int m = 200;
    MaternParams gp;
    int threads = 0;  // 0: FUNCNN_THREADS env var, else hardware concurrency
};

struct BenchmarkCell {
    std::string scenario;
    std::string model;
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    Metrics metrics;
};

struct BenchmarkAggregate {
    std::string scenario;
    std::string model;
    int reps_ok = 0;
    Metrics mean;
    Metrics std_error;
};

struct BenchmarkReport {
    std::vector<BenchmarkCell> cells;        // scenario-major, model, rep order
    std::vector<BenchmarkAggregate> aggregates;

    bool all_ok() const;
};

// For each (scenario, model, rep): seed = base_seed + rep, regenerate the
// dataset, split n into a 2:1 train:test division (validation carved from
// the training pool when the model early-stops; FLM always sees the full
// pool), fit, evaluate on the test rows. Cells run independently and may be
// executed concurrently; per-cell failures are recorded and do not stop the
// run.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

int resolve_thread_count(int requested);

}  // namespace funcnn
