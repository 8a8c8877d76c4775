#pragma once

#include <optional>
#include <string>

#include "funcnn/benchmark.hpp"

namespace funcnn {

// Resolved run configuration: documented defaults, overridden by the config
// file, overridden by command-line flags (flags > file > defaults). Unknown
// configuration keys are rejected.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;

    Scenario scenario;
    int n = 1500;
    int m = 200;
    MaternParams gp;
    std::string data_response = "auto";  // dataset reading: auto | continuous | binary

    ModelConfig model;

    int split_train = 0;  // 0: protocol default (n_test = n/3, val carved when early stopping)
    int split_val = 0;
    int split_test = 0;

    int reps = 10;
    std::vector<Scenario> bench_scenarios;
    std::vector<ModelConfig> bench_models;
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> reps;
    std::optional<std::string> model;
    std::optional<std::string> scenario;
};

RunConfig load_run_config(const std::string& config_path, const CliOverrides& overrides);

int cmd_simulate(const RunConfig& cfg);
int cmd_fit(const RunConfig& cfg, const std::string& data_path);
int cmd_benchmark(const RunConfig& cfg);
int cmd_predict(const RunConfig& cfg, const std::string& model_path, const std::string& data_path);

}  // namespace funcnn
