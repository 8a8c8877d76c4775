#include <CLI11.hpp>

#include <iostream>

#include "funcnn/cli.hpp"
#include "funcnn/errors.hpp"

namespace {

struct GlobalFlags {
    std::string config;
    funcnn::CliOverrides overrides;
};

void add_common_flags(CLI::App* cmd, GlobalFlags& flags) {
    cmd->add_option("--config", flags.config, "JSON run configuration file");
    auto bind = [cmd](const char* name, auto& slot, const char* help) {
        using T = typename std::decay_t<decltype(slot)>::value_type;
        cmd->add_option_function<T>(
            name, [&slot](const T& v) { slot = v; }, help);
    };
    bind("--seed", flags.overrides.seed, "random seed");
    bind("--out", flags.overrides.out, "output path (or path prefix for benchmark)");
    bind("--reps", flags.overrides.reps, "benchmark replications");
    bind("--model", flags.overrides.model, "model kind: flm | fdnn | fbnn | fnn | mlp");
    bind("--scenario", flags.overrides.scenario,
         "scenario kind: linear | cam | single_index | multiple_index | quadratic | "
         "complex_quadratic");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"funcnn: functional neural networks for scalar-on-function regression"};
    app.require_subcommand(1);

    GlobalFlags flags;
    std::string data_path;
    std::string model_path;

    CLI::App* simulate = app.add_subcommand("simulate", "generate a simulation dataset CSV");
    add_common_flags(simulate, flags);

    CLI::App* fit = app.add_subcommand("fit", "fit a model to a dataset CSV");
    add_common_flags(fit, flags);
    fit->add_option("data", data_path, "dataset CSV path")->required();

    CLI::App* benchmark =
        app.add_subcommand("benchmark", "replicate scenarios x models and aggregate metrics");
    add_common_flags(benchmark, flags);

    CLI::App* predict = app.add_subcommand("predict", "predict with a saved model");
    add_common_flags(predict, flags);
    predict->add_option("model", model_path, "saved model JSON path")->required();
    predict->add_option("data", data_path, "dataset CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const funcnn::RunConfig cfg = funcnn::load_run_config(flags.config, flags.overrides);
        if (simulate->parsed()) return funcnn::cmd_simulate(cfg);
        if (fit->parsed()) return funcnn::cmd_fit(cfg, data_path);
        if (benchmark->parsed()) return funcnn::cmd_benchmark(cfg);
        if (predict->parsed()) return funcnn::cmd_predict(cfg, model_path, data_path);
    } catch (const funcnn::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
