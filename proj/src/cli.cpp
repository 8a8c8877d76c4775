#include "funcnn/cli.hpp"

#include <json.hpp>

#include <iostream>

#include "funcnn/csv.hpp"
#include "funcnn/errors.hpp"
#include "funcnn/serialize.hpp"

namespace funcnn {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            std::string keys;
            for (const char* key : allowed) keys += (keys.empty() ? "" : ", ") + std::string(key);
            throw config_error("unknown key '" + it.key() + "' in " + where +
                               " (known keys: " + keys + ")");
        }
    }
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    if (j.is_string()) {
        sc.kind = parse_scenario_kind(j.get<std::string>());
        return sc;
    }
    reject_unknown_keys(j, {"kind", "response", "noise_sd"}, "scenario");
    if (j.contains("kind")) sc.kind = parse_scenario_kind(j.at("kind").get<std::string>());
    if (j.contains("response")) {
        sc.response = parse_response_kind(j.at("response").get<std::string>());
    }
    if (j.contains("noise_sd")) sc.noise_sd = j.at("noise_sd").get<double>();
    if (sc.noise_sd < 0.0) throw config_error("scenario.noise_sd must be >= 0");
    return sc;
}

void train_from_json(const json& j, TrainConfig& train) {
    reject_unknown_keys(j,
                        {"lr", "max_epochs", "batch_size", "patience", "min_delta",
                         "early_stopping", "halve_on_increase", "standardize"},
                        "train");
    if (j.contains("lr")) train.lr = j.at("lr").get<double>();
    if (j.contains("max_epochs")) train.max_epochs = j.at("max_epochs").get<int>();
    if (j.contains("batch_size")) train.batch_size = j.at("batch_size").get<int>();
    if (j.contains("patience")) train.patience = j.at("patience").get<int>();
    if (j.contains("min_delta")) train.min_delta = j.at("min_delta").get<double>();
    if (j.contains("early_stopping")) train.early_stopping = j.at("early_stopping").get<bool>();
    if (j.contains("halve_on_increase")) {
        train.halve_on_increase = j.at("halve_on_increase").get<bool>();
    }
    if (j.contains("standardize")) train.standardize = j.at("standardize").get<bool>();
}

ModelConfig model_from_json(const json& j, const TrainConfig& default_train) {
    ModelConfig mc;
    mc.train = default_train;
    if (j.is_string()) {
        mc.kind = parse_model_kind(j.get<std::string>());
        return mc;
    }
    reject_unknown_keys(j,
                        {"name", "kind", "hidden_layers", "neurons", "s_points", "n_basis",
                         "basis_order", "activation", "functional_neurons", "dense_widths",
                         "ridge", "train"},
                        "model");
    if (j.contains("kind")) mc.kind = parse_model_kind(j.at("kind").get<std::string>());
    if (j.contains("name")) mc.name = j.at("name").get<std::string>();
    if (j.contains("hidden_layers")) mc.hidden_layers = j.at("hidden_layers").get<int>();
    if (j.contains("neurons")) mc.neurons = j.at("neurons").get<int>();
    if (j.contains("s_points")) mc.s_points = j.at("s_points").get<int>();
    if (j.contains("n_basis")) mc.n_basis = j.at("n_basis").get<int>();
    if (j.contains("basis_order")) mc.basis_order = j.at("basis_order").get<int>();
    if (j.contains("activation")) {
        mc.hidden_act = parse_activation(j.at("activation").get<std::string>());
    }
    if (j.contains("functional_neurons")) {
        mc.functional_neurons = j.at("functional_neurons").get<int>();
    }
    if (j.contains("dense_widths")) {
        mc.dense_widths = j.at("dense_widths").get<std::vector<int>>();
    }
    if (j.contains("ridge")) mc.ridge = j.at("ridge").get<double>();
    if (j.contains("train")) train_from_json(j.at("train"), mc.train);
    if (mc.hidden_layers < 0 || mc.neurons < 1 || mc.s_points < 2) {
        throw config_error("model: hidden_layers >= 0, neurons >= 1, s_points >= 2 required");
    }
    if (mc.n_basis <= mc.basis_order) {
        throw config_error("model: n_basis must exceed basis_order");
    }
    return mc;
}

}  // namespace

RunConfig load_run_config(const std::string& config_path, const CliOverrides& overrides) {
    RunConfig cfg;
    TrainConfig default_train;

    if (!config_path.empty()) {
        json j;
        try {
            j = json::parse(read_text_file(config_path));
        } catch (const json::parse_error& e) {
            throw config_error("config file '" + config_path + "' is not valid JSON: " + e.what());
        }
        reject_unknown_keys(j,
                            {"seed", "out", "threads", "scenario", "data", "split", "model",
                             "train", "benchmark"},
                            "config");
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        if (j.contains("train")) train_from_json(j.at("train"), default_train);
        cfg.model.train = default_train;
        if (j.contains("scenario")) cfg.scenario = scenario_from_json(j.at("scenario"));
        if (j.contains("data")) {
            const json& d = j.at("data");
            reject_unknown_keys(d, {"n", "m", "rho", "sigma2", "response"}, "data");
            if (d.contains("n")) cfg.n = d.at("n").get<int>();
            if (d.contains("m")) cfg.m = d.at("m").get<int>();
            if (d.contains("rho")) cfg.gp.rho = d.at("rho").get<double>();
            if (d.contains("sigma2")) cfg.gp.sigma2 = d.at("sigma2").get<double>();
            if (d.contains("response")) {
                cfg.data_response = d.at("response").get<std::string>();
                if (cfg.data_response != "auto") parse_response_kind(cfg.data_response);
            }
            if (cfg.n < 3 || cfg.m < 2) throw config_error("data: need n >= 3 and m >= 2");
            if (!(cfg.gp.rho > 0.0) || !(cfg.gp.sigma2 > 0.0)) {
                throw config_error("data: rho and sigma2 must be positive");
            }
        }
        if (j.contains("split")) {
            const json& s = j.at("split");
            reject_unknown_keys(s, {"train", "val", "test"}, "split");
            if (s.contains("train")) cfg.split_train = s.at("train").get<int>();
            if (s.contains("val")) cfg.split_val = s.at("val").get<int>();
            if (s.contains("test")) cfg.split_test = s.at("test").get<int>();
        }
        if (j.contains("model")) cfg.model = model_from_json(j.at("model"), default_train);
        if (j.contains("benchmark")) {
            const json& b = j.at("benchmark");
            reject_unknown_keys(b, {"reps", "scenarios", "models"}, "benchmark");
            if (b.contains("reps")) cfg.reps = b.at("reps").get<int>();
            if (b.contains("scenarios")) {
                for (const json& sj : b.at("scenarios")) {
                    cfg.bench_scenarios.push_back(scenario_from_json(sj));
                }
            }
            if (b.contains("models")) {
                for (const json& mj : b.at("models")) {
                    cfg.bench_models.push_back(model_from_json(mj, default_train));
                }
            }
        }
    }

    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out) cfg.out = *overrides.out;
    if (overrides.reps) cfg.reps = *overrides.reps;
    if (overrides.model) {
        cfg.model.kind = parse_model_kind(*overrides.model);
        cfg.model.name.clear();
    }
    if (overrides.scenario) cfg.scenario.kind = parse_scenario_kind(*overrides.scenario);
    if (cfg.reps < 1) throw config_error("reps must be >= 1");
    return cfg;
}

int cmd_simulate(const RunConfig& cfg) {
    const std::string out = cfg.out.empty() ? "dataset.csv" : cfg.out;
    const Rng rng(cfg.seed);
    const GridPtr grid = make_uniform_grid(cfg.m, 0.0, 1.0);
    const Mat curves = sample_gp_matrix(cfg.n, *grid, cfg.gp, rng.split("gp").seed());
    const CurveSet data = gen_dataset(cfg.scenario, grid, {curves}, rng.split("data").seed());
    write_dataset_csv(out, data);
    std::cout << "wrote " << out << ": n=" << data.n() << " m=" << cfg.m << " scenario="
              << cfg.scenario.name() << " seed=" << cfg.seed << "\n";
    return 0;
}

namespace {

Split protocol_split(const RunConfig& cfg, int n, bool early_stopping, const Rng& rng) {
    int n_test = cfg.split_test > 0 ? cfg.split_test : n / 3;
    int pool = n - n_test;
    int n_val = cfg.split_val > 0 ? cfg.split_val : (early_stopping ? pool / 2 : 0);
    int n_train = cfg.split_train > 0 ? cfg.split_train : pool - n_val;
    if (n_train + n_val + n_test > n || n_train < 1 || n_test < 1) {
        throw config_error("split: train/val/test sizes do not fit the dataset (n = " +
                           std::to_string(n) + ")");
    }
    return make_split(n, n_train, n_val, n_test, rng.split("shuffle").seed());
}

ResponseKind resolve_response(const RunConfig& cfg, const CurveSet& data) {
    if (cfg.data_response == "auto") return data.response;
    return parse_response_kind(cfg.data_response);
}

}  // namespace

int cmd_fit(const RunConfig& cfg, const std::string& data_path) {
    CurveSet data = read_dataset_csv(data_path);
    data.response = resolve_response(cfg, data);
    data.validate();
    const Rng rng(cfg.seed);
    const bool es = cfg.model.kind != ModelKind::Flm && cfg.model.train.early_stopping;
    const Split split = protocol_split(cfg, data.n(), es, rng);

    SavedModel saved;
    saved.response = data.response;
    if (cfg.model.train.standardize) {
        saved.has_standardizer = true;
        saved.standardizer = Standardizer::fit(data, split.train);
        data = saved.standardizer.apply(data);
    }

    FitReport report;
    if (cfg.model.kind == ModelKind::Flm) {
        const LinkKind link =
            data.response == ResponseKind::Binary ? LinkKind::Logistic : LinkKind::Identity;
        const BsplineBasis basis(cfg.model.basis_order, cfg.model.n_basis - cfg.model.basis_order);
        // FLM has no iterative path; train and val pools are pooled.
        std::vector<int> train_idx = split.train;
        train_idx.insert(train_idx.end(), split.val.begin(), split.val.end());
        auto flm = std::make_shared<FlmModel>(
            FlmModel::fit(data, train_idx, basis, cfg.model.ridge, link));
        saved.flm = flm;
        report.train_metrics =
            evaluate(flm->predict(data, train_idx), gather_y(data, train_idx), data.response);
        report.test_metrics =
            evaluate(flm->predict(data, split.test), gather_y(data, split.test), data.response);
    } else {
        auto model = build_model(cfg.model, data.grid, data.r(), data.response,
                                 rng.split("init:" + cfg.model.label()).seed());
        TrainConfig train = cfg.model.train;
        train.seed = rng.split("batches").seed();
        report = fit(*model, data, split, train);
        saved.net = std::shared_ptr<Trainable>(std::move(model));
    }

    const std::string out = cfg.out.empty() ? "model.json" : cfg.out;
    save_model(out, saved);
    std::cout << fit_report_to_json_text(report, out);
    if (report.wall_seconds > 0.0) {
        std::cerr << "fit wall time: " << report.wall_seconds << " s\n";
    }
    return 0;
}

int cmd_benchmark(const RunConfig& cfg) {
    BenchmarkConfig bench;
    bench.scenarios = cfg.bench_scenarios.empty() ? std::vector<Scenario>{cfg.scenario}
                                                  : cfg.bench_scenarios;
    bench.models = cfg.bench_models.empty() ? std::vector<ModelConfig>{cfg.model}
                                            : cfg.bench_models;
    bench.reps = cfg.reps;
    bench.base_seed = cfg.seed;
    bench.n = cfg.n;
    bench.m = cfg.m;
    bench.gp = cfg.gp;
    bench.threads = cfg.threads;

    const BenchmarkReport report = run_benchmark(bench);
    const std::string prefix = cfg.out.empty() ? "benchmark" : cfg.out;
    write_text_file(prefix + "_cells.csv", benchmark_cells_csv(report));
    write_text_file(prefix + "_aggregate.csv", benchmark_aggregate_csv(report));
    const std::string table = benchmark_text_table(report);
    write_text_file(prefix + "_table.txt", table);
    std::cout << table;
    if (!report.all_ok()) {
        for (const BenchmarkCell& c : report.cells) {
            if (!c.ok) {
                std::cerr << "cell failed: " << c.scenario << " " << c.model << " rep " << c.rep
                          << ": " << c.error << "\n";
            }
        }
        return 1;
    }
    return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& model_path, const std::string& data_path) {
    const SavedModel model = load_model(model_path);
    CurveSet data = read_dataset_csv(data_path);
    data.response = model.response;
    std::vector<int> all(data.n());
    for (int i = 0; i < data.n(); ++i) all[i] = i;
    const Vec yhat = model.predict(data, all);
    const std::string out = cfg.out.empty() ? "predictions.csv" : cfg.out;
    write_text_file(out, predictions_to_csv(yhat, model.response));
    std::cout << "wrote " << out << ": " << yhat.size() << " predictions (" << model.kind()
              << " model)\n";
    return 0;
}

}  // namespace funcnn
