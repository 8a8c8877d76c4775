#include "funcnn/benchmark.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "funcnn/errors.hpp"
#include "funcnn/fbnn.hpp"
#include "funcnn/fdnn.hpp"
#include "funcnn/fnn.hpp"
#include "funcnn/mlp.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Flm: return "flm";
        case ModelKind::Fdnn: return "fdnn";
        case ModelKind::Fbnn: return "fbnn";
        case ModelKind::Fnn: return "fnn";
        case ModelKind::Mlp: return "mlp";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "flm") return ModelKind::Flm;
    if (name == "fdnn") return ModelKind::Fdnn;
    if (name == "fbnn") return ModelKind::Fbnn;
    if (name == "fnn") return ModelKind::Fnn;
    if (name == "mlp") return ModelKind::Mlp;
    throw config_error("unknown model '" + name + "' (valid: flm, fdnn, fbnn, fnn, mlp)");
}

std::unique_ptr<Trainable> build_model(const ModelConfig& cfg, const GridPtr& grid, int inputs,
                                       ResponseKind response, std::uint64_t seed) {
    const Activation out_act =
        response == ResponseKind::Binary ? Activation::Sigmoid : Activation::Linear;
    switch (cfg.kind) {
        case ModelKind::Fdnn: {
            FdnnArch arch;
            arch.inputs = inputs;
            arch.input_grid = grid;
            arch.output_act = out_act;
            for (int l = 0; l < cfg.hidden_layers; ++l) {
                arch.hidden.push_back({cfg.neurons, cfg.s_points, cfg.hidden_act});
            }
            return std::make_unique<FdnnModel>(FdnnModel::init(arch, seed));
        }
        case ModelKind::Fbnn: {
            FbnnArch arch;
            arch.inputs = inputs;
            arch.input_grid = grid;
            arch.output_act = out_act;
            arch.output_basis = cfg.n_basis;
            arch.output_order = cfg.basis_order;
            for (int l = 0; l < cfg.hidden_layers; ++l) {
                arch.hidden.push_back({cfg.neurons, cfg.s_points, cfg.n_basis, cfg.n_basis,
                                       cfg.n_basis, cfg.basis_order, cfg.hidden_act});
            }
            return std::make_unique<FbnnModel>(FbnnModel::init(arch, seed));
        }
        case ModelKind::Fnn: {
            FnnArch arch;
            arch.inputs = inputs;
            arch.input_grid = grid;
            arch.functional_neurons = cfg.functional_neurons;
            arch.dense_widths = cfg.dense_widths;
            arch.hidden_act = cfg.hidden_act;
            arch.output_act = out_act;
            return std::make_unique<FnnModel>(FnnModel::init(arch, seed));
        }
        case ModelKind::Mlp: {
            MlpArch arch;
            arch.inputs = inputs;
            arch.input_grid = grid;
            arch.dense_widths = cfg.dense_widths;
            arch.hidden_act = cfg.hidden_act;
            arch.output_act = out_act;
            return std::make_unique<MlpModel>(MlpModel::init(arch, seed));
        }
        case ModelKind::Flm:
            throw std::invalid_argument("build_model: flm is fit in closed form, not trained");
    }
    throw std::logic_error("unreachable model kind");
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FUNCNN_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

bool BenchmarkReport::all_ok() const {
    for (const BenchmarkCell& c : cells) {
        if (!c.ok) return false;
    }
    return true;
}

namespace {

BenchmarkCell run_cell(const BenchmarkConfig& cfg, const Scenario& scenario,
                       const ModelConfig& model, int rep) {
    BenchmarkCell cell;
    cell.scenario = scenario.name();
    cell.model = model.label();
    cell.rep = rep;
    cell.seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
    try {
        const Rng cell_rng(cell.seed);
        const GridPtr grid = make_uniform_grid(cfg.m, 0.0, 1.0);
        const Mat curves = sample_gp_matrix(cfg.n, *grid, cfg.gp, cell_rng.split("gp").seed());
        CurveSet data = gen_dataset(scenario, grid, {curves}, cell_rng.split("data").seed());

        const int n_test = cfg.n / 3;
        const int pool = cfg.n - n_test;
        const bool es = model.kind != ModelKind::Flm && model.train.early_stopping;
        const int n_val = es ? pool / 2 : 0;
        const Split split =
            make_split(cfg.n, pool - n_val, n_val, n_test, cell_rng.split("shuffle").seed());

        Standardizer stats;
        if (model.train.standardize) {
            stats = Standardizer::fit(data, split.train);
            data = stats.apply(data);
        }

        if (model.kind == ModelKind::Flm) {
            const LinkKind link = data.response == ResponseKind::Binary ? LinkKind::Logistic
                                                                        : LinkKind::Identity;
            const BsplineBasis basis(model.basis_order, model.n_basis - model.basis_order);
            const FlmModel flm = FlmModel::fit(data, split.train, basis, model.ridge, link);
            cell.metrics = evaluate(flm.predict(data, split.test), gather_y(data, split.test),
                                    data.response);
        } else {
            auto trainable = build_model(model, grid, data.r(), data.response,
                                         cell_rng.split("init:" + model.label()).seed());
            TrainConfig train = model.train;
            train.seed = cell_rng.split("batches:" + model.label()).seed();
            const FitReport report = fit(*trainable, data, split, train);
            cell.metrics = report.test_metrics;
        }
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    return cell;
}

void aggregate_report(BenchmarkReport& report, const BenchmarkConfig& cfg) {
    for (const Scenario& sc : cfg.scenarios) {
        for (const ModelConfig& mc : cfg.models) {
            BenchmarkAggregate agg;
            agg.scenario = sc.name();
            agg.model = mc.label();
            std::vector<const Metrics*> ok;
            for (const BenchmarkCell& cell : report.cells) {
                if (cell.ok && cell.scenario == agg.scenario && cell.model == agg.model) {
                    ok.push_back(&cell.metrics);
                }
            }
            agg.reps_ok = static_cast<int>(ok.size());
            auto reduce = [&ok](double Metrics::*field, double& mean_out, double& se_out) {
                double sum = 0.0;
                int count = 0;
                for (const Metrics* m : ok) {
                    if (std::isfinite(m->*field)) {
                        sum += m->*field;
                        ++count;
                    }
                }
                if (count == 0) return;
                const double mean = sum / count;
                double ss = 0.0;
                for (const Metrics* m : ok) {
                    if (std::isfinite(m->*field)) {
                        ss += (m->*field - mean) * (m->*field - mean);
                    }
                }
                mean_out = mean;
                se_out = count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
            };
            reduce(&Metrics::rmse, agg.mean.rmse, agg.std_error.rmse);
            reduce(&Metrics::classification_error, agg.mean.classification_error,
                   agg.std_error.classification_error);
            reduce(&Metrics::mean_log_likelihood, agg.mean.mean_log_likelihood,
                   agg.std_error.mean_log_likelihood);
            report.aggregates.push_back(std::move(agg));
        }
    }
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.reps < 1) throw config_error("benchmark: reps must be >= 1");
    if (cfg.scenarios.empty() || cfg.models.empty()) {
        throw config_error("benchmark: needs at least one scenario and one model");
    }
    struct Task {
        const Scenario* scenario;
        const ModelConfig* model;
        int rep;
    };
    std::vector<Task> tasks;
    for (const Scenario& sc : cfg.scenarios) {
        for (const ModelConfig& mc : cfg.models) {
            for (int rep = 0; rep < cfg.reps; ++rep) tasks.push_back({&sc, &mc, rep});
        }
    }

    BenchmarkReport report;
    report.cells.resize(tasks.size());

    const int threads = std::min<int>(resolve_thread_count(cfg.threads),
                                      static_cast<int>(tasks.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            report.cells[i] = run_cell(cfg, *tasks[i].scenario, *tasks[i].model, tasks[i].rep);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    aggregate_report(report, cfg);
    return report;
}

}  // namespace funcnn
