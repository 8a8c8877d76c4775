#include "funcnn/serialize.hpp"

#include <json.hpp>

#include <cmath>

#include "funcnn/csv.hpp"
#include "funcnn/errors.hpp"
#include "funcnn/fbnn.hpp"
#include "funcnn/fdnn.hpp"
#include "funcnn/fnn.hpp"
#include "funcnn/mlp.hpp"

namespace funcnn {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json out;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    json data = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) data.push_back(m(i, j));
    }
    out["data"] = std::move(data);
    return out;
}

Mat mat_from_json(const json& j) {
    Mat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    const json& data = j.at("data");
    std::size_t k = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = data.at(k++).get<double>();
    }
    return m;
}

json grid_to_json(const Grid& g) {
    json out;
    out["points"] = vec_to_json(g.points());
    out["weights"] = vec_to_json(g.weights());
    return out;
}

GridPtr grid_from_json(const json& j) {
    return std::make_shared<const Grid>(vec_from_json(j.at("points")),
                                        vec_from_json(j.at("weights")));
}

json basis_to_json(const BsplineBasis& b) {
    return json{{"order", b.order()}, {"interior_knots", b.interior_knot_count()}};
}

BsplineBasis basis_from_json(const json& j) {
    return BsplineBasis(j.at("order").get<int>(), j.at("interior_knots").get<int>());
}

json dense_to_json(const DenseStack& stack) {
    json layers = json::array();
    for (const DenseLayer& l : stack.layers()) {
        layers.push_back(json{{"w", mat_to_json(l.w)},
                              {"b", vec_to_json(l.b)},
                              {"activation", activation_name(l.act)}});
    }
    return layers;
}

DenseStack dense_from_json(const json& j) {
    std::vector<DenseLayer> layers;
    for (const json& lj : j) {
        DenseLayer l;
        l.w = mat_from_json(lj.at("w"));
        l.b = vec_from_json(lj.at("b"));
        l.act = parse_activation(lj.at("activation").get<std::string>());
        layers.push_back(std::move(l));
    }
    return DenseStack(std::move(layers));
}

json fdnn_to_json(const FdnnModel& m) {
    json out;
    out["inputs"] = m.input_count();
    out["input_grid"] = grid_to_json(*m.input_grid());
    json hidden = json::array();
    for (const ContinuousLayer& layer : m.hidden()) {
        json lj;
        lj["out_grid"] = grid_to_json(*layer.out_grid);
        lj["neurons"] = layer.k_out;
        lj["activation"] = activation_name(layer.act);
        json bias = json::array();
        for (const Vec& b : layer.bias) bias.push_back(vec_to_json(b));
        lj["bias"] = std::move(bias);
        json weight = json::array();
        for (const Mat& w : layer.weight) weight.push_back(mat_to_json(w));
        lj["weight"] = std::move(weight);
        hidden.push_back(std::move(lj));
    }
    out["hidden"] = std::move(hidden);
    json oj;
    oj["bias"] = m.output().bias;
    oj["activation"] = activation_name(m.output().act);
    json ow = json::array();
    for (const Vec& w : m.output().weight) ow.push_back(vec_to_json(w));
    oj["weight"] = std::move(ow);
    out["output"] = std::move(oj);
    return out;
}

std::shared_ptr<FdnnModel> fdnn_from_json(const json& j) {
    const int inputs = j.at("inputs").get<int>();
    GridPtr grid = grid_from_json(j.at("input_grid"));
    std::vector<ContinuousLayer> hidden;
    GridPtr in_grid = grid;
    int j_in = inputs;
    for (const json& lj : j.at("hidden")) {
        ContinuousLayer layer;
        layer.in_grid = in_grid;
        layer.out_grid = grid_from_json(lj.at("out_grid"));
        layer.j_in = j_in;
        layer.k_out = lj.at("neurons").get<int>();
        layer.act = parse_activation(lj.at("activation").get<std::string>());
        for (const json& bj : lj.at("bias")) layer.bias.push_back(vec_from_json(bj));
        for (const json& wj : lj.at("weight")) layer.weight.push_back(mat_from_json(wj));
        in_grid = layer.out_grid;
        j_in = layer.k_out;
        hidden.push_back(std::move(layer));
    }
    FunctionalOutputLayer out;
    out.in_grid = in_grid;
    out.j_in = j_in;
    out.bias = j.at("output").at("bias").get<double>();
    out.act = parse_activation(j.at("output").at("activation").get<std::string>());
    for (const json& wj : j.at("output").at("weight")) out.weight.push_back(vec_from_json(wj));
    return std::make_shared<FdnnModel>(inputs, std::move(hidden), std::move(out));
}

json fbnn_to_json(const FbnnModel& m) {
    json out;
    out["inputs"] = m.input_count();
    out["input_grid"] = grid_to_json(*m.input_grid());
    json hidden = json::array();
    for (const FbnnLayer& layer : m.hidden()) {
        json lj;
        lj["out_grid"] = grid_to_json(*layer.out_grid);
        lj["neurons"] = layer.k_out;
        lj["activation"] = activation_name(layer.act);
        lj["bias_basis"] = basis_to_json(layer.bias_basis);
        lj["out_basis"] = basis_to_json(layer.out_basis);
        lj["in_basis"] = basis_to_json(layer.in_basis);
        lj["bias_coef"] = mat_to_json(layer.bias_coef);
        json wc = json::array();
        for (const Mat& w : layer.weight_coef) wc.push_back(mat_to_json(w));
        lj["weight_coef"] = std::move(wc);
        hidden.push_back(std::move(lj));
    }
    out["hidden"] = std::move(hidden);
    json oj;
    oj["bias"] = m.output().bias;
    oj["activation"] = activation_name(m.output().act);
    oj["in_basis"] = basis_to_json(m.output().in_basis);
    oj["weight_coef"] = mat_to_json(m.output().weight_coef);
    out["output"] = std::move(oj);
    return out;
}

std::shared_ptr<FbnnModel> fbnn_from_json(const json& j) {
    const int inputs = j.at("inputs").get<int>();
    GridPtr grid = grid_from_json(j.at("input_grid"));
    std::vector<FbnnLayer> hidden;
    GridPtr in_grid = grid;
    int j_in = inputs;
    for (const json& lj : j.at("hidden")) {
        FbnnLayer layer(in_grid, grid_from_json(lj.at("out_grid")), j_in,
                        lj.at("neurons").get<int>(), basis_from_json(lj.at("bias_basis")),
                        basis_from_json(lj.at("out_basis")), basis_from_json(lj.at("in_basis")),
                        parse_activation(lj.at("activation").get<std::string>()));
        layer.bias_coef = mat_from_json(lj.at("bias_coef"));
        layer.weight_coef.clear();
        for (const json& wj : lj.at("weight_coef")) layer.weight_coef.push_back(mat_from_json(wj));
        in_grid = layer.out_grid;
        j_in = layer.k_out;
        hidden.push_back(std::move(layer));
    }
    const json& oj = j.at("output");
    FbnnOutputLayer out(in_grid, j_in, basis_from_json(oj.at("in_basis")),
                        parse_activation(oj.at("activation").get<std::string>()));
    out.bias = oj.at("bias").get<double>();
    out.weight_coef = mat_from_json(oj.at("weight_coef"));
    return std::make_shared<FbnnModel>(inputs, std::move(hidden), std::move(out));
}

json fnn_to_json(const FnnModel& m) {
    json out;
    out["inputs"] = m.inputs();
    out["grid"] = grid_to_json(*m.grid());
    out["neurons"] = m.neurons();
    json fw = json::array();
    for (const Vec& w : m.func_weight()) fw.push_back(vec_to_json(w));
    out["func_weight"] = std::move(fw);
    out["func_bias"] = vec_to_json(m.func_bias());
    out["func_activation"] = activation_name(m.func_act());
    out["dense"] = dense_to_json(m.dense());
    return out;
}

json mlp_to_json(const MlpModel& m) {
    json out;
    out["grid"] = grid_to_json(*m.grid());
    out["inputs"] = m.inputs();
    out["dense"] = dense_to_json(m.dense());
    return out;
}

json flm_to_json(const FlmModel& m) {
    json out;
    out["grid"] = grid_to_json(*m.grid());
    out["basis"] = basis_to_json(m.basis());
    out["alpha"] = m.alpha();
    out["beta_coef"] = mat_to_json(m.beta_coef());
    out["ridge"] = m.ridge();
    out["link"] = m.link() == LinkKind::Logistic ? "logistic" : "identity";
    return out;
}

std::shared_ptr<FlmModel> flm_from_json(const json& j) {
    return std::make_shared<FlmModel>(
        grid_from_json(j.at("grid")), basis_from_json(j.at("basis")), j.at("alpha").get<double>(),
        mat_from_json(j.at("beta_coef")), j.at("ridge").get<double>(),
        j.at("link").get<std::string>() == "logistic" ? LinkKind::Logistic : LinkKind::Identity);
}

json standardizer_to_json(const Standardizer& s) {
    json out;
    json mean = json::array();
    json sd = json::array();
    for (const Vec& v : s.mean) mean.push_back(vec_to_json(v));
    for (const Vec& v : s.sd) sd.push_back(vec_to_json(v));
    out["mean"] = std::move(mean);
    out["sd"] = std::move(sd);
    return out;
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    for (const json& v : j.at("mean")) s.mean.push_back(vec_from_json(v));
    for (const json& v : j.at("sd")) s.sd.push_back(vec_from_json(v));
    return s;
}

}  // namespace

std::string SavedModel::kind() const {
    if (flm) return "flm";
    if (net) return net->kind();
    return "empty";
}

GridPtr SavedModel::grid() const {
    if (flm) return flm->grid();
    if (auto* m = dynamic_cast<const FdnnModel*>(net.get())) return m->input_grid();
    if (auto* m = dynamic_cast<const FbnnModel*>(net.get())) return m->input_grid();
    if (auto* m = dynamic_cast<const FnnModel*>(net.get())) return m->grid();
    if (auto* m = dynamic_cast<const MlpModel*>(net.get())) return m->grid();
    throw std::logic_error("SavedModel::grid: empty model");
}

Vec SavedModel::predict(const CurveSet& data, const std::vector<int>& idx) const {
    const CurveSet* input = &data;
    CurveSet transformed;
    if (has_standardizer) {
        transformed = standardizer.apply(data);
        input = &transformed;
    }
    if (flm) return flm->predict(*input, idx);
    if (!net) throw std::logic_error("SavedModel::predict: empty model");
    if (net->kind() != "fbnn") {
        require_same_grid(*grid(), *data.grid, "predict");
    }
    return net->predict(*input, idx);
}

std::string model_to_json_text(const SavedModel& model) {
    json out;
    out["format_version"] = kFormatVersion;
    out["model_kind"] = model.kind();
    out["response_kind"] = response_kind_name(model.response);
    if (model.has_standardizer) out["standardizer"] = standardizer_to_json(model.standardizer);
    if (model.flm) {
        out["model"] = flm_to_json(*model.flm);
    } else if (auto* m = dynamic_cast<const FdnnModel*>(model.net.get())) {
        out["model"] = fdnn_to_json(*m);
    } else if (auto* m = dynamic_cast<const FbnnModel*>(model.net.get())) {
        out["model"] = fbnn_to_json(*m);
    } else if (auto* m = dynamic_cast<const FnnModel*>(model.net.get())) {
        out["model"] = fnn_to_json(*m);
    } else if (auto* m = dynamic_cast<const MlpModel*>(model.net.get())) {
        out["model"] = mlp_to_json(*m);
    } else {
        throw std::logic_error("model_to_json_text: empty model");
    }
    return out.dump(2) + "\n";
}

SavedModel model_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("model file is not valid JSON: ") + e.what(), 1, 1);
    }
    if (j.at("format_version").get<int>() != kFormatVersion) {
        throw parse_error("unsupported model format version", 1, 1);
    }
    SavedModel model;
    model.response = parse_response_kind(j.at("response_kind").get<std::string>());
    if (j.contains("standardizer")) {
        model.has_standardizer = true;
        model.standardizer = standardizer_from_json(j.at("standardizer"));
    }
    const std::string kind = j.at("model_kind").get<std::string>();
    const json& mj = j.at("model");
    if (kind == "flm") {
        model.flm = flm_from_json(mj);
    } else if (kind == "fdnn") {
        model.net = fdnn_from_json(mj);
    } else if (kind == "fbnn") {
        model.net = fbnn_from_json(mj);
    } else if (kind == "fnn") {
        const int inputs = mj.at("inputs").get<int>();
        GridPtr grid = grid_from_json(mj.at("grid"));
        const int neurons = mj.at("neurons").get<int>();
        std::vector<Vec> fw;
        for (const json& wj : mj.at("func_weight")) fw.push_back(vec_from_json(wj));
        model.net = std::make_shared<FnnModel>(
            grid, inputs, neurons, std::move(fw), vec_from_json(mj.at("func_bias")),
            parse_activation(mj.at("func_activation").get<std::string>()),
            dense_from_json(mj.at("dense")));
    } else if (kind == "mlp") {
        model.net = std::make_shared<MlpModel>(grid_from_json(mj.at("grid")),
                                               mj.at("inputs").get<int>(),
                                               dense_from_json(mj.at("dense")));
    } else {
        throw parse_error("unknown model kind '" + kind + "'", 1, 1);
    }
    return model;
}

void save_model(const std::string& path, const SavedModel& model) {
    write_text_file(path, model_to_json_text(model));
}

SavedModel load_model(const std::string& path) {
    return model_from_json_text(read_text_file(path));
}

std::string fit_report_to_json_text(const FitReport& report, const std::string& model_path) {
    json out;
    out["model_path"] = model_path;
    out["epochs_run"] = report.epochs_run;
    out["best_epoch"] = report.best_epoch;
    out["train_loss"] = report.train_loss;
    out["val_loss"] = report.val_loss;
    auto metrics_json = [](const Metrics& m) {
        json j;
        if (std::isfinite(m.rmse)) j["rmse"] = m.rmse;
        if (std::isfinite(m.classification_error)) {
            j["classification_error"] = m.classification_error;
        }
        if (std::isfinite(m.mean_log_likelihood)) {
            j["mean_log_likelihood"] = m.mean_log_likelihood;
        }
        return j;
    };
    out["train_metrics"] = metrics_json(report.train_metrics);
    out["test_metrics"] = metrics_json(report.test_metrics);
    return out.dump(2) + "\n";
}

}  // namespace funcnn
