#include "funcnn/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "funcnn/errors.hpp"
#include "funcnn/rng.hpp"

namespace funcnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec eval_on(const Grid& g, double freq) {
    // 5 * sin(freq * pi * t) on the grid
    Vec v(g.size());
    for (int i = 0; i < g.size(); ++i) v(i) = 5.0 * std::sin(freq * kPi * g.points()(i));
    return v;
}

double weighted_dot(const Grid& g, const Vec& a, const Vec& b) {
    return (a.array() * b.array() * g.weights().array()).sum();
}

// iint f(x(t), x(s)) dt ds with f(a, b) = (a*b)^2 or sin(a*b).
double double_integral(const Grid& g, const Vec& x, bool use_sin) {
    const Vec& w = g.weights();
    if (!use_sin) {
        // (x(t) x(s))^2 factorizes: (int x^2)^2
        const double q = weighted_dot(g, x, x);
        return q * q;
    }
    double outer = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        double inner = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            inner += w(j) * std::sin(x(i) * x(j));
        }
        outer += w(i) * inner;
    }
    return outer;
}

// One sample's eta given its curves as rows of a view.
double eta_for_sample(const Scenario& sc, const Grid& g, const std::vector<Vec>& x) {
    const bool binary = sc.response == ResponseKind::Binary;
    const Vec beta2 = eval_on(g, 2.0);  // 5 sin(2 pi t)
    const Vec beta3 = eval_on(g, 3.0);  // 5 sin(3 pi t)
    const Vec beta1p = eval_on(g, 1.0); // 5 sin(pi t)

    switch (sc.kind) {
        case ScenarioKind::Linear: {
            double s = 0.0;
            for (const Vec& xr : x) s += weighted_dot(g, beta2, xr);
            return s;
        }
        case ScenarioKind::CAM: {
            double s = 0.0;
            for (const Vec& xr : x) {
                if (binary) {
                    s += (xr.array().sin() * g.weights().array()).sum();
                } else {
                    s += weighted_dot(g, xr, xr);
                }
            }
            return s;
        }
        case ScenarioKind::SingleIndex: {
            double a = 0.0;
            for (const Vec& xr : x) a += weighted_dot(g, beta2, xr);
            return binary ? std::sin(a) : a * a;
        }
        case ScenarioKind::MultipleIndex: {
            double a = 0.0, b = 0.0;
            for (const Vec& xr : x) {
                a += weighted_dot(g, beta2, xr);
                b += weighted_dot(g, beta3, xr);
            }
            return binary ? std::sin(std::sin(a) + b) : a * a + b * b;
        }
        case ScenarioKind::Quadratic: {
            // beta(t, s) = beta1(t) beta2(s) with beta1 = 5 sin(3 pi .),
            // beta2 = 5 sin(pi .); the separable kernel factorizes the
            // double integral into a product of two single integrals. The
            // linear term reuses beta1, the only parameter function the
            // scenario defines.
            double s = 0.0;
            for (const Vec& xr : x) {
                const double u = weighted_dot(g, beta3, xr);
                const double v = weighted_dot(g, beta1p, xr);
                s += u + u * v;
            }
            return s;
        }
        case ScenarioKind::ComplexQuadratic: {
            double s = 0.0;
            for (const Vec& xr : x) {
                double single;
                if (binary) {
                    single = (xr.array().sin() * g.weights().array()).sum();
                } else {
                    single = weighted_dot(g, xr, xr);
                }
                s += single + double_integral(g, xr, binary);
            }
            return s;
        }
    }
    throw std::logic_error("unreachable scenario kind");
}

}  // namespace

const char* scenario_kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Linear: return "linear";
        case ScenarioKind::CAM: return "cam";
        case ScenarioKind::SingleIndex: return "single_index";
        case ScenarioKind::MultipleIndex: return "multiple_index";
        case ScenarioKind::Quadratic: return "quadratic";
        case ScenarioKind::ComplexQuadratic: return "complex_quadratic";
    }
    return "?";
}

std::vector<std::string> scenario_kind_names() {
    return {"linear", "cam", "single_index", "multiple_index", "quadratic", "complex_quadratic"};
}

ScenarioKind parse_scenario_kind(const std::string& name) {
    if (name == "linear") return ScenarioKind::Linear;
    if (name == "cam") return ScenarioKind::CAM;
    if (name == "single_index") return ScenarioKind::SingleIndex;
    if (name == "multiple_index") return ScenarioKind::MultipleIndex;
    if (name == "quadratic") return ScenarioKind::Quadratic;
    if (name == "complex_quadratic") return ScenarioKind::ComplexQuadratic;
    std::string valid;
    for (const auto& s : scenario_kind_names()) valid += (valid.empty() ? "" : ", ") + s;
    throw config_error("unknown scenario '" + name + "' (valid: " + valid + ")");
}

const char* response_kind_name(ResponseKind k) {
    return k == ResponseKind::Continuous ? "continuous" : "binary";
}

ResponseKind parse_response_kind(const std::string& name) {
    if (name == "continuous") return ResponseKind::Continuous;
    if (name == "binary") return ResponseKind::Binary;
    throw config_error("unknown response kind '" + name + "' (valid: continuous, binary)");
}

std::string Scenario::name() const {
    return std::string(scenario_kind_name(kind)) + "/" + response_kind_name(response);
}

GridFunction CurveSet::curve(int i, int pred) const {
    if (pred < 0 || pred >= r() || i < 0 || i >= n()) {
        throw std::invalid_argument("CurveSet::curve: index out of range");
    }
    return GridFunction(grid, x[pred].row(i).transpose());
}

void CurveSet::validate() const {
    if (!grid) throw std::invalid_argument("CurveSet: missing grid");
    if (x.empty()) throw std::invalid_argument("CurveSet: needs at least one predictor");
    for (const Mat& xr : x) {
        if (xr.rows() != y.size() || xr.cols() != grid->size()) {
            throw std::invalid_argument("CurveSet: predictor dimensions inconsistent");
        }
    }
    if (y.size() < 1) throw std::invalid_argument("CurveSet: needs at least one sample");
    if (response == ResponseKind::Binary) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y(i) != 0.0 && y(i) != 1.0) {
                throw std::invalid_argument("CurveSet: binary responses must be 0 or 1");
            }
        }
    }
}

double true_response(const Scenario& sc, const std::vector<GridFunction>& x) {
    if (x.empty()) {
        throw std::invalid_argument("true_response: needs at least one predictor curve");
    }
    const Grid& g = *x[0].grid;
    std::vector<Vec> vals;
    vals.reserve(x.size());
    for (const auto& xr : x) {
        require_same_grid(g, *xr.grid, "true_response");
        vals.push_back(xr.values);
    }
    return eta_for_sample(sc, g, vals);
}

Vec true_response_batch(const Scenario& sc, const Grid& grid, const std::vector<Mat>& curves) {
    if (curves.empty()) {
        throw std::invalid_argument("true_response_batch: needs predictors");
    }
    const int n = static_cast<int>(curves[0].rows());
    Vec eta(n);
    std::vector<Vec> sample(curves.size(), Vec());
    for (int i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < curves.size(); ++r) sample[r] = curves[r].row(i).transpose();
        eta(i) = eta_for_sample(sc, grid, sample);
    }
    return eta;
}

CurveSet gen_dataset(const Scenario& sc, const GridPtr& grid, const std::vector<Mat>& curves,
                     std::uint64_t seed) {
    if (curves.empty() || curves[0].rows() == 0) {
        throw std::invalid_argument("gen_dataset: curves must be nonempty");
    }
    const Vec eta = true_response_batch(sc, *grid, curves);
    const int n = static_cast<int>(eta.size());

    CurveSet data;
    data.grid = grid;
    data.x = curves;
    data.response = sc.response;
    data.y.resize(n);

    if (sc.response == ResponseKind::Continuous) {
        Rng rng = Rng(seed).split("noise");
        for (int i = 0; i < n; ++i) data.y(i) = eta(i) + sc.noise_sd * rng.normal();
    } else {
        Rng rng = Rng(seed).split("labels");
        for (int i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-eta(i)));
            data.y(i) = rng.bernoulli(p);
        }
    }
    data.validate();
    return data;
}

}  // namespace funcnn
