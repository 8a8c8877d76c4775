#include "funcnn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "funcnn/errors.hpp"

namespace funcnn {

std::string format_17g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw io_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
    if (field.empty()) throw parse_error("empty numeric field", row, col);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size()) {
        throw parse_error("invalid number '" + field + "'", row, col);
    }
    return v;
}

struct Block {
    std::size_t grid_row = 0;
    Vec grid;
    Mat values;  // N x m
    Vec responses;
};

Block parse_block(const std::vector<std::string>& lines, std::size_t& line_no,
                  const std::vector<std::size_t>& row_numbers) {
    Block block;
    if (line_no >= lines.size()) {
        throw parse_error("missing grid header row", row_numbers.empty() ? 1 : row_numbers.back(), 1);
    }
    const std::size_t grid_row = row_numbers[line_no];
    std::vector<std::string> header = split_fields(lines[line_no]);
    if (header.empty() || header[0] != "grid") {
        throw parse_error("expected 'grid' header row", grid_row, 1);
    }
    if (header.size() < 3) {
        throw parse_error("grid needs at least 2 time values", grid_row, 2);
    }
    const std::size_t m = header.size() - 1;
    block.grid_row = grid_row;
    block.grid.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        block.grid(i) = parse_number(header[i + 1], grid_row, i + 2);
        if (i > 0 && !(block.grid(i - 1) < block.grid(i))) {
            throw parse_error("grid values must be strictly increasing", grid_row, i + 2);
        }
    }
    ++line_no;

    std::vector<std::vector<double>> rows;
    while (line_no < lines.size()) {
        const std::string& line = lines[line_no];
        if (line.rfind("predictor:", 0) == 0) break;
        const std::size_t row_no = row_numbers[line_no];
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != m + 1) {
            throw parse_error("expected " + std::to_string(m + 1) + " fields, found " +
                                  std::to_string(fields.size()),
                              row_no, fields.size() + 1);
        }
        std::vector<double> row(m + 1);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            row[i] = parse_number(fields[i], row_no, i + 1);
        }
        rows.push_back(std::move(row));
        ++line_no;
    }
    if (rows.empty()) {
        throw parse_error("block has no data rows", grid_row, 1);
    }
    block.values.resize(rows.size(), m);
    block.responses.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        block.responses(i) = rows[i][0];
        for (std::size_t j = 0; j < m; ++j) block.values(i, j) = rows[i][j + 1];
    }
    return block;
}

GridPtr grid_from_points(Vec points) {
    const double lo = points(0);
    const double hi = points(points.size() - 1);
    if (std::abs(lo) > 1e-12 || std::abs(hi - 1.0) > 1e-12) {
        // affine map onto [0, 1]
        points = ((points.array() - lo) / (hi - lo)).matrix();
        points(0) = 0.0;
        points(points.size() - 1) = 1.0;
    }
    return std::make_shared<const Grid>(Grid::trapezoid(std::move(points)));
}

}  // namespace

std::string dataset_to_csv(const CurveSet& data) {
    data.validate();
    std::string out;
    const bool multi = data.r() > 1;
    for (int r = 0; r < data.r(); ++r) {
        if (multi) {
            out += "predictor:" + std::to_string(r + 1) + "\n";
        }
        out += "grid";
        for (int j = 0; j < data.grid->size(); ++j) {
            out += ',';
            out += format_17g(data.grid->points()(j));
        }
        out += '\n';
        for (int i = 0; i < data.n(); ++i) {
            out += format_17g(data.y(i));
            for (int j = 0; j < data.grid->size(); ++j) {
                out += ',';
                out += format_17g(data.x[r](i, j));
            }
            out += '\n';
        }
    }
    return out;
}

CurveSet dataset_from_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::vector<std::size_t> row_numbers;
    {
        std::size_t start = 0;
        std::size_t row = 1;
        while (start < text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string::npos) nl = text.size();
            std::string line = text.substr(start, nl - start);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) {
                lines.push_back(std::move(line));
                row_numbers.push_back(row);
            }
            ++row;
            start = nl + 1;
        }
    }
    if (lines.empty()) throw parse_error("empty dataset file", 1, 1);

    CurveSet data;
    std::size_t line_no = 0;
    int expected_predictor = 1;
    const bool multi = lines[0].rfind("predictor:", 0) == 0;
    Vec first_grid;
    for (;;) {
        if (multi) {
            if (line_no >= lines.size()) break;
            const std::string& marker = lines[line_no];
            const std::size_t row_no = row_numbers[line_no];
            if (marker.rfind("predictor:", 0) != 0) {
                throw parse_error("expected 'predictor:<r>' marker row", row_no, 1);
            }
            const std::string num = marker.substr(10);
            if (num != std::to_string(expected_predictor)) {
                throw parse_error("expected marker 'predictor:" +
                                      std::to_string(expected_predictor) + "', found '" + marker +
                                      "'",
                                  row_no, 1);
            }
            ++line_no;
        }
        Block block = parse_block(lines, line_no, row_numbers);
        if (data.x.empty()) {
            first_grid = block.grid;
            data.grid = grid_from_points(block.grid);
            data.y = block.responses;
        } else {
            if (block.grid.size() != first_grid.size() ||
                (block.grid - first_grid).cwiseAbs().maxCoeff() > 1e-12) {
                throw parse_error("predictor blocks must share the grid", block.grid_row, 2);
            }
            if (block.responses.size() != data.y.size() ||
                (block.responses - data.y).cwiseAbs().maxCoeff() != 0.0) {
                throw parse_error("responses must agree across predictor blocks", block.grid_row, 1);
            }
        }
        data.x.push_back(std::move(block.values));
        ++expected_predictor;
        if (line_no >= lines.size()) break;
        if (!multi) {
            throw parse_error("unexpected content after single-predictor block",
                              row_numbers[line_no], 1);
        }
    }

    bool binary = true;
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        if (data.y(i) != 0.0 && data.y(i) != 1.0) {
            binary = false;
            break;
        }
    }
    data.response = binary ? ResponseKind::Binary : ResponseKind::Continuous;
    data.validate();
    return data;
}

void write_dataset_csv(const std::string& path, const CurveSet& data) {
    write_text_file(path, dataset_to_csv(data));
}

CurveSet read_dataset_csv(const std::string& path) { return dataset_from_csv(read_text_file(path)); }

std::string predictions_to_csv(const Vec& yhat, ResponseKind kind) {
    std::string out;
    if (kind == ResponseKind::Binary) {
        out = "probability,label\n";
        for (Eigen::Index i = 0; i < yhat.size(); ++i) {
            out += format_17g(yhat(i));
            out += yhat(i) >= 0.5 ? ",1\n" : ",0\n";
        }
    } else {
        out = "prediction\n";
        for (Eigen::Index i = 0; i < yhat.size(); ++i) {
            out += format_17g(yhat(i));
            out += '\n';
        }
    }
    return out;
}

namespace {

std::string metric_field(double v) { return std::isfinite(v) ? format_17g(v) : std::string(); }

}  // namespace

std::string benchmark_cells_csv(const BenchmarkReport& report) {
    std::string out =
        "scenario,model,rep,seed,status,rmse,classification_error,mean_log_likelihood,error\n";
    for (const BenchmarkCell& c : report.cells) {
        std::string error = c.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out += c.scenario + ',' + c.model + ',' + std::to_string(c.rep) + ',' +
               std::to_string(c.seed) + ',' + (c.ok ? "ok" : "failed") + ',' +
               metric_field(c.metrics.rmse) + ',' + metric_field(c.metrics.classification_error) +
               ',' + metric_field(c.metrics.mean_log_likelihood) + ',' + error + '\n';
    }
    return out;
}

std::string benchmark_aggregate_csv(const BenchmarkReport& report) {
    std::string out =
        "scenario,model,reps_ok,rmse_mean,rmse_se,classification_error_mean,"
        "classification_error_se,mean_log_likelihood_mean,mean_log_likelihood_se\n";
    for (const BenchmarkAggregate& a : report.aggregates) {
        out += a.scenario + ',' + a.model + ',' + std::to_string(a.reps_ok) + ',' +
               metric_field(a.mean.rmse) + ',' + metric_field(a.std_error.rmse) + ',' +
               metric_field(a.mean.classification_error) + ',' +
               metric_field(a.std_error.classification_error) + ',' +
               metric_field(a.mean.mean_log_likelihood) + ',' +
               metric_field(a.std_error.mean_log_likelihood) + '\n';
    }
    return out;
}

namespace {

std::string table_for_metric(const BenchmarkReport& report, double Metrics::*field,
                             const std::string& title) {
    std::vector<std::string> scenarios;
    std::vector<std::string> models;
    std::map<std::pair<std::string, std::string>, std::string> cells;
    for (const BenchmarkAggregate& a : report.aggregates) {
        if (!std::isfinite(a.mean.*field)) continue;
        if (std::find(scenarios.begin(), scenarios.end(), a.scenario) == scenarios.end()) {
            scenarios.push_back(a.scenario);
        }
        if (std::find(models.begin(), models.end(), a.model) == models.end()) {
            models.push_back(a.model);
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", a.mean.*field, a.std_error.*field);
        cells[{a.scenario, a.model}] = buf;
    }
    if (scenarios.empty()) return "";

    std::size_t name_w = std::string("Mapping").size();
    for (const auto& s : scenarios) name_w = std::max(name_w, s.size());
    std::size_t cell_w = 14;
    for (const auto& m : models) cell_w = std::max(cell_w, m.size() + 2);

    std::string out = title + "\n";
    std::string head_row = "Mapping" + std::string(name_w - 7, ' ');
    for (const auto& m : models) {
        head_row += "  " + m + std::string(cell_w - m.size() - 2, ' ');
    }
    out += head_row + '\n';
    out += std::string(head_row.size(), '-') + '\n';
    for (const auto& s : scenarios) {
        std::string row = s + std::string(name_w - s.size(), ' ');
        for (const auto& m : models) {
            auto it = cells.find({s, m});
            const std::string cell = it == cells.end() ? "-" : it->second;
            row += "  " + cell + std::string(cell.size() + 2 > cell_w ? 0 : cell_w - cell.size() - 2, ' ');
        }
        out += row + '\n';
    }
    return out;
}

}  // namespace

std::string benchmark_text_table(const BenchmarkReport& report) {
    std::string out;
    const std::string rmse =
        table_for_metric(report, &Metrics::rmse, "RMSE, mean (standard error)");
    const std::string cls = table_for_metric(report, &Metrics::classification_error,
                                             "Classification error, mean (standard error)");
    const std::string nll = table_for_metric(report, &Metrics::mean_log_likelihood,
                                             "Mean negative log-likelihood, mean (standard error)");
    for (const std::string* t : {&rmse, &cls, &nll}) {
        if (!t->empty()) {
            if (!out.empty()) out += '\n';
            out += *t;
        }
    }
    return out;
}

}  // namespace funcnn
