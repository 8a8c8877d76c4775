#pragma once

#include <string>

#include "funcnn/benchmark.hpp"
#include "funcnn/scenario.hpp"

namespace funcnn {

// Dataset CSV layout. Single predictor:
//   grid,t_1,...,t_m
//   y_1,x_1(t_1),...,x_1(t_m)
//   ...
// With R > 1 predictors the grid header block repeats once per predictor,
// each preceded by a marker row "predictor:<r>" (1-based); the response
// column must agree across blocks. Every data row carries exactly m + 1
// fields. Numbers are written with 17 significant digits so parsing them
// back is exact.
//
// Reading normalizes a grid that is not already on [0, 1] by an affine map;
// quadrature weights are rebuilt with the trapezoidal rule.
void write_dataset_csv(const std::string& path, const CurveSet& data);
CurveSet read_dataset_csv(const std::string& path);

// In-memory variants used by the readers/writers and by tests.
std::string dataset_to_csv(const CurveSet& data);
CurveSet dataset_from_csv(const std::string& text);

// One row per input row: `prediction` for continuous models,
// `probability,label` for binary ones.
std::string predictions_to_csv(const Vec& yhat, ResponseKind kind);

// Benchmark outputs: one row per cell, an aggregated mean/std-error table,
// and an aligned text table (rows scenarios, columns models).
std::string benchmark_cells_csv(const BenchmarkReport& report);
std::string benchmark_aggregate_csv(const BenchmarkReport& report);
std::string benchmark_text_table(const BenchmarkReport& report);

std::string format_17g(double v);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace funcnn
