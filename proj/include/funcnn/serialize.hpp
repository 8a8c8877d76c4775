#pragma once

#include <memory>
#include <string>

#include "funcnn/flm.hpp"
#include "funcnn/trainable.hpp"
#include "funcnn/training.hpp"

namespace funcnn {

// A fitted model plus the metadata needed to predict with it: the response
// kind it was trained for and, when input standardization was requested, the
// training-set statistics.
//
// Models are stored as versioned, self-describing JSON; doubles are written
// in shortest round-trip form so save/load is bit-exact.
struct SavedModel {
    ResponseKind response = ResponseKind::Continuous;
    bool has_standardizer = false;
    Standardizer standardizer;
    std::shared_ptr<FlmModel> flm;     // set for kind "flm"
    std::shared_ptr<Trainable> net;    // set for fdnn / fbnn / fnn / mlp

    std::string kind() const;
    GridPtr grid() const;

    // Applies the stored standardizer if any, then dispatches. Grid-bound
    // models require the data grid to match the model grid; the basis-
    // expanded network projects off-grid curves instead.
    Vec predict(const CurveSet& data, const std::vector<int>& idx) const;
};

void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

std::string model_to_json_text(const SavedModel& model);
SavedModel model_from_json_text(const std::string& text);

// Machine-readable fit report (loss curves, epochs, metrics). Wall time is
// deliberately excluded so output is identical across reruns.
std::string fit_report_to_json_text(const FitReport& report, const std::string& model_path);

}  // namespace funcnn
