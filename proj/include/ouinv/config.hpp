#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ouinv/model.hpp"

namespace ouinv {

enum class Experiment {
    Verify,
    KernelEval,
    SemigroupCheck,
    TubeMeasure,
    WeakType,
    Enhanced,
    Sharpness,
    CoveringSim,
};

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& s);

struct RunConfig {
    std::string presetName = "salogni1d";
    bool inlineModel = false;
    Mat Q, B;
    Experiment experiment = Experiment::Verify;
    std::uint64_t seed = 1;
    double alphaMin = 1e-4;
    double alphaMax = 1e-1;
    double tMax = 50.0;
    int resolution = 0; // 0 = per-dimension default
    double A = 0.0;     // 0 = per-experiment default (covering 10, sharpness 3)
    int m = 0;
    std::string outputPath = "ouinv_report.csv";

    Model make_model() const;
    std::string model_label() const;
};

/// "a,b;c,d" -> square matrix; MalformedMatrix on ragged/non-numeric input.
Mat parse_matrix(const std::string& text);

/// Flags (["--key", "value"] pairs) layered over optional `key = value` file
/// contents; flags win. Unknown keys are rejected.
RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& fileContents = std::nullopt);

} // namespace ouinv
