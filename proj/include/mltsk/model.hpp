#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mltsk/antecedent.hpp"
#include "mltsk/dataset.hpp"
#include "mltsk/solver.hpp"

namespace mltsk {

struct TrainingReport {
    int fcm_iterations = 0;
    double fcm_objective = 0.0;
    double lipschitz = 0.0;
    bool lipschitz_converged = true;
    double initial_objective = 0.0;
    std::vector<double> objective_trace;
    std::vector<double> df_trace;
    int iterations = 0;
    int best_iteration = 0;
    bool converged = false;
    // Wall-clock timings; reported by the CLI but never persisted, so model
    // files stay byte-identical across runs.
    double fcm_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// A trained multi-label TSK fuzzy system. Immutable after training and
/// safe to share between threads for prediction.
struct MlTskModel {
    Standardizer standardizer;
    AntecedentParams antecedents;
    Matrix consequents;  // K(D+1)×L, rows laid out like fuzzy_map's blocks
    double tau = 0.5;
    std::vector<std::string> feature_names;
    std::vector<std::string> label_names;
    TrainConfig config;
    TrainingReport report;

    Eigen::Index feature_count() const noexcept { return antecedents.feature_count(); }
    Eigen::Index rule_count() const noexcept { return antecedents.rule_count(); }
    Eigen::Index label_count() const noexcept { return consequents.cols(); }
    void validate() const;
};

/// Standardize, cluster, map through the rules, build the label
/// correlation penalty and fit the consequents. Everything is fitted on
/// `data` alone.
MlTskModel train(const Dataset& data, const TrainConfig& config);

/// Real-valued label scores (L×N') for raw, unstandardized instances.
Matrix predict_scores(const MlTskModel& model, const Matrix& features);

/// The same scores computed rule by rule: each rule's affine output for
/// every label, weighted by its normalized firing strength and summed.
Matrix predict_scores_rule_sum(const MlTskModel& model, const Matrix& features);

/// 1 where score > tau (strictly), else 0.
Matrix predict_labels(const Matrix& scores, double tau);

inline constexpr int kModelFormatVersion = 1;

void save_model(const MlTskModel& model, const std::filesystem::path& path);
MlTskModel load_model(const std::filesystem::path& path);

std::string model_to_string(const MlTskModel& model);
MlTskModel model_from_string(const std::string& text);

}  // namespace mltsk
