#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mltsk/dataset.hpp"
#include "mltsk/evaluation.hpp"
#include "mltsk/model.hpp"

namespace mltsk {

/// Where a dataset comes from and how its labels are identified.
struct DataSource {
    std::filesystem::path path;
    std::string format = "csv";            // "csv" or "arff"
    int label_count = 0;                    // trailing label columns/attributes
    std::vector<std::string> label_names;   // ARFF: explicit label attributes
};

Dataset load_dataset(const DataSource& source);

/// Hyperparameter grid, iterated lexicographically over
/// (rules, h, alpha, beta, gamma) with rules varying slowest.
struct Grid {
    std::vector<int> rules{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> h{0.1, 1, 10, 100};
    std::vector<double> alpha{0.01, 0.1, 1, 10, 100};
    std::vector<double> beta{0.01, 0.1, 1, 10, 100};
    std::vector<double> gamma{0.1, 1, 10, 100};

    std::size_t size() const;
    TrainConfig cell(std::size_t index, const TrainConfig& base) const;
    void validate() const;
};

struct ExperimentSpec {
    DataSource data;
    TrainConfig base;
    Grid grid;
    int fold_count = 5;
    std::uint64_t seed = 0;  // fold plan seed; training seeds come from `base`
    Metric select_metric = Metric::ap;
    std::filesystem::path out_dir = "out";
    int workers = 1;

    void validate() const;
};

struct FoldOutcome {
    int fold = 0;
    std::size_t train_size = 0, test_size = 0;
    MetricsReport metrics;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
    std::vector<double> df_trace;
};

struct CvOutcome {
    std::vector<FoldOutcome> folds;
    MetricsReport mean, sd;  // sd uses the n-1 denominator
};

/// Mean and sample standard deviation of fold metrics.
void aggregate(const std::vector<FoldOutcome>& folds, MetricsReport& mean, MetricsReport& sd);

using ModelSink = std::function<void(int fold, const MlTskModel& model)>;

/// k-fold cross-validation: every fitted quantity comes from the training
/// split of each fold. Folds run on up to `workers` threads; results are
/// stored by fold index, so output does not depend on scheduling.
CvOutcome cross_validate(const Dataset& data, const TrainConfig& config, const FoldPlan& plan,
                         int workers = 1, const ModelSink& sink = {});

struct GridCell {
    std::size_t index = 0;
    TrainConfig config;
    MetricsReport mean, sd;
};

/// Index of the best cell: max for AP, min otherwise, first wins ties.
std::size_t select_best(const std::vector<GridCell>& cells, Metric metric);

struct AblationOutcome {
    CvOutcome without_correlation;  // alpha = 0
    CvOutcome with_correlation;     // alpha = config.alpha
};

AblationOutcome ablate_correlation(const Dataset& data, const TrainConfig& config,
                                   const FoldPlan& plan, int workers = 1);

/// Pearson correlations between consequent columns (discriminative
/// features per label) and between label rows, both L×L.
struct CorrelationReport {
    Matrix consequent;
    Matrix label;
};

CorrelationReport correlation_report(const MlTskModel& model, const Dataset& data);

/// Friedman / Bonferroni-Dunn summary of a per-dataset, per-method table.
struct StatsReport {
    RankTable table;
    double chi_square = 0.0;
    double f_statistic = 0.0;
    bool degenerate = false;
    double critical_difference = 0.0;
    std::vector<bool> within_cd_of_best;
};

StatsReport rank_statistics(const RankTable& table, double q_alpha);

/// Reads "dataset,method1,method2,..." CSV (header row required).
RankTable read_rank_table(const std::filesystem::path& path, bool higher_better);

}  // namespace mltsk
