#pragma once

#include <string>
#include <vector>

#include "mltsk/dataset.hpp"

namespace mltsk {

/// Ranks of one score vector: rank 1 is the highest score, ties go to the
/// lower label index, so the result is always a permutation of 1..L.
std::vector<int> rank_labels(const Eigen::Ref<const Vector>& scores);

// Ranking metrics average over instances with at least one relevant label
// (ranking loss additionally needs at least one irrelevant label); the other
// instances are skipped. `skipped` reports how many.
double average_precision(const Matrix& scores, const Matrix& truth, int* skipped = nullptr);
double one_error(const Matrix& scores, const Matrix& truth, int* skipped = nullptr);
double ranking_loss(const Matrix& scores, const Matrix& truth, int* skipped = nullptr);
/// Depth of the deepest relevant label, minus one, divided by L.
double coverage(const Matrix& scores, const Matrix& truth, int* skipped = nullptr);
/// Mean fraction of mismatched label bits; both inputs must be binary.
double hamming_loss(const Matrix& predicted, const Matrix& truth);

struct MetricsReport {
    double ap = 0.0, hl = 0.0, oe = 0.0, rl = 0.0, cv = 0.0;
    int skipped_ranked = 0;    // instances without relevant labels (AP, OE, CV)
    int skipped_pairwise = 0;  // instances with all or no labels relevant (RL)
};

/// All five metrics in one pass; `predicted` is the thresholded output.
MetricsReport evaluate(const Matrix& scores, const Matrix& predicted, const Matrix& truth);

enum class Metric { ap, hl, oe, rl, cv };
Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);
double metric_value(const MetricsReport& r, Metric m);
inline bool higher_is_better(Metric m) { return m == Metric::ap; }

/// Per-dataset ranks of k methods over M datasets, ties sharing the average
/// rank. Rank 1 is the best method on a dataset.
struct RankTable {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    Matrix scores;  // M×k
    Matrix ranks;   // M×k
    Vector average_ranks;

    Eigen::Index method_count() const noexcept { return scores.cols(); }
    Eigen::Index dataset_count() const noexcept { return scores.rows(); }
};

RankTable make_rank_table(std::vector<std::string> methods, std::vector<std::string> datasets,
                          const Matrix& scores, bool higher_better);

struct FriedmanResult {
    double chi_square = 0.0;
    double f_statistic = 0.0;
    // True when every method ties on every dataset (F = 0) or the methods
    // are ranked identically on every dataset (F = +inf).
    bool degenerate = false;
};

/// Friedman chi-square over the rank table and its Iman-Davenport F form,
/// (M-1) chi2 / (M(k-1) - chi2).
FriedmanResult friedman_statistic(const RankTable& table);

/// Bonferroni-Dunn critical difference q_alpha * sqrt(k(k+1) / (6M)).
double bonferroni_dunn_cd(int k, int m, double q_alpha);

}  // namespace mltsk
