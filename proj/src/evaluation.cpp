#include "mltsk/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kernel_items.hpp"
#include "mltsk/error.hpp"
#include "mltsk/kernels.hpp"

namespace mltsk {

namespace {

void check_pair(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("score and truth matrices disagree in shape");
    if (a.rows() < 1) throw ValidationError("metrics need at least one label");
}

void check_binary(const Matrix& m, const char* what) {
    if (!((m.array() == 0.0) || (m.array() == 1.0)).all())
        throw ValidationError(std::string(what) + " must contain only 0 and 1");
}

// Sequential sum in index order over the flagged instances.
double masked_mean(const std::vector<double>& values, const std::vector<unsigned char>& mask,
                   int* skipped) {
    double total = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (mask[i]) {
            total += values[i];
            ++used;
        }
    if (skipped) *skipped = static_cast<int>(values.size()) - used;
    return used > 0 ? total / used : 0.0;
}

kernels::InstanceMetrics instance_terms(const Matrix& scores, const Matrix& truth) {
    check_pair(scores, truth);
    check_binary(truth, "truth");
    kernels::InstanceMetrics terms;
    kernels::omp::instance_metrics(scores, truth, terms);
    return terms;
}

}  // namespace

std::vector<int> rank_labels(const Eigen::Ref<const Vector>& scores) {
    const Matrix column = scores;
    std::vector<int> order, rank;
    kernels::detail::rank_column(column, 0, order, rank);
    return rank;
}

double average_precision(const Matrix& scores, const Matrix& truth, int* skipped) {
    const auto t = instance_terms(scores, truth);
    return masked_mean(t.ap, t.ranked, skipped);
}

double one_error(const Matrix& scores, const Matrix& truth, int* skipped) {
    const auto t = instance_terms(scores, truth);
    return masked_mean(t.oe, t.ranked, skipped);
}

double ranking_loss(const Matrix& scores, const Matrix& truth, int* skipped) {
    const auto t = instance_terms(scores, truth);
    return masked_mean(t.rl, t.pairwise, skipped);
}

double coverage(const Matrix& scores, const Matrix& truth, int* skipped) {
    const auto t = instance_terms(scores, truth);
    return masked_mean(t.cv, t.ranked, skipped);
}

double hamming_loss(const Matrix& predicted, const Matrix& truth) {
    check_pair(predicted, truth);
    check_binary(predicted, "predictions");
    check_binary(truth, "truth");
    const double labels = static_cast<double>(truth.rows());
    double total = 0.0;
    for (Eigen::Index n = 0; n < truth.cols(); ++n) {
        int wrong = 0;
        for (Eigen::Index l = 0; l < truth.rows(); ++l) wrong += predicted(l, n) != truth(l, n);
        total += wrong / labels;
    }
    return total / static_cast<double>(truth.cols());
}

MetricsReport evaluate(const Matrix& scores, const Matrix& predicted, const Matrix& truth) {
    const auto t = instance_terms(scores, truth);
    MetricsReport r;
    r.ap = masked_mean(t.ap, t.ranked, &r.skipped_ranked);
    r.oe = masked_mean(t.oe, t.ranked, nullptr);
    r.cv = masked_mean(t.cv, t.ranked, nullptr);
    r.rl = masked_mean(t.rl, t.pairwise, &r.skipped_pairwise);
    r.hl = hamming_loss(predicted, truth);
    return r;
}

Metric parse_metric(const std::string& name) {
    if (name == "ap") return Metric::ap;
    if (name == "hl") return Metric::hl;
    if (name == "oe") return Metric::oe;
    if (name == "rl") return Metric::rl;
    if (name == "cv") return Metric::cv;
    throw ValidationError("unknown metric '" + name + "' (expected ap, hl, oe, rl or cv)");
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::ap: return "ap";
        case Metric::hl: return "hl";
        case Metric::oe: return "oe";
        case Metric::rl: return "rl";
        case Metric::cv: return "cv";
    }
    return "?";
}

double metric_value(const MetricsReport& r, Metric m) {
    switch (m) {
        case Metric::ap: return r.ap;
        case Metric::hl: return r.hl;
        case Metric::oe: return r.oe;
        case Metric::rl: return r.rl;
        case Metric::cv: return r.cv;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Statistics

RankTable make_rank_table(std::vector<std::string> methods, std::vector<std::string> datasets,
                          const Matrix& scores, bool higher_better) {
    if (scores.cols() < 2) throw ValidationError("rank table needs at least two methods");
    if (scores.rows() < 1) throw ValidationError("rank table needs at least one dataset");
    if (static_cast<Eigen::Index>(methods.size()) != scores.cols() ||
        static_cast<Eigen::Index>(datasets.size()) != scores.rows())
        throw ValidationError("rank table names do not match the score matrix");
    if (!scores.allFinite()) throw ValidationError("rank table scores must be finite");

    RankTable t{std::move(methods), std::move(datasets), scores, Matrix(scores.rows(), scores.cols()), {}};
    const auto k = scores.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    for (Eigen::Index d = 0; d < scores.rows(); ++d) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return higher_better ? scores(d, a) > scores(d, b) : scores(d, a) < scores(d, b);
        });
        // Runs of equal scores share the mean of the positions they occupy.
        for (std::size_t start = 0; start < order.size();) {
            std::size_t end = start + 1;
            while (end < order.size() && scores(d, order[end]) == scores(d, order[start])) ++end;
            const double shared = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
            for (std::size_t p = start; p < end; ++p) t.ranks(d, order[p]) = shared;
            start = end;
        }
    }
    t.average_ranks = t.ranks.colwise().mean().transpose();
    return t;
}

FriedmanResult friedman_statistic(const RankTable& table) {
    const double k = static_cast<double>(table.method_count());
    const double m = static_cast<double>(table.dataset_count());
    if (k < 2 || m < 2) throw ValidationError("Friedman test needs k >= 2 methods and M >= 2 datasets");
    FriedmanResult out;
    const double sum_sq = table.average_ranks.squaredNorm();
    out.chi_square = 12.0 * m / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
    if (std::abs(out.chi_square) < 1e-12) {
        out.chi_square = 0.0;
        out.f_statistic = 0.0;
        out.degenerate = (table.ranks.array() == (k + 1.0) / 2.0).all();
        return out;
    }
    const double denom = m * (k - 1.0) - out.chi_square;
    if (denom <= 1e-12 * m * (k - 1.0)) {
        out.f_statistic = std::numeric_limits<double>::infinity();
        out.degenerate = true;
        return out;
    }
    out.f_statistic = (m - 1.0) * out.chi_square / denom;
    return out;
}

double bonferroni_dunn_cd(int k, int m, double q_alpha) {
    if (k < 2 || m < 1 || !(q_alpha > 0.0))
        throw ValidationError("critical difference needs k >= 2, M >= 1 and q_alpha > 0");
    return q_alpha * std::sqrt(static_cast<double>(k) * (k + 1) / (6.0 * m));
}

}  // namespace mltsk
