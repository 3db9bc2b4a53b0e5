#pragma once

// Per-item bodies shared by the serial and OpenMP kernel drivers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mltsk/kernels.hpp"

namespace mltsk::kernels::detail {

// Normalized firing strengths for column `n` of x, written to `mu` (size K).
inline void firing_column(const Matrix& x, Eigen::Index n, const Matrix& centers,
                          const Matrix& widths, double* mu) {
    const auto rules = centers.rows();
    const auto dims = centers.cols();
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < rules; ++k) {
        double log_act = 0.0;
        for (Eigen::Index i = 0; i < dims; ++i) {
            const double z = (x(i, n) - centers(k, i)) / widths(k, i);
            log_act -= 0.5 * z * z;
        }
        mu[k] = log_act;
        top = std::max(top, log_act);
    }
    if (!std::isfinite(top)) {
        // All activations underflowed: 0/0 in the normalization.
        for (Eigen::Index k = 0; k < rules; ++k) mu[k] = 1.0 / static_cast<double>(rules);
        return;
    }
    double total = 0.0;
    for (Eigen::Index k = 0; k < rules; ++k) {
        mu[k] = std::exp(mu[k] - top);
        total += mu[k];
    }
    for (Eigen::Index k = 0; k < rules; ++k) mu[k] /= total;
}

inline void fuzzy_column(const Matrix& x, Eigen::Index n, const Matrix& centers,
                         const Matrix& widths, Matrix& g, std::vector<double>& scratch) {
    const auto rules = centers.rows();
    const auto dims = centers.cols();
    scratch.resize(static_cast<std::size_t>(rules));
    firing_column(x, n, centers, widths, scratch.data());
    for (Eigen::Index k = 0; k < rules; ++k) {
        const double mu = scratch[static_cast<std::size_t>(k)];
        const auto base = k * (dims + 1);
        g(base, n) = mu;
        for (Eigen::Index i = 0; i < dims; ++i) g(base + 1 + i, n) = mu * x(i, n);
    }
}

// FCM membership row for point j. Weights are (d2_min / d2_k)^(1/(m-1)),
// which equals the textbook 1 / sum_k' (d_k/d_k')^(2/(m-1)) after
// normalization but cannot overflow.
inline void fcm_row(const Matrix& x, Eigen::Index j, const Matrix& centers, double fuzzifier,
                    Matrix& u, std::vector<double>& d2) {
    const auto rules = centers.rows();
    d2.resize(static_cast<std::size_t>(rules));
    double d2_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < rules; ++k) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < centers.cols(); ++i) {
            const double diff = x(i, j) - centers(k, i);
            s += diff * diff;
        }
        d2[static_cast<std::size_t>(k)] = s;
        d2_min = std::min(d2_min, s);
    }
    if (d2_min == 0.0) {
        int hits = 0;
        for (double v : d2) hits += (v == 0.0);
        for (Eigen::Index k = 0; k < rules; ++k)
            u(j, k) = d2[static_cast<std::size_t>(k)] == 0.0 ? 1.0 / hits : 0.0;
        return;
    }
    const double expo = 1.0 / (fuzzifier - 1.0);
    double total = 0.0;
    for (Eigen::Index k = 0; k < rules; ++k) {
        const double w = std::pow(d2_min / d2[static_cast<std::size_t>(k)], expo);
        u(j, k) = w;
        total += w;
    }
    for (Eigen::Index k = 0; k < rules; ++k) u(j, k) /= total;
}

// Rank 1 = highest score; ties go to the lower label index.
inline void rank_column(const Matrix& scores, Eigen::Index n, std::vector<int>& order,
                        std::vector<int>& rank) {
    const auto labels = static_cast<int>(scores.rows());
    order.resize(static_cast<std::size_t>(labels));
    rank.resize(static_cast<std::size_t>(labels));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a, n) > scores(b, n); });
    for (int r = 0; r < labels; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r + 1;
}

struct MetricScratch {
    std::vector<int> order, rank, relevant, irrelevant;
};

inline void metric_column(const Matrix& scores, const Matrix& truth, Eigen::Index n,
                          InstanceMetrics& out, MetricScratch& s) {
    const auto labels = static_cast<int>(scores.rows());
    const auto idx = static_cast<std::size_t>(n);
    rank_column(scores, n, s.order, s.rank);
    s.relevant.clear();
    s.irrelevant.clear();
    for (int l = 0; l < labels; ++l) (truth(l, n) != 0.0 ? s.relevant : s.irrelevant).push_back(l);

    out.ap[idx] = out.oe[idx] = out.rl[idx] = out.cv[idx] = 0.0;
    out.ranked[idx] = !s.relevant.empty();
    out.pairwise[idx] = !s.relevant.empty() && !s.irrelevant.empty();
    if (s.relevant.empty()) return;

    double ap = 0.0;
    int deepest = 0;
    for (int l : s.relevant) {
        const int rl = s.rank[static_cast<std::size_t>(l)];
        int above = 0;
        for (int lp : s.relevant) above += (s.rank[static_cast<std::size_t>(lp)] <= rl);
        ap += static_cast<double>(above) / rl;
        deepest = std::max(deepest, rl);
    }
    out.ap[idx] = ap / static_cast<double>(s.relevant.size());
    out.oe[idx] = truth(s.order.front(), n) != 0.0 ? 0.0 : 1.0;
    out.cv[idx] = static_cast<double>(deepest - 1) / labels;

    if (!out.pairwise[idx]) return;
    int misordered = 0;
    for (int l : s.relevant)
        for (int lp : s.irrelevant) misordered += (scores(l, n) <= scores(lp, n));
    out.rl[idx] = static_cast<double>(misordered) /
                  (static_cast<double>(s.relevant.size()) * static_cast<double>(s.irrelevant.size()));
}

inline void prepare(InstanceMetrics& out, std::size_t n) {
    out.ap.assign(n, 0.0);
    out.oe.assign(n, 0.0);
    out.rl.assign(n, 0.0);
    out.cv.assign(n, 0.0);
    out.ranked.assign(n, 0);
    out.pairwise.assign(n, 0);
}

}  // namespace mltsk::kernels::detail
