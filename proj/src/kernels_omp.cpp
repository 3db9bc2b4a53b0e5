#include <omp.h>

#include "kernel_items.hpp"

namespace mltsk::kernels::omp {

void fuzzy_map(const Matrix& x, const Matrix& centers, const Matrix& widths, Matrix& g) {
    g.resize(centers.rows() * (centers.cols() + 1), x.cols());
    const auto cols = x.cols();
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (Eigen::Index n = 0; n < cols; ++n)
            detail::fuzzy_column(x, n, centers, widths, g, scratch);
    }
}

void fcm_memberships(const Matrix& x, const Matrix& centers, double fuzzifier, Matrix& u) {
    u.resize(x.cols(), centers.rows());
    const auto points = x.cols();
#pragma omp parallel
    {
        std::vector<double> d2;
#pragma omp for schedule(static)
        for (Eigen::Index j = 0; j < points; ++j) detail::fcm_row(x, j, centers, fuzzifier, u, d2);
    }
}

void instance_metrics(const Matrix& scores, const Matrix& truth, InstanceMetrics& out) {
    detail::prepare(out, static_cast<std::size_t>(scores.cols()));
    const auto cols = scores.cols();
#pragma omp parallel
    {
        detail::MetricScratch scratch;
#pragma omp for schedule(dynamic, 64)
        for (Eigen::Index n = 0; n < cols; ++n) detail::metric_column(scores, truth, n, out, scratch);
    }
}

}  // namespace mltsk::kernels::omp
