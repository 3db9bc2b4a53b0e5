#include "kernel_items.hpp"

namespace mltsk::kernels::serial {

void fuzzy_map(const Matrix& x, const Matrix& centers, const Matrix& widths, Matrix& g) {
    g.resize(centers.rows() * (centers.cols() + 1), x.cols());
    std::vector<double> scratch;
    for (Eigen::Index n = 0; n < x.cols(); ++n)
        detail::fuzzy_column(x, n, centers, widths, g, scratch);
}

void fcm_memberships(const Matrix& x, const Matrix& centers, double fuzzifier, Matrix& u) {
    u.resize(x.cols(), centers.rows());
    std::vector<double> d2;
    for (Eigen::Index j = 0; j < x.cols(); ++j) detail::fcm_row(x, j, centers, fuzzifier, u, d2);
}

void instance_metrics(const Matrix& scores, const Matrix& truth, InstanceMetrics& out) {
    detail::prepare(out, static_cast<std::size_t>(scores.cols()));
    detail::MetricScratch scratch;
    for (Eigen::Index n = 0; n < scores.cols(); ++n)
        detail::metric_column(scores, truth, n, out, scratch);
}

}  // namespace mltsk::kernels::serial
