#pragma once

// Data-parallel inner loops. Each kernel exists twice with the same per-item
// arithmetic: `serial` is the reference loop, `omp` distributes items over
// OpenMP threads. Items are independent and any reduction happens afterwards
// in index order, so both variants produce bit-identical output.

#include <vector>

#include <Eigen/Dense>

namespace mltsk::kernels {

using Matrix = Eigen::MatrixXd;

/// Per-instance ranking metric terms. `ranked` marks instances with a
/// non-empty relevant set (AP, OE, CV defined); `pairwise` marks
/// 0 < |relevant| < L (RL defined). Undefined entries are 0.
struct InstanceMetrics {
    std::vector<double> ap, oe, rl, cv;
    std::vector<unsigned char> ranked, pairwise;
};

namespace serial {
void fuzzy_map(const Matrix& x, const Matrix& centers, const Matrix& widths, Matrix& g);
void fcm_memberships(const Matrix& x, const Matrix& centers, double fuzzifier, Matrix& u);
void instance_metrics(const Matrix& scores, const Matrix& truth, InstanceMetrics& out);
}  // namespace serial

namespace omp {
void fuzzy_map(const Matrix& x, const Matrix& centers, const Matrix& widths, Matrix& g);
void fcm_memberships(const Matrix& x, const Matrix& centers, double fuzzifier, Matrix& u);
void instance_metrics(const Matrix& scores, const Matrix& truth, InstanceMetrics& out);
}  // namespace omp

}  // namespace mltsk::kernels
