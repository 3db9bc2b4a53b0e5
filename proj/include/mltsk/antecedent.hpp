#pragma once

#include <cstdint>
#include <vector>

#include "mltsk/dataset.hpp"

namespace mltsk {

struct FcmOptions {
    double fuzzifier = 2.0;  // m > 1
    double tol = 1e-5;       // stop when |J_t - J_{t-1}| < tol
    int max_iter = 100;
    int restarts = 1;        // best objective over restarts wins
    std::uint64_t seed = 0;
};

struct FcmResult {
    Matrix memberships;  // N×K, rows sum to 1
    Matrix centers;      // K×D
    std::vector<double> objective_trace;
    int iterations = 0;
};

/// Fuzzy C-Means on the columns of `x` (D×N).
///
/// Memberships are initialized uniformly at random and row-normalized, then
/// centers (weighted by u^m) and memberships are updated alternately. The
/// objective sum_j sum_k u_jk^m |x_j - c_k|^2 is recorded after each center
/// update and is non-increasing. A point that coincides with one or more
/// centers gets crisp membership split evenly over those centers.
FcmResult fcm_cluster(const Matrix& x, int rules, const FcmOptions& options);

/// FCM objective for given memberships and centers.
double fcm_objective(const Matrix& x, const Matrix& memberships, const Matrix& centers,
                     double fuzzifier);

/// Gaussian antecedent parameters: one center and one width per rule and
/// feature, plus the width scale h they were estimated with.
struct AntecedentParams {
    Matrix centers;  // K×D
    Matrix widths;   // K×D, every entry >= the width floor
    double h = 1.0;

    Eigen::Index rule_count() const noexcept { return centers.rows(); }
    Eigen::Index feature_count() const noexcept { return centers.cols(); }
    void validate() const;
};

/// Relative width floor: widths are clamped to kWidthFloor times the feature
/// range (or times 1 for a constant feature).
inline constexpr double kWidthFloor = 1e-6;

/// Centers are the u-weighted feature means of each cluster; widths are h
/// times the u-weighted variance around those centers. Memberships enter
/// linearly (not as u^m). Throws DegenerateClusterError when a cluster's
/// total membership is zero.
AntecedentParams estimate_antecedents(const Matrix& x, const Matrix& memberships, double h);

}  // namespace mltsk
