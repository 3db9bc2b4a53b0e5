#pragma once

#include "mltsk/antecedent.hpp"

namespace mltsk {

/// Gaussian membership exp(-(x - c)^2 / (2 delta^2)); delta must be > 0.
double membership(double x, double center, double delta);

/// Normalized firing strengths of all rules for one instance. Products of
/// memberships are accumulated as log-sums and normalized with a max shift,
/// so high-dimensional inputs do not underflow. If every rule's
/// log-activation is -inf the result is uniform.
Vector firing_strengths(const Eigen::Ref<const Vector>& x, const AntecedentParams& params);

/// Rule-expanded design matrix, K(D+1)×N.
///
/// Block k (rows k(D+1) .. k(D+1)+D) of column n holds mu_k(x_n) * [1; x_n],
/// bias row first. Consequent matrices use the same row layout.
Matrix fuzzy_map(const Matrix& x, const AntecedentParams& params);

}  // namespace mltsk
