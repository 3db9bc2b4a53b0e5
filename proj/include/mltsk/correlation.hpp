#pragma once

#include "mltsk/dataset.hpp"

namespace mltsk {

/// Pearson correlation of two equal-length vectors (length >= 2).
///
/// A zero-variance input has no defined coefficient; the result is then 0,
/// except when both inputs are identical, which gives 1.
double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// Label correlation penalty. coefficients(i, j) is the Pearson correlation
/// of label rows i and j; penalty = 1 - coefficients, so strongly correlated
/// labels have penalty near 0 and anti-correlated labels near 2.
struct CorrelationMatrix {
    Matrix coefficients;  // C, L×L, unit diagonal
    Matrix penalty;       // R, L×L, zero diagonal
};

/// Builds C and R from the rows of an L×N label matrix (N >= 2). Only i <= j
/// is computed, so both matrices are exactly symmetric.
CorrelationMatrix build_correlation(const Matrix& labels);

/// Pairwise Pearson correlation of the columns of `m` (used for reports).
Matrix column_correlations(const Matrix& m);

}  // namespace mltsk
