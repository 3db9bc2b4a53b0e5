#include "mltsk/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "mltsk/error.hpp"

namespace mltsk {

double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
    if (a.size() < 2) throw ValidationError("pearson: need at least two samples");
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double saa = da.squaredNorm();
    const double sbb = db.squaredNorm();
    if (saa == 0.0 || sbb == 0.0) return a == b ? 1.0 : 0.0;
    const double r = da.dot(db) / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix build_correlation(const Matrix& labels) {
    if (labels.rows() < 1) throw ValidationError("correlation needs at least one label");
    if (labels.cols() < 2) throw ValidationError("correlation needs at least two instances");
    const auto l = labels.rows();
    CorrelationMatrix out{Matrix::Identity(l, l), Matrix::Zero(l, l)};
    for (Eigen::Index i = 0; i < l; ++i) {
        const Vector yi = labels.row(i).transpose();
        for (Eigen::Index j = i + 1; j < l; ++j) {
            const Vector yj = labels.row(j).transpose();
            const double c = pearson(yi, yj);
            out.coefficients(i, j) = out.coefficients(j, i) = c;
        }
    }
    out.penalty = Matrix::Ones(l, l) - out.coefficients;
    return out;
}

Matrix column_correlations(const Matrix& m) {
    const auto n = m.cols();
    Matrix c = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) c(i, j) = c(j, i) = pearson(m.col(i), m.col(j));
    return c;
}

}  // namespace mltsk
