#include "mltsk/fuzzify.hpp"

#include <cmath>

#include "kernel_items.hpp"
#include "mltsk/error.hpp"
#include "mltsk/kernels.hpp"

namespace mltsk {

double membership(double x, double center, double delta) {
    if (!(delta > 0.0)) throw ValidationError("membership width must be positive");
    const double z = (x - center) / delta;
    return std::exp(-0.5 * z * z);
}

Vector firing_strengths(const Eigen::Ref<const Vector>& x, const AntecedentParams& params) {
    params.validate();
    if (x.size() != params.feature_count())
        throw ValidationError("instance has " + std::to_string(x.size()) + " features, rules expect " +
                              std::to_string(params.feature_count()));
    const Matrix column = x;
    Vector mu(params.rule_count());
    kernels::detail::firing_column(column, 0, params.centers, params.widths, mu.data());
    return mu;
}

Matrix fuzzy_map(const Matrix& x, const AntecedentParams& params) {
    params.validate();
    if (x.rows() != params.feature_count())
        throw ValidationError("input has " + std::to_string(x.rows()) + " features, rules expect " +
                              std::to_string(params.feature_count()));
    Matrix g;
    kernels::omp::fuzzy_map(x, params.centers, params.widths, g);
    return g;
}

}  // namespace mltsk
