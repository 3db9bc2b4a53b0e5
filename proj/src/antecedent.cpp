#include "mltsk/antecedent.hpp"

#include <cmath>
#include <limits>

#include "mltsk/error.hpp"
#include "mltsk/kernels.hpp"
#include "mltsk/random.hpp"

namespace mltsk {

namespace {

Matrix weighted_centers(const Matrix& x, const Matrix& weights, const Matrix& previous) {
    // weights: N×K. Row k of the result is the weighted mean of the columns of x.
    Matrix centers = (x * weights).transpose();
    const Vector totals = weights.colwise().sum().transpose();
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
        if (totals(k) > 0.0)
            centers.row(k) /= totals(k);
        else
            centers.row(k) = previous.row(k);
    }
    return centers;
}

Matrix random_memberships(Eigen::Index points, Eigen::Index rules, std::uint64_t seed) {
    Rng rng(seed);
    Matrix u(points, rules);
    for (Eigen::Index j = 0; j < points; ++j) {
        for (Eigen::Index k = 0; k < rules; ++k) u(j, k) = rng.uniform();
        const double s = u.row(j).sum();
        if (s > 0.0)
            u.row(j) /= s;
        else
            u.row(j).setConstant(1.0 / static_cast<double>(rules));
    }
    return u;
}

FcmResult fcm_single(const Matrix& x, Eigen::Index rules, const FcmOptions& opt, std::uint64_t seed) {
    FcmResult r;
    r.memberships = random_memberships(x.cols(), rules, seed);
    r.centers = Matrix::Zero(rules, x.rows());
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iter; ++it) {
        const Matrix um = r.memberships.array().pow(opt.fuzzifier).matrix();
        r.centers = weighted_centers(x, um, r.centers);
        const double j = fcm_objective(x, r.memberships, r.centers, opt.fuzzifier);
        r.objective_trace.push_back(j);
        r.iterations = it;
        kernels::omp::fcm_memberships(x, r.centers, opt.fuzzifier, r.memberships);
        if (std::abs(previous - j) < opt.tol) break;
        previous = j;
    }
    return r;
}

}  // namespace

double fcm_objective(const Matrix& x, const Matrix& memberships, const Matrix& centers,
                     double fuzzifier) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index k = 0; k < centers.rows(); ++k) {
            const double d2 = (x.col(j) - centers.row(k).transpose()).squaredNorm();
            total += std::pow(memberships(j, k), fuzzifier) * d2;
        }
    return total;
}

FcmResult fcm_cluster(const Matrix& x, int rules, const FcmOptions& options) {
    if (rules < 1) throw ValidationError("rule count must be at least 1");
    if (x.cols() < rules)
        throw ValidationError("FCM needs at least as many points (" + std::to_string(x.cols()) +
                              ") as clusters (" + std::to_string(rules) + ")");
    if (!(options.fuzzifier > 1.0)) throw ValidationError("FCM fuzzifier must exceed 1");
    if (options.max_iter < 1) throw ValidationError("FCM max_iter must be at least 1");
    if (!x.allFinite()) throw ValidationError("FCM input contains NaN or Inf");

    if (rules == 1) {
        FcmResult r;
        r.memberships = Matrix::Ones(x.cols(), 1);
        r.centers = x.rowwise().mean().transpose();
        r.objective_trace.push_back(fcm_objective(x, r.memberships, r.centers, options.fuzzifier));
        r.iterations = 1;
        return r;
    }

    FcmResult best;
    const int restarts = std::max(1, options.restarts);
    for (int attempt = 0; attempt < restarts; ++attempt) {
        const auto seed = attempt == 0 ? options.seed : derive_seed(options.seed, static_cast<std::uint64_t>(attempt));
        FcmResult r = fcm_single(x, rules, options, seed);
        if (attempt == 0 || r.objective_trace.back() < best.objective_trace.back()) best = std::move(r);
    }
    return best;
}

void AntecedentParams::validate() const {
    if (centers.rows() < 1 || centers.cols() < 1) throw ValidationError("antecedents are empty");
    if (widths.rows() != centers.rows() || widths.cols() != centers.cols())
        throw ValidationError("center and width matrices disagree in shape");
    if (!centers.allFinite() || !widths.allFinite())
        throw ValidationError("antecedent parameters contain NaN or Inf");
    if ((widths.array() <= 0.0).any()) throw ValidationError("antecedent widths must be positive");
    if (!(h > 0.0)) throw ValidationError("width scale h must be positive");
}

AntecedentParams estimate_antecedents(const Matrix& x, const Matrix& memberships, double h) {
    if (!(h > 0.0)) throw ValidationError("width scale h must be positive");
    if (memberships.rows() != x.cols())
        throw ValidationError("membership rows do not match the number of points");
    const auto rules = memberships.cols();
    const auto dims = x.rows();

    const Vector range = x.rowwise().maxCoeff() - x.rowwise().minCoeff();
    AntecedentParams p;
    p.h = h;
    p.centers.resize(rules, dims);
    p.widths.resize(rules, dims);
    for (Eigen::Index k = 0; k < rules; ++k) {
        const auto w = memberships.col(k);
        const double total = w.sum();
        if (!(total > 0.0))
            throw DegenerateClusterError("cluster " + std::to_string(k) + " has zero total membership");
        const Vector c = x * w / total;
        p.centers.row(k) = c.transpose();
        const Vector spread = (x.colwise() - c).array().square().matrix() * w / total;
        for (Eigen::Index i = 0; i < dims; ++i) {
            const double floor = kWidthFloor * (range(i) > 0.0 ? range(i) : 1.0);
            p.widths(k, i) = std::max(h * spread(i), floor);
        }
    }
    return p;
}

}  // namespace mltsk
