#include "mltsk/solver.hpp"

#include <algorithm>
#include <cmath>

#include "mltsk/error.hpp"
#include "mltsk/random.hpp"

namespace mltsk {

void TrainConfig::validate() const {
    if (rules < 1) throw ValidationError("rule count K must be at least 1");
    if (!(h > 0.0)) throw ValidationError("width scale h must be positive");
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be non-negative");
    if (!(beta >= 0.0)) throw ValidationError("beta must be non-negative");
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be non-negative");
    if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0, 1)");
    if (!(fuzzifier > 1.0)) throw ValidationError("fuzzifier must exceed 1");
    if (!(fcm_tol >= 0.0) || fcm_max_iter < 1 || fcm_restarts < 1)
        throw ValidationError("invalid FCM stopping settings");
    if (!(solver_tol >= 0.0) || solver_max_iter < 1)
        throw ValidationError("invalid solver stopping settings");
    if (!(power_tol > 0.0) || power_max_iter < 1)
        throw ValidationError("invalid power-iteration settings");
}

namespace {

void check_shapes(const Matrix& p, const Matrix& g, const Matrix& y, const Matrix& r) {
    if (p.rows() != g.rows() || p.cols() != y.rows() || g.cols() != y.cols() ||
        r.rows() != y.rows() || r.cols() != y.rows())
        throw ValidationError("shape mismatch: P is " + std::to_string(p.rows()) + "x" +
                              std::to_string(p.cols()) + ", G is " + std::to_string(g.rows()) + "x" +
                              std::to_string(g.cols()) + ", Y is " + std::to_string(y.rows()) + "x" +
                              std::to_string(y.cols()) + ", R is " + std::to_string(r.rows()) + "x" +
                              std::to_string(r.cols()));
}

// Upper triangle mirrored from a lower rank update.
Matrix gram_of(const Matrix& g) {
    Matrix gram = Matrix::Zero(g.rows(), g.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(g);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

}  // namespace

double objective(const Matrix& p, const Matrix& g, const Matrix& y, const Matrix& r, double alpha,
                 double beta) {
    check_shapes(p, g, y, r);
    const double fit_term = 0.5 * (p.transpose() * g - y).squaredNorm();
    const double l1_term = beta * p.cwiseAbs().sum();
    const double corr_term = 0.5 * alpha * (r * (p.transpose() * p)).trace();
    return fit_term + l1_term + corr_term;
}

Matrix grad_smooth(const Matrix& p, const Matrix& g, const Matrix& y, const Matrix& r, double alpha) {
    check_shapes(p, g, y, r);
    Matrix grad = g * (g.transpose() * p) - g * y.transpose();
    if (alpha != 0.0) grad.noalias() += alpha * (p * r);
    return grad;
}

EigenEstimate power_iteration(const Matrix& a, double tol, int max_iter, std::uint64_t seed,
                              bool positive_semidefinite) {
    if (a.rows() != a.cols()) throw ValidationError("power iteration needs a square matrix");
    const auto n = a.rows();
    if (n == 0) throw ValidationError("power iteration on an empty matrix");

    // An indefinite matrix is shifted by its infinity norm so the iterated
    // matrix is positive semidefinite and its dominant eigenvalue is the
    // largest algebraic one.
    const double shift = positive_semidefinite ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
    Matrix shifted = a;
    shifted.diagonal().array() += shift;

    Rng rng(seed);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform() + 0.5;
    v.normalize();

    EigenEstimate est;
    Vector w(n);
    for (int it = 1; it <= max_iter; ++it) {
        w.noalias() = shifted * v;
        const double lambda = v.dot(w);
        est.value = lambda - shift;
        est.iterations = it;
        const double residual = (w - lambda * v).norm();
        if (residual <= tol * std::abs(lambda)) {
            est.converged = true;
            break;
        }
        const double norm = w.norm();
        if (norm == 0.0) {
            est.converged = true;
            break;
        }
        v = w / norm;
    }
    return est;
}

LipschitzEstimate lipschitz_from_gram(const Matrix& gram, const Matrix& r, double alpha, double tol,
                                      int max_iter, std::uint64_t seed) {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be non-negative");
    const auto top_gram = power_iteration(gram, tol, max_iter, derive_seed(seed, 101), true);
    LipschitzEstimate out{std::max(top_gram.value, 0.0), top_gram.converged};
    if (alpha > 0.0) {
        const auto top_r = power_iteration(r, tol, max_iter, derive_seed(seed, 202));
        out.value += alpha * std::max(top_r.value, 0.0);
        out.converged = out.converged && top_r.converged;
    }
    if (!(out.value > 0.0)) out.value = 1.0;  // zero gradient map: any positive step is valid
    return out;
}

LipschitzEstimate lipschitz(const Matrix& g, const Matrix& r, double alpha, double tol, int max_iter,
                            std::uint64_t seed) {
    return lipschitz_from_gram(gram_of(g), r, alpha, tol, max_iter, seed);
}

Matrix soft_threshold(const Matrix& z, double theta) {
    if (!(theta >= 0.0)) throw ValidationError("soft threshold must be non-negative");
    return z.unaryExpr([theta](double v) {
        if (v > theta) return v - theta;
        if (v < -theta) return v + theta;
        return 0.0;
    });
}

namespace {

Matrix solve_ridge(const Matrix& gram, const Matrix& gyt, double gamma) {
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be non-negative");
    Matrix system = gram;
    system.diagonal().array() += gamma;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success || (gamma == 0.0 && llt.rcond() < 1e-13))
        throw NumericalError("G G^T + gamma I is singular or numerically indefinite; use gamma > 0");
    return llt.solve(gyt);
}

}  // namespace

Matrix init_p(const Matrix& g, const Matrix& y, double gamma) {
    if (g.cols() != y.cols()) throw ValidationError("G and Y disagree on instance count");
    return solve_ridge(gram_of(g), g * y.transpose(), gamma);
}

FitResult fit(const Matrix& g, const Matrix& y, const Matrix& r, const TrainConfig& config) {
    config.validate();
    const Matrix zero_p = Matrix::Zero(g.rows(), y.rows());
    check_shapes(zero_p, g, y, r);

    const Matrix gram = gram_of(g);
    const Matrix gyt = g * y.transpose();
    const double alpha = config.alpha;
    const double beta = config.beta;

    SolverState s;
    const auto lf = lipschitz_from_gram(gram, r, alpha, config.power_tol, config.power_max_iter,
                                        config.seed);
    s.lipschitz = lf.value;
    s.lipschitz_converged = lf.converged;

    s.p_current = config.zero_init ? zero_p : solve_ridge(gram, gyt, config.gamma);
    s.p_previous = s.p_current;
    s.b_current = s.b_previous = 1.0;
    s.momentum_trace.push_back(s.b_current);

    s.initial_objective = objective(s.p_current, g, y, r, alpha, beta);
    if (!std::isfinite(s.initial_objective))
        throw DivergenceError("initial objective is not finite", 0);

    FitResult out;
    out.p = s.p_current;
    double best = s.initial_objective;
    double last = s.initial_objective;
    const double step = 1.0 / s.lipschitz;
    const double theta = beta * step;

    Matrix extrapolated, grad;
    for (int t = 1; t <= config.solver_max_iter; ++t) {
        const double coef = (s.b_previous - 1.0) / s.b_current;
        extrapolated = s.p_current + coef * (s.p_current - s.p_previous);
        grad.noalias() = gram * extrapolated;
        grad -= gyt;
        if (alpha != 0.0) grad.noalias() += alpha * (extrapolated * r);
        Matrix next = soft_threshold(extrapolated - step * grad, theta);
        const double b_next = (1.0 + std::sqrt(4.0 * s.b_current * s.b_current + 1.0)) / 2.0;

        s.p_previous = std::move(s.p_current);
        s.p_current = std::move(next);
        s.b_previous = s.b_current;
        s.b_current = b_next;
        s.iterations = t;

        const double obj = objective(s.p_current, g, y, r, alpha, beta);
        if (!std::isfinite(obj))
            throw DivergenceError("objective became non-finite at iteration " + std::to_string(t), t);
        const double df = std::abs(obj - last);
        s.objective_trace.push_back(obj);
        s.df_trace.push_back(df);
        s.momentum_trace.push_back(s.b_current);
        if (obj < best) {
            best = obj;
            out.p = s.p_current;
            s.best_iteration = t;
        }
        if (df / std::max(1.0, std::abs(last)) < config.solver_tol) {
            s.converged = true;
            break;
        }
        last = obj;
    }
    out.state = std::move(s);
    return out;
}

}  // namespace mltsk
