#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "../support.hpp"
#include "mltsk/error.hpp"
#include "mltsk/solver.hpp"

using namespace mltsk;

namespace {

double scalar_objective(const Matrix& p, const Matrix& g, const Matrix& y, const Matrix& r,
                        double alpha, double beta) {
    double fit = 0.0;
    for (Eigen::Index l = 0; l < y.rows(); ++l)
        for (Eigen::Index n = 0; n < y.cols(); ++n) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < g.rows(); ++i) s += p(i, l) * g(i, n);
            fit += (s - y(l, n)) * (s - y(l, n));
        }
    double l1 = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index l = 0; l < p.cols(); ++l) l1 += std::abs(p(i, l));
    double corr = 0.0;
    for (Eigen::Index i = 0; i < p.cols(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            double dot = 0.0;
            for (Eigen::Index q = 0; q < p.rows(); ++q) dot += p(q, i) * p(q, j);
            corr += r(i, j) * dot;
        }
    return 0.5 * fit + beta * l1 + 0.5 * alpha * corr;
}

Matrix penalty(Rng& rng, Eigen::Index l) {
    Matrix r = testing::random_matrix(rng, l, l, 0, 2);
    r = ((r + r.transpose()) / 2.0).eval();
    r.diagonal().setZero();
    return r;
}

}  // namespace

TEST_CASE("objective") {
    Rng rng(1);
    const Matrix g = testing::random_matrix(rng, 8, 20);
    const Matrix y = testing::random_labels(rng, 4, 20);
    const Matrix r = penalty(rng, 4);
    CHECK(objective(Matrix::Zero(8, 4), g, y, r, 0.7, 0.3) == doctest::Approx(0.5 * y.squaredNorm()));
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix p = testing::random_matrix(rng, 8, 4);
        const double expected = scalar_objective(p, g, y, r, 0.7, 0.3);
        CHECK(std::abs(objective(p, g, y, r, 0.7, 0.3) - expected) <= 1e-10 * std::abs(expected));
    }
    // A consistent system fitted exactly.
    const Matrix sq = testing::random_matrix(rng, 6, 6) + 3.0 * Matrix::Identity(6, 6);
    const Matrix p_true = testing::random_matrix(rng, 6, 2);
    const Matrix y_exact = p_true.transpose() * sq;
    CHECK(std::abs(objective(p_true, sq, y_exact, Matrix::Zero(2, 2), 0, 0)) < 1e-20);
}

TEST_CASE("smooth gradient") {
    Rng rng(2);
    const Matrix g = testing::random_matrix(rng, 6, 25);
    const Matrix y = testing::random_labels(rng, 3, 25);
    const Matrix r = penalty(rng, 3);
    CHECK((grad_smooth(Matrix::Zero(6, 3), g, y, r, 0.5) + g * y.transpose()).norm() < 1e-12);
    const Matrix ls = (g * g.transpose()).ldlt().solve(g * y.transpose());
    CHECK(grad_smooth(ls, g, y, r, 0.0).cwiseAbs().maxCoeff() < 1e-8);

    for (double alpha : {0.0, 0.5, 10.0}) {
        const Matrix p = testing::random_matrix(rng, 6, 3);
        const Matrix grad = grad_smooth(p, g, y, r, alpha);
        const double step = 1e-6;
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index l = 0; l < p.cols(); ++l) {
                Matrix hi = p, lo = p;
                hi(i, l) += step;
                lo(i, l) -= step;
                const double fd = (objective(hi, g, y, r, alpha, 0) - objective(lo, g, y, r, alpha, 0)) / (2 * step);
                CHECK(std::abs(fd - grad(i, l)) <= 1e-5 * std::max(1.0, std::abs(grad(i, l))));
            }
    }
}

TEST_CASE("power iteration and lipschitz bound") {
    CHECK(lipschitz(Matrix::Identity(5, 5), Matrix::Zero(2, 2), 0.0, 1e-6, 1000).value ==
          doctest::Approx(1.0).epsilon(1e-6));
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 3;
    diag(1, 1) = 1;
    CHECK(lipschitz(diag, Matrix::Zero(2, 2), 0.0, 1e-6, 1000).value == doctest::Approx(9.0).epsilon(1e-6));

    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix g = testing::random_matrix(rng, 8, 12);
        const Matrix r = testing::random_symmetric(rng, 5);
        const double top_g = Eigen::SelfAdjointEigenSolver<Matrix>(g * g.transpose()).eigenvalues().maxCoeff();
        const double top_r = Eigen::SelfAdjointEigenSolver<Matrix>(r).eigenvalues().maxCoeff();
        const double expected = top_g + 0.5 * std::max(top_r, 0.0);
        const auto est = lipschitz(g, r, 0.5, 1e-10, 100000, rng.next());
        CHECK(est.converged);
        CHECK(std::abs(est.value - expected) <= 1e-6 * expected);

        const auto e = power_iteration(r, 1e-10, 100000, 5);
        CHECK(e.converged);
        CHECK(std::abs(e.value - top_r) <= 1e-6 * std::max(1.0, std::abs(top_r)));
    }
    // Negative-definite R: the correlation term adds nothing.
    const Matrix g = testing::random_matrix(rng, 4, 6);
    const double top_g = Eigen::SelfAdjointEigenSolver<Matrix>(g * g.transpose()).eigenvalues().maxCoeff();
    CHECK(lipschitz(g, -Matrix::Identity(3, 3), 2.0, 1e-10, 10000).value == doctest::Approx(top_g).epsilon(1e-8));
}

TEST_CASE("soft threshold") {
    Matrix z(1, 5);
    z << 0.5, -0.5, 0.1, -0.2, 0.0;
    const Matrix s = soft_threshold(z, 0.2);
    CHECK(s(0, 0) == doctest::Approx(0.3));
    CHECK(s(0, 1) == doctest::Approx(-0.3));
    CHECK(s(0, 2) == 0.0);
    CHECK(s(0, 3) == 0.0);
    CHECK(s(0, 4) == 0.0);
    Rng rng(4);
    const Matrix r = testing::random_matrix(rng, 4, 4);
    CHECK(soft_threshold(r, 0.0) == r);
}

TEST_CASE("ridge initialization") {
    Rng rng(5);
    const Matrix y = testing::random_labels(rng, 3, 6);
    CHECK((init_p(Matrix::Identity(6, 6), y, 0.0) - y.transpose()).norm() < 1e-14);
    CHECK((init_p(Matrix::Identity(6, 6), y, 1.0) - y.transpose() / 2.0).norm() < 1e-14);
    const Matrix g = testing::random_matrix(rng, 9, 40);
    const Matrix y2 = testing::random_labels(rng, 3, 40);
    const Matrix p = init_p(g, y2, 0.3);
    const Matrix rhs = g * y2.transpose();
    const Matrix lhs = (g * g.transpose() + 0.3 * Matrix::Identity(9, 9)) * p;
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-10);
    // Rank-deficient without ridge.
    Matrix dup(2, 5);
    dup.row(0) = testing::random_matrix(rng, 1, 5);
    dup.row(1) = dup.row(0);
    CHECK_THROWS_AS(init_p(dup, testing::random_labels(rng, 1, 5), 0.0), NumericalError);
}

TEST_CASE("fit") {
    Rng rng(6);
    TrainConfig cfg;
    cfg.alpha = 0;
    cfg.beta = 0;
    cfg.gamma = 0.1;
    cfg.solver_tol = 1e-14;
    cfg.solver_max_iter = 5000;

    SUBCASE("matches least squares without regularization") {
        const Matrix g = testing::random_matrix(rng, 8, 30);
        const Matrix y = testing::random_labels(rng, 4, 30);
        const auto r = fit(g, y, Matrix::Zero(4, 4), cfg);
        const Matrix ls = (g * g.transpose()).ldlt().solve(g * y.transpose());
        CHECK(testing::rel_frobenius(r.p, ls) < 1e-4);
    }
    SUBCASE("zero target") {
        cfg.alpha = 0.2;
        cfg.beta = 0.1;
        const Matrix g = testing::random_matrix(rng, 6, 15);
        const auto r = fit(g, Matrix::Zero(2, 15), Matrix::Ones(2, 2) - Matrix::Identity(2, 2), cfg);
        CHECK(r.p.isZero(0.0));
    }
    SUBCASE("large beta from zero start stops at zero") {
        const Matrix g = testing::random_matrix(rng, 6, 15);
        const Matrix y = testing::random_labels(rng, 3, 15);
        cfg.beta = 1.01 * (g * y.transpose()).cwiseAbs().maxCoeff();
        cfg.zero_init = true;
        const auto r = fit(g, y, Matrix::Zero(3, 3), cfg);
        CHECK(r.p.isZero(0.0));
        CHECK(r.state.iterations == 1);
        CHECK(r.state.converged);
    }
    SUBCASE("state bookkeeping") {
        cfg.alpha = 0.5;
        cfg.beta = 0.05;
        cfg.solver_tol = 1e-6;
        cfg.solver_max_iter = 500;
        const Matrix g = testing::random_matrix(rng, 6, 25);
        const Matrix y = testing::random_labels(rng, 3, 25);
        const Matrix r = penalty(rng, 3);
        const auto res = fit(g, y, r, cfg);
        const auto& s = res.state;
        CHECK(s.lipschitz > 0.0);
        CHECK(s.objective_trace.size() == static_cast<std::size_t>(s.iterations));
        CHECK(s.df_trace.size() == static_cast<std::size_t>(s.iterations));
        REQUIRE(s.momentum_trace.size() == static_cast<std::size_t>(s.iterations) + 1);
        CHECK(s.momentum_trace[0] == 1.0);
        for (std::size_t t = 1; t < s.momentum_trace.size(); ++t) {
            const double b = s.momentum_trace[t - 1];
            CHECK(s.momentum_trace[t] == (1.0 + std::sqrt(4.0 * b * b + 1.0)) / 2.0);
            CHECK(s.momentum_trace[t] > b);
            const double bn = s.momentum_trace[t];
            CHECK(std::abs(bn * bn - bn - b * b) <= 1e-9 * std::max(1.0, b * b));
        }
        double best = s.initial_objective;
        for (double v : s.objective_trace) best = std::min(best, v);
        CHECK(objective(res.p, g, y, r, cfg.alpha, cfg.beta) == best);
        CHECK(objective(res.p, g, y, r, cfg.alpha, cfg.beta) <= s.initial_objective);
        CHECK(res.p == fit(g, y, r, cfg).p);
    }
    SUBCASE("sparsity grows with beta") {
        cfg.alpha = 0.1;
        cfg.solver_tol = 1e-9;
        cfg.solver_max_iter = 3000;
        const Matrix g = testing::random_matrix(rng, 10, 40);
        const Matrix y = testing::random_labels(rng, 3, 40);
        const Matrix r = penalty(rng, 3);
        long previous = -1;
        for (double beta : {0.0, 0.5, 2.0, 8.0, 1e3}) {
            cfg.beta = beta;
            const auto res = fit(g, y, r, cfg);
            const long zeros = (res.p.array() == 0.0).count();
            CHECK(zeros >= previous);
            previous = zeros;
        }
        CHECK(previous == 30);
    }
    SUBCASE("sparsity over the grid beta values") {
        cfg.alpha = 0.0;
        cfg.solver_tol = 1e-10;
        cfg.solver_max_iter = 5000;
        const Matrix g = testing::random_matrix(rng, 12, 50);
        const Matrix y = testing::random_labels(rng, 4, 50);
        long previous = -1;
        for (double beta : {0.01, 0.1, 1.0, 10.0}) {
            cfg.beta = beta;
            const long zeros = (fit(g, y, Matrix::Zero(4, 4), cfg).p.array() == 0.0).count();
            CHECK(zeros >= previous);
            previous = zeros;
        }
    }
}

TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.alpha = -1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.rules = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
