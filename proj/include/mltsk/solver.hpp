#pragma once

#include <cstdint>
#include <vector>

#include "mltsk/dataset.hpp"

namespace mltsk {

/// Hyperparameters for one training run.
struct TrainConfig {
    int rules = 3;          // K
    double h = 1.0;         // antecedent width scale
    double alpha = 0.1;     // label-correlation weight
    double beta = 0.1;      // L1 weight
    double gamma = 1.0;     // ridge weight of the initial solve
    double tau = 0.5;       // decision threshold

    double fuzzifier = 2.0;
    double fcm_tol = 1e-5;
    int fcm_max_iter = 100;
    int fcm_restarts = 1;

    double solver_tol = 1e-6;
    int solver_max_iter = 500;
    double power_tol = 1e-6;
    int power_max_iter = 1000;

    std::uint64_t seed = 0;

    // Start the proximal iteration from P = 0 instead of the ridge solution.
    bool zero_init = false;

    void validate() const;
};

/// Everything recorded by `fit`.
struct SolverState {
    Matrix p_current, p_previous;
    double b_current = 1.0, b_previous = 1.0;
    double lipschitz = 0.0;
    bool lipschitz_converged = true;
    double initial_objective = 0.0;
    std::vector<double> objective_trace;  // one entry per iteration
    std::vector<double> df_trace;         // |objective change| per iteration
    std::vector<double> momentum_trace;   // b_1, b_2, ..., one per iteration plus b_1
    int iterations = 0;
    int best_iteration = 0;               // 0 = the initial point
    bool converged = false;
};

struct FitResult {
    Matrix p;  // best iterate, K(D+1)×L
    SolverState state;
};

/// 0.5 |P^T G - Y|_F^2 + beta |P|_1 + (alpha/2) Tr(R P^T P).
double objective(const Matrix& p, const Matrix& g, const Matrix& y, const Matrix& r,
                 double alpha, double beta);

/// Gradient of the smooth part: G G^T P - G Y^T + alpha P R (R symmetric).
Matrix grad_smooth(const Matrix& p, const Matrix& g, const Matrix& y, const Matrix& r,
                   double alpha);

struct EigenEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Largest algebraic eigenvalue of a symmetric matrix by power iteration,
/// shifted unless the caller knows the matrix is positive semidefinite.
/// Stops when |B v - lambda v| <= tol * |lambda| for the shifted matrix B.
EigenEstimate power_iteration(const Matrix& symmetric, double tol, int max_iter,
                              std::uint64_t seed, bool positive_semidefinite = false);

struct LipschitzEstimate {
    double value = 0.0;
    bool converged = true;
};

/// lambda_max(G G^T) + alpha * max(lambda_max(R), 0), which bounds the
/// operator norm of dP -> G G^T dP + alpha dP R.
LipschitzEstimate lipschitz(const Matrix& g, const Matrix& r, double alpha, double tol,
                            int max_iter, std::uint64_t seed = 0);
LipschitzEstimate lipschitz_from_gram(const Matrix& gram, const Matrix& r, double alpha,
                                      double tol, int max_iter, std::uint64_t seed = 0);

/// Elementwise shrinkage toward zero by theta >= 0.
Matrix soft_threshold(const Matrix& z, double theta);

/// (G G^T + gamma I)^{-1} G Y^T via a Cholesky solve.
Matrix init_p(const Matrix& g, const Matrix& y, double gamma);

/// Accelerated proximal gradient on the L1 + correlation objective.
///
/// Starts from P_0 = P_1 = init_p (or zero), b_0 = b_1 = 1, and repeats
///   extrapolate  P^(t) = P_t + ((b_{t-1} - 1) / b_t)(P_t - P_{t-1})
///   step         Z = P^(t) - grad_smooth(P^(t)) / L_f
///   shrink       P_{t+1} = soft_threshold(Z, beta / L_f)
///   momentum     b_{t+1} = (1 + sqrt(4 b_t^2 + 1)) / 2
/// until the relative objective change drops below solver_tol or the
/// iteration cap is hit. Returns the lowest-objective iterate seen.
FitResult fit(const Matrix& g, const Matrix& y, const Matrix& r, const TrainConfig& config);

}  // namespace mltsk
