#pragma once

#include "mvs/model.hpp"

namespace mvs {

/// sum_ij max(-x_ij, 0).
double hinge_norm(const Matrix& x);

/// Entrywise argmin_z 0.5 (z - v)^2 + beta * max(-z, 0):
///   v            if v >= 0
///   0            if -beta <= v < 0
///   v + beta     if v < -beta
Matrix hinge_prox(const Matrix& v, double beta);

/// -log|det Q| from the pivots of an LU factorization. Throws NumericalError
/// when Q is singular (|det Q| below ~1e-300).
double neg_log_abs_det(const Matrix& q);

/// Gradient of -log|det Q| with respect to Q, i.e. -Q^{-T}.
Matrix grad_neg_log_abs_det(const Matrix& q);

/// Solves (Y Y^T) a = Y 1_n, so that 1^T Q Y = 1^T  <=>  1^T Q = a^T.
Vector compute_a(const SpectralDataset& dataset);

/// Euclidean projection of Q onto {Q : 1^T Q = a^T}.
Matrix project_onto_sum_constraint(const Matrix& q, const Vector& a);

/// -log|det Q| + lambda * ||QY||_h.
double objective(const Matrix& q, const SpectralDataset& dataset, double lambda);

/// Cached pieces of the q-update.
///
/// With A = Y^T (x) I and B = I (x) 1^T, the p^2 x p^2 system matrix
/// mu I + tau A^T A equals K (x) I where K = mu I_p + tau Y Y^T. Only the
/// Cholesky factor of K is stored; A and B are never formed.
class QuadraticCache {
 public:
  /// tau may be zero (K = mu I); mu must be positive.
  QuadraticCache(const SpectralDataset& dataset, double tau, double mu);

  const Matrix& y() const { return y_; }
  const Matrix& yyt() const { return yyt_; }
  const Vector& a() const { return a_; }
  double tau() const { return tau_; }
  double mu() const { return mu_; }
  Index p() const { return y_.rows(); }
  Index n() const { return y_.cols(); }

  /// X K^{-1} for a p-column X.
  Matrix right_solve(const Matrix& x) const;

 private:
  Matrix y_;
  Matrix yyt_;
  Vector a_;
  double tau_;
  double mu_;
  Eigen::LLT<Matrix> k_factor_;
};

/// Minimizer over Q of
///   <G, Q> + (mu/2) ||Q - Q_k||^2 + (tau/2) ||QY - Z - D||^2   s.t. 1^T Q = a^T.
///
/// Stationarity gives Q K = mu Q_k - G + tau (Z + D) Y^T - 1 nu^T. Because the
/// multiplier term only shifts every row by the same vector, eliminating nu
/// reduces to Q = Q_b - (1/p) 1 (1^T Q_b - a^T) with Q_b = (mu Q_k - G + tau (Z + D) Y^T) K^{-1}.
Matrix solve_constrained_quadratic(const QuadraticCache& cache, const Matrix& g, const Matrix& q_k,
                                   const Matrix& z, const Matrix& d, double tau, double mu);

struct AdmmStats {
  int iterations = 0;
  double splitting_residual = 0.0;  // ||QY - Z||_F / ||QY||_F at exit
};

/// Alternating split augmented Lagrangian on the convexified subproblem
///   <G, Q> + (mu/2) ||Q - Q_k||^2 + lambda ||QY||_h   s.t. 1^T Q = a^T.
///
/// Each sweep does a q-update, a hinge prox on QY - D with threshold
/// lambda / tau, then D <- D - (QY - Z). Runs config.inner_iters sweeps or
/// exits when the relative splitting residual drops below
/// config.constraint_tol. Throws NumericalError on non-finite iterates.
SolverState admm_subproblem(SolverState state, const QuadraticCache& cache, const Matrix& g,
                            const Matrix& q_k, const SisalConfig& config,
                            AdmmStats* stats = nullptr);

/// Minimum-volume simplex fit by successive convexification.
///
/// Starts from Q_0 = init^{-1} projected onto 1^T Q = a^T. Every outer step
/// linearizes -log|det Q| at Q_k, solves the convexified subproblem with
/// `admm_subproblem`, then backtracks along Q_k + alpha (Q_new - Q_k),
/// alpha = 1, 1/2, ..., until the objective does not increase. The objective
/// trace is therefore non-increasing.
///
/// `dataset` must be p x n in signal coordinates with full row rank.
SisalResult sisal(const SpectralDataset& dataset, const SisalConfig& config,
                  const MixingMatrix& init);

}  // namespace mvs
