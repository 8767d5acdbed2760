#include "mvs/sisal.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace mvs {
namespace {

// log(1e-300); anything below is treated as a singular matrix.
constexpr double kMinLogAbsDet = -690.7755278982137;

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& q, const char* who) {
  if (q.rows() != q.cols() || q.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
  }
  if (!q.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
  Eigen::PartialPivLU<Matrix> lu(q);
  const Matrix& packed = lu.matrixLU();
  double log_abs_det = 0.0;
  for (Index i = 0; i < packed.rows(); ++i) {
    const double pivot = std::abs(packed(i, i));
    if (pivot == 0.0) throw NumericalError(std::string(who) + ": singular matrix (zero pivot)");
    log_abs_det += std::log(pivot);
  }
  if (log_abs_det < kMinLogAbsDet) {
    throw NumericalError(std::string(who) + ": singular matrix (|det| below 1e-300)");
  }
  return lu;
}

double log_abs_det_from_lu(const Eigen::PartialPivLU<Matrix>& lu) {
  const Matrix& packed = lu.matrixLU();
  double sum = 0.0;
  for (Index i = 0; i < packed.rows(); ++i) sum += std::log(std::abs(packed(i, i)));
  return sum;
}

}  // namespace

double hinge_norm(const Matrix& x) {
  if (!x.allFinite()) throw std::invalid_argument("hinge_norm: non-finite entry");
  return (-x.array()).max(0.0).sum();
}

Matrix hinge_prox(const Matrix& v, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("hinge_prox: beta must be > 0");
  if (!v.allFinite()) throw std::invalid_argument("hinge_prox: non-finite entry");
  return v.unaryExpr([beta](double x) {
    if (x >= 0.0) return x;
    if (x >= -beta) return 0.0;
    return x + beta;
  });
}

double neg_log_abs_det(const Matrix& q) {
  return -log_abs_det_from_lu(checked_lu(q, "neg_log_abs_det"));
}

Matrix grad_neg_log_abs_det(const Matrix& q) {
  const auto lu = checked_lu(q, "grad_neg_log_abs_det");
  return -lu.inverse().transpose();
}

Vector compute_a(const SpectralDataset& dataset) {
  const Matrix& y = dataset.data();
  const Matrix yyt = y * y.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(yyt, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  if (!(ev(ev.size() - 1) > 0.0) || ev(0) <= 1e-14 * ev(ev.size() - 1)) {
    throw std::invalid_argument("compute_a: data matrix is rank deficient (Y Y^T singular)");
  }
  const Vector rhs = y.rowwise().sum();
  return yyt.ldlt().solve(rhs);
}

Matrix project_onto_sum_constraint(const Matrix& q, const Vector& a) {
  const Index p = q.rows();
  const Eigen::RowVectorXd excess = q.colwise().sum() - a.transpose();
  return q - Vector::Ones(p) * excess / static_cast<double>(p);
}

double objective(const Matrix& q, const SpectralDataset& dataset, double lambda) {
  if (q.cols() != dataset.band_count()) {
    throw std::invalid_argument("objective: Q columns must match dataset bands");
  }
  return neg_log_abs_det(q) + lambda * hinge_norm(q * dataset.data());
}

QuadraticCache::QuadraticCache(const SpectralDataset& dataset, double tau, double mu)
    : y_(dataset.data()), tau_(tau), mu_(mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("QuadraticCache: mu must be > 0");
  if (!(tau >= 0.0)) throw std::invalid_argument("QuadraticCache: tau must be >= 0");
  yyt_ = y_ * y_.transpose();
  a_ = compute_a(dataset);
  const Index p = y_.rows();
  k_factor_.compute(mu * Matrix::Identity(p, p) + tau * yyt_);
  if (k_factor_.info() != Eigen::Success) {
    throw NumericalError("QuadraticCache: mu I + tau Y Y^T is not positive definite");
  }
}

Matrix QuadraticCache::right_solve(const Matrix& x) const {
  // X K^{-1} = (K^{-1} X^T)^T since K is symmetric.
  return k_factor_.solve(x.transpose()).transpose();
}

Matrix solve_constrained_quadratic(const QuadraticCache& cache, const Matrix& g, const Matrix& q_k,
                                   const Matrix& z, const Matrix& d, double tau, double mu) {
  const Index p = cache.p();
  const Index n = cache.n();
  if (g.rows() != p || g.cols() != p || q_k.rows() != p || q_k.cols() != p || z.rows() != p ||
      z.cols() != n || d.rows() != p || d.cols() != n) {
    throw std::invalid_argument("solve_constrained_quadratic: shape mismatch with cache");
  }
  if (tau != cache.tau() || mu != cache.mu()) {
    throw std::invalid_argument("solve_constrained_quadratic: tau/mu differ from cache");
  }
  Matrix rhs = mu * q_k - g;
  if (tau != 0.0) rhs.noalias() += tau * (z + d) * cache.y().transpose();
  return project_onto_sum_constraint(cache.right_solve(rhs), cache.a());
}

SolverState admm_subproblem(SolverState state, const QuadraticCache& cache, const Matrix& g,
                            const Matrix& q_k, const SisalConfig& config, AdmmStats* stats) {
  state.check_shapes(cache.n());
  if (state.q.rows() != cache.p()) throw std::invalid_argument("admm_subproblem: p mismatch");
  const double threshold = config.lambda / config.tau;
  const Matrix& y = cache.y();

  Matrix qy(cache.p(), cache.n());
  int iter = 0;
  double rel_residual = std::numeric_limits<double>::infinity();
  while (iter < config.inner_iters) {
    state.q = solve_constrained_quadratic(cache, g, q_k, state.z, state.d, config.tau, config.mu);
    qy.noalias() = state.q * y;
    if (!state.q.allFinite() || !qy.allFinite()) {
      throw NumericalError("admm_subproblem: non-finite q-update (numerical divergence)");
    }
    state.z = hinge_prox(qy - state.d, threshold);
    state.d -= qy - state.z;
    ++iter;

    const double qy_norm = qy.norm();
    rel_residual = (qy - state.z).norm() / (qy_norm > 0.0 ? qy_norm : 1.0);
    if (!std::isfinite(rel_residual) || !state.d.allFinite()) {
      throw NumericalError("admm_subproblem: non-finite multipliers (numerical divergence)");
    }
    if (rel_residual < config.constraint_tol) break;
  }
  if (stats != nullptr) {
    stats->iterations = iter;
    stats->splitting_residual = rel_residual;
  }
  return state;
}

SisalResult sisal(const SpectralDataset& dataset, const SisalConfig& config,
                  const MixingMatrix& init) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const Index p = dataset.band_count();
  if (init.band_count() != p || init.endmember_count() != p) {
    std::ostringstream msg;
    msg << "sisal: init must be " << p << "x" << p << " (dataset in signal coordinates), got "
        << init.band_count() << "x" << init.endmember_count();
    throw std::invalid_argument(msg.str());
  }
  if (dataset.pixel_count() < p) throw std::invalid_argument("sisal: fewer pixels than endmembers");

  const QuadraticCache cache(dataset, config.tau, config.mu);
  const Matrix& y = dataset.data();

  Matrix q_init = checked_lu(init.matrix(), "sisal init").inverse();
  q_init = project_onto_sum_constraint(q_init, cache.a());

  SolverState state = SolverState::initial(q_init, y, cache.a());
  double current = objective(state.q, dataset, config.lambda);

  SisalResult result{MixingMatrix(Matrix::Identity(p, p)), AbundanceMatrix(Matrix::Zero(p, 1)),
                     0, 0, 0, 0.0, 0.0, {}, {}, {}};
  result.objective_trace.push_back(current);
  result.constraint_trace.push_back(state.constraint_residual());
  result.stop_reason = "outer_iters";

  Matrix q_k = state.q;
  for (int k = 0; k < config.outer_iters; ++k) {
    const Matrix g = grad_neg_log_abs_det(q_k);
    ++result.outer_attempts;
    AdmmStats stats;
    state = admm_subproblem(std::move(state), cache, g, q_k, config, &stats);
    result.inner_iterations_total += stats.iterations;
    const Matrix candidate = state.q;

    bool accepted = false;
    double next = current;
    Matrix q_next = q_k;
    double alpha = 1.0;
    for (int h = 0; h <= config.backtrack_max; ++h, alpha *= 0.5) {
      Matrix trial = alpha * candidate + (1.0 - alpha) * q_k;
      double value = 0.0;
      try {
        value = objective(trial, dataset, config.lambda);
      } catch (const NumericalError&) {
        continue;  // singular interpolant counts as an increase
      }
      if (value <= current) {
        accepted = true;
        next = value;
        q_next = std::move(trial);
        break;
      }
    }
    if (!accepted) {
      state.q = q_k;
      result.stop_reason = "backtracking_failed";
      break;
    }

    ++result.iterations_run;
    const double change = std::abs(current - next);
    const double scale = 1.0 + std::abs(current);
    q_k = std::move(q_next);
    state.q = q_k;
    current = next;
    result.objective_trace.push_back(current);
    result.constraint_trace.push_back(state.constraint_residual());
    if (change <= config.outer_tol * scale) {
      result.stop_reason = "converged";
      break;
    }
  }

  const auto lu = checked_lu(q_k, "sisal result");
  result.mixing_estimate = MixingMatrix(lu.inverse());
  result.abundance_estimate = AbundanceMatrix(q_k * y);
  result.final_objective = current;
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace mvs
