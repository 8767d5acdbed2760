#pragma once

// Independent reference computations used only by the tests. None of these
// call into the solver code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace mvs::oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

inline Matrix unvec(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

/// Minimizes 0.5 (z - v)^2 + beta * max(-z, 0) by grid search followed by
/// ternary refinement of the bracketing cell.
inline double brute_force_hinge_prox(double v, double beta) {
  auto f = [&](double z) { return 0.5 * (z - v) * (z - v) + beta * std::max(-z, 0.0); };
  const double lo = std::min(v, 0.0) - beta - 1.0;
  const double hi = std::max(v, 0.0) + 1.0;
  constexpr int kGrid = 20000;
  const double h = (hi - lo) / kGrid;
  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double val = f(lo + i * h);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  double a = lo + std::max(best - 1, 0) * h;
  double b = lo + std::min(best + 1, kGrid) * h;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return 0.5 * (a + b);
}

/// Central finite differences of a scalar function of a matrix.
inline Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f,
                                         const Matrix& x, double step) {
  Matrix grad(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      Matrix plus = x;
      Matrix minus = x;
      plus(i, j) += step;
      minus(i, j) -= step;
      grad(i, j) = (f(plus) - f(minus)) / (2.0 * step);
    }
  }
  return grad;
}

/// a^T = 1_n^T Y^T (Y Y^T)^{-1} evaluated with an explicit inverse.
inline Vector dense_a(const Matrix& y) {
  const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(y.cols());
  const Eigen::RowVectorXd at = ones * y.transpose() * (y * y.transpose()).inverse();
  return at.transpose();
}

/// Solves the full (p^2 + p) saddle-point system of
///   min g^T q + mu/2 ||q - q_k||^2 + tau/2 ||A q - z - d||^2  s.t.  B q = a
/// with explicit A = Y^T (x) I_p and B = I_p (x) 1_p^T.
inline Matrix dense_kkt_q_update(const Matrix& y, const Matrix& g, const Matrix& q_k,
                                 const Matrix& z, const Matrix& d, const Vector& a, double tau,
                                 double mu) {
  const Index p = y.rows();
  const Index pp = p * p;
  const Matrix A = kron(y.transpose(), Matrix::Identity(p, p));
  const Matrix B = kron(Matrix::Identity(p, p), Matrix::Ones(1, p));
  const Matrix F = mu * Matrix::Identity(pp, pp) + tau * A.transpose() * A;
  const Vector b = mu * vec(q_k) - vec(g) + tau * A.transpose() * vec(z + d);

  Matrix kkt = Matrix::Zero(pp + p, pp + p);
  kkt.topLeftCorner(pp, pp) = F;
  kkt.topRightCorner(pp, p) = B.transpose();
  kkt.bottomLeftCorner(p, pp) = B;
  Vector rhs(pp + p);
  rhs << b, a;
  const Vector sol = kkt.fullPivLu().solve(rhs);
  return unvec(sol.head(pp), p, p);
}

struct SubproblemBounds {
  double primal = std::numeric_limits<double>::infinity();  // best feasible value found
  double dual = -std::numeric_limits<double>::infinity();   // best lower bound
  Matrix q;
};

/// Convexified subproblem
///   P(Q) = <G, Q> + mu/2 ||Q - Q_k||^2 + lambda ||QY||_h   s.t. 1^T Q = a^T
/// solved through its box-constrained dual
///   max_{0 <= W <= lambda} min_Q <G, Q> + mu/2 ||Q - Q_k||^2 - <W, QY>
/// by accelerated projected gradient ascent. Returns a certified bracket.
inline SubproblemBounds dual_subproblem_solve(const Matrix& y, const Matrix& g, const Matrix& q_k,
                                              const Vector& a, double lambda, double mu,
                                              int max_iters = 200000, double gap_tol = 1e-11) {
  const Index p = y.rows();
  auto primal_of = [&](const Matrix& w) {
    Matrix q = q_k - (g - w * y.transpose()) / mu;
    const Eigen::RowVectorXd excess = q.colwise().sum() - a.transpose();
    for (Index i = 0; i < p; ++i) q.row(i) -= excess / static_cast<double>(p);
    return q;
  };
  auto primal_value = [&](const Matrix& q) {
    const Matrix qy = q * y;
    return (g.array() * q.array()).sum() + 0.5 * mu * (q - q_k).squaredNorm() +
           lambda * (-qy.array()).max(0.0).sum();
  };
  auto dual_value = [&](const Matrix& w, const Matrix& q) {
    return (g.array() * q.array()).sum() + 0.5 * mu * (q - q_k).squaredNorm() -
           (w.array() * (q * y).array()).sum();
  };

  const double lipschitz = y.squaredNorm() / mu;  // upper bound on ||Y||_2^2 / mu
  const double step = 1.0 / lipschitz;
  Matrix w = Matrix::Zero(p, y.cols());
  Matrix w_prev = w;
  Matrix extrap = w;
  double t = 1.0;
  SubproblemBounds out;
  for (int it = 0; it < max_iters; ++it) {
    const Matrix q_ex = primal_of(extrap);
    w_prev = w;
    w = (extrap - step * (q_ex * y)).cwiseMax(0.0).cwiseMin(lambda);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    extrap = w + ((t - 1.0) / t_next) * (w - w_prev);
    t = t_next;

    if (it % 50 == 0 || it + 1 == max_iters) {
      const Matrix q = primal_of(w);
      const double pv = primal_value(q);
      const double dv = dual_value(w, q);
      if (pv < out.primal) {
        out.primal = pv;
        out.q = q;
      }
      out.dual = std::max(out.dual, dv);
      if (out.primal - out.dual <= gap_tol) break;
    }
  }
  return out;
}

/// Exhaustive search over all column permutations; perm[i] is the estimate
/// column matched to reference column i.
inline std::vector<Index> brute_force_alignment(const Matrix& m_hat, const Matrix& m_ref) {
  const Index p = m_ref.cols();
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<Index> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (Index i = 0; i < p; ++i) cost += (m_hat.col(perm[i]) - m_ref.col(i)).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Uniform point on the probability simplex from sorted uniform spacings
/// (Dirichlet(1, ..., 1) without any Gamma draws).
inline Vector uniform_simplex_point(Index p, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> cuts(static_cast<std::size_t>(p - 1));
  for (auto& c : cuts) c = unif(rng);
  std::sort(cuts.begin(), cuts.end());
  Vector s(p);
  double prev = 0.0;
  for (Index i = 0; i < p - 1; ++i) {
    s(i) = cuts[static_cast<std::size_t>(i)] - prev;
    prev = cuts[static_cast<std::size_t>(i)];
  }
  s(p - 1) = 1.0 - prev;
  return s;
}

}  // namespace mvs::oracle
