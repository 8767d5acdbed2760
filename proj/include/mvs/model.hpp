#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mvs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when the solver hits a singular matrix or produces non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default slack allowed on nonnegativity / sum-to-one of generated abundances.
inline constexpr double kDefaultFeasibilityTol = 1e-9;

bool all_finite(const Matrix& m);

/// True when the columns of `m` are numerically linearly independent.
bool has_full_column_rank(const Matrix& m);

/// Observed spectral vectors, one pixel per column (bands x pixels).
class SpectralDataset {
 public:
  explicit SpectralDataset(Matrix data);

  const Matrix& data() const { return data_; }
  Index band_count() const { return data_.rows(); }
  Index pixel_count() const { return data_.cols(); }

 private:
  Matrix data_;
};

/// Endmember signatures, one per column. Square in solver coordinates,
/// bands x p once lifted back to the full band space.
class MixingMatrix {
 public:
  explicit MixingMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  Index endmember_count() const { return m_.cols(); }
  Index band_count() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Abundance fractions, p x n.
///
/// The plain constructor only requires finite entries: estimates come out of a
/// soft-constrained problem and may sit slightly outside the simplex. Use
/// `on_simplex` for generated data, which enforces nonnegativity and unit
/// column sums.
class AbundanceMatrix {
 public:
  explicit AbundanceMatrix(Matrix s);

  static AbundanceMatrix on_simplex(Matrix s, double tol_feas = kDefaultFeasibilityTol);

  const Matrix& matrix() const { return s_; }
  Index endmember_count() const { return s_.rows(); }
  Index pixel_count() const { return s_.cols(); }

 private:
  Matrix s_;
};

struct SisalConfig {
  double lambda = 10.0;  // hinge weight
  double tau = 1.0;      // augmented Lagrangian penalty
  double mu = 1e-4;      // proximal weight of the convexified subproblem
  int outer_iters = 80;
  int inner_iters = 100;
  int backtrack_max = 20;
  // Inner loop exits once ||QY - Z||_F / ||QY||_F drops below this.
  double constraint_tol = 1e-6;
  // Outer loop exits once |l_k - l_{k+1}| <= outer_tol * (1 + |l_k|).
  double outer_tol = 1e-8;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Working variables of the split augmented Lagrangian iteration.
struct SolverState {
  Matrix q;  // current Q = M^{-1}, p x p
  Matrix z;  // splitting variable, Z ~ QY, p x n
  Matrix d;  // scaled multipliers, d = -alpha / (2 tau), p x n
  Vector a;  // right-hand side of 1^T Q = a^T
  std::vector<double> objective_trace;

  /// Z = QY, D = 0.
  static SolverState initial(Matrix q, const Matrix& y, Vector a);

  /// Throws std::invalid_argument if shapes disagree with p x p / p x n.
  void check_shapes(Index pixels) const;

  /// ||1^T Q - a^T||_inf.
  double constraint_residual() const;
};

struct SisalResult {
  MixingMatrix mixing_estimate;
  AbundanceMatrix abundance_estimate;
  int iterations_run = 0;   // accepted outer iterations
  int outer_attempts = 0;   // outer iterations started, including a final rejected one
  int inner_iterations_total = 0;
  double final_objective = 0.0;
  double wall_time_seconds = 0.0;
  std::vector<double> objective_trace;
  // ||1^T Q - a^T||_inf of every accepted iterate, aligned with objective_trace.
  std::vector<double> constraint_trace;
  std::string stop_reason;
};

}  // namespace mvs
