#include "mvs/model.hpp"

#include <cmath>
#include <sstream>

namespace mvs {

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool has_full_column_rank(const Matrix& m) {
  if (m.cols() == 0 || m.rows() < m.cols() || !m.allFinite()) return false;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  return largest > 0.0 && smallest > 1e-13 * largest;
}

SpectralDataset::SpectralDataset(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("SpectralDataset: need at least one band and one pixel");
  }
  if (!data_.allFinite()) {
    throw std::invalid_argument("SpectralDataset: data contains non-finite entries");
  }
}

MixingMatrix::MixingMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.cols() < 1 || m_.rows() < m_.cols()) {
    std::ostringstream msg;
    msg << "MixingMatrix: need bands >= endmembers >= 1, got " << m_.rows() << "x" << m_.cols();
    throw std::invalid_argument(msg.str());
  }
  if (!m_.allFinite()) throw std::invalid_argument("MixingMatrix: non-finite entries");
  if (!has_full_column_rank(m_)) {
    throw std::invalid_argument("MixingMatrix: columns are linearly dependent");
  }
}

AbundanceMatrix::AbundanceMatrix(Matrix s) : s_(std::move(s)) {
  if (s_.rows() < 1 || s_.cols() < 1) throw std::invalid_argument("AbundanceMatrix: empty");
  if (!s_.allFinite()) throw std::invalid_argument("AbundanceMatrix: non-finite entries");
}

AbundanceMatrix AbundanceMatrix::on_simplex(Matrix s, double tol_feas) {
  AbundanceMatrix out(std::move(s));
  const Matrix& m = out.s_;
  if (m.minCoeff() < -tol_feas) {
    throw std::invalid_argument("AbundanceMatrix: negative abundance beyond tolerance");
  }
  const Eigen::RowVectorXd sums = m.colwise().sum();
  if ((sums.array() - 1.0).abs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("AbundanceMatrix: columns do not sum to one");
  }
  return out;
}

void SisalConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be > 0");
  // outer_iters = 0 is allowed: it returns the projected initialization.
  if (outer_iters < 0) throw std::invalid_argument("outer_iters must be >= 0");
  if (inner_iters < 1) throw std::invalid_argument("inner_iters must be >= 1");
  if (backtrack_max < 1) throw std::invalid_argument("backtrack_max must be >= 1");
  if (!(constraint_tol > 0.0)) throw std::invalid_argument("constraint_tol must be > 0");
  if (!(outer_tol >= 0.0)) throw std::invalid_argument("outer_tol must be >= 0");
}

SolverState SolverState::initial(Matrix q, const Matrix& y, Vector a) {
  SolverState s;
  s.z = q * y;
  s.d = Matrix::Zero(y.rows(), y.cols());
  s.q = std::move(q);
  s.a = std::move(a);
  s.check_shapes(y.cols());
  return s;
}

void SolverState::check_shapes(Index pixels) const {
  const Index p = q.rows();
  if (q.cols() != p || a.size() != p || z.rows() != p || d.rows() != p || z.cols() != pixels ||
      d.cols() != pixels) {
    throw std::invalid_argument("SolverState: inconsistent shapes");
  }
}

double SolverState::constraint_residual() const {
  return (q.colwise().sum().transpose() - a).cwiseAbs().maxCoeff();
}

}  // namespace mvs
