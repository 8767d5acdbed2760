#include "mvs/metrics.hpp"

#include <limits>

namespace mvs {

std::vector<Index> solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("solve_assignment: cost must be square");
  if (!cost.allFinite()) throw std::invalid_argument("solve_assignment: non-finite cost");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();

  // Potentials u (rows), v (columns); way[j] is the previous column on the
  // augmenting path. Index 0 is a sentinel, real rows/columns are 1..n.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> col_owner(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    col_owner[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = col_owner[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[j0] != 0);
    do {
      const Index j1 = way[j0];
      col_owner[j0] = col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> row_to_col(n, 0);
  for (Index j = 1; j <= n; ++j) row_to_col[col_owner[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<Index> align_endmembers(const MixingMatrix& m_hat, const MixingMatrix& m_ref) {
  if (m_hat.band_count() != m_ref.band_count() ||
      m_hat.endmember_count() != m_ref.endmember_count()) {
    throw std::invalid_argument("align_endmembers: shape mismatch");
  }
  const Index p = m_ref.endmember_count();
  // cost(i, j): reference column i matched with estimate column j.
  Matrix cost(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      cost(i, j) = (m_hat.matrix().col(j) - m_ref.matrix().col(i)).squaredNorm();
    }
  }
  return solve_assignment(cost);
}

Matrix permute_columns(const Matrix& m, const std::vector<Index>& perm) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.cols(); ++i) out.col(i) = m.col(perm[static_cast<std::size_t>(i)]);
  return out;
}

double endmember_error(const MixingMatrix& m_hat, const MixingMatrix& m_ref) {
  const std::vector<Index> perm = align_endmembers(m_hat, m_ref);
  return (permute_columns(m_hat.matrix(), perm) - m_ref.matrix()).norm();
}

}  // namespace mvs
