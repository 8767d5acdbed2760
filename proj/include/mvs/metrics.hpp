#pragma once

#include <vector>

#include "mvs/model.hpp"

namespace mvs {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(p^3)). Returns row_to_col with row i assigned to column row_to_col[i].
std::vector<Index> solve_assignment(const Matrix& cost);

/// Permutation pi minimizing sum_i ||m_hat[:, pi(i)] - m_ref[:, i]||^2.
/// Element i of the result is pi(i).
std::vector<Index> align_endmembers(const MixingMatrix& m_hat, const MixingMatrix& m_ref);

/// ||M_hat P - M||_F after optimal column alignment.
double endmember_error(const MixingMatrix& m_hat, const MixingMatrix& m_ref);

/// Columns of m reordered so that column i becomes m[:, perm[i]].
Matrix permute_columns(const Matrix& m, const std::vector<Index>& perm);

}  // namespace mvs
