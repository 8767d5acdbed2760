#pragma once

#include "mvs/model.hpp"

namespace mvs {

/// Orthonormal basis (bands x p) of the signal subspace.
class SubspaceModel {
 public:
  /// Throws std::invalid_argument unless basis^T basis = I within 1e-10.
  explicit SubspaceModel(Matrix basis);

  static SubspaceModel identity(Index bands);

  const Matrix& basis() const { return basis_; }
  Index original_bands() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }

 private:
  Matrix basis_;
};

/// Keeps the p leading left singular vectors of the raw (uncentered) data.
/// When bands == p the identity basis is returned without an SVD.
SubspaceModel fit_subspace(const SpectralDataset& dataset, Index p);

/// basis^T * data, giving p x n signal coordinates.
SpectralDataset project(const SubspaceModel& model, const SpectralDataset& dataset);

/// basis * m_sub, giving bands x p endmembers.
MixingMatrix lift(const SubspaceModel& model, const MixingMatrix& m_sub);

}  // namespace mvs
