#include "mvs/subspace.hpp"

#include <sstream>

namespace mvs {

SubspaceModel::SubspaceModel(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.rows() < basis_.cols()) {
    throw std::invalid_argument("SubspaceModel: basis must be bands x p with bands >= p >= 1");
  }
  const Matrix gram = basis_.transpose() * basis_;
  const double err = (gram - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) {
    std::ostringstream msg;
    msg << "SubspaceModel: basis columns are not orthonormal (max deviation " << err << ")";
    throw std::invalid_argument(msg.str());
  }
}

SubspaceModel SubspaceModel::identity(Index bands) {
  return SubspaceModel(Matrix::Identity(bands, bands));
}

SubspaceModel fit_subspace(const SpectralDataset& dataset, Index p) {
  const Index l = dataset.band_count();
  const Index n = dataset.pixel_count();
  if (p < 1 || p > std::min(l, n)) {
    std::ostringstream msg;
    msg << "fit_subspace: p = " << p << " outside [1, min(bands, pixels)] = [1, "
        << std::min(l, n) << "]";
    throw std::invalid_argument(msg.str());
  }
  if (l == p) return SubspaceModel::identity(l);

  Eigen::BDCSVD<Matrix> svd(dataset.data(), Eigen::ComputeThinU);
  Matrix basis = svd.matrixU().leftCols(p);
  return SubspaceModel(std::move(basis));
}

SpectralDataset project(const SubspaceModel& model, const SpectralDataset& dataset) {
  if (dataset.band_count() != model.original_bands()) {
    throw std::invalid_argument("project: dataset band count does not match subspace model");
  }
  return SpectralDataset(model.basis().transpose() * dataset.data());
}

MixingMatrix lift(const SubspaceModel& model, const MixingMatrix& m_sub) {
  if (m_sub.band_count() != model.dim() || m_sub.endmember_count() != model.dim()) {
    throw std::invalid_argument("lift: mixing matrix must be p x p in subspace coordinates");
  }
  return MixingMatrix(model.basis() * m_sub.matrix());
}

}  // namespace mvs
