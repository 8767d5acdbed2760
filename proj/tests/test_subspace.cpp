#include <doctest.h>

#include <random>

#include "mvs/subspace.hpp"
#include "mvs/synthgen.hpp"

using namespace mvs;

namespace {
Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  return Matrix::NullaryExpr(r, c, [&]() { return n(rng); });
}
}  // namespace

TEST_CASE("square case uses an orthonormal basis and round-trips") {
  const SpectralDataset y(random_matrix(4, 30, 1));
  const SubspaceModel model = fit_subspace(y, 4);
  CHECK(model.dim() == 4);
  CHECK((model.basis() - Matrix::Identity(4, 4)).norm() == 0.0);
  const Matrix back = model.basis() * project(model, y).data();
  CHECK((back - y.data()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("exact low-rank data is reproduced") {
  const Matrix span = random_matrix(5, 2, 2);
  const SpectralDataset y(span * random_matrix(2, 40, 3));
  const SubspaceModel model = fit_subspace(y, 2);
  const Matrix back = model.basis() * project(model, y).data();
  CHECK((back - y.data()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("noiseless mixture in 50 bands matches the SVD truncation oracle") {
  const MixingMatrix m = random_mixing_matrix(50, 3, 9);
  const AbundanceMatrix s = sample_dirichlet(Vector::Ones(3), 400, 10);
  const SpectralDataset y(m.matrix() * s.matrix());
  const SubspaceModel model = fit_subspace(y, 3);

  // Oracle: full Jacobi SVD, rank-3 truncation.
  Eigen::JacobiSVD<Matrix> svd(y.data(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix u = svd.matrixU().leftCols(3);
  const Matrix truncated = u * u.transpose() * y.data();

  const Matrix back = model.basis() * project(model, y).data();
  CHECK((back - y.data()).norm() <= 1e-8 * y.data().norm());
  CHECK((back - truncated).norm() <= 1e-8 * y.data().norm());
  CHECK((model.basis().transpose() * model.basis() - Matrix::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("project") {
  const SpectralDataset y(random_matrix(3, 6, 4));
  const SubspaceModel id = SubspaceModel::identity(3);
  CHECK((project(id, y).data() - y.data()).norm() == 0.0);

  Eigen::HouseholderQR<Matrix> qr(random_matrix(6, 6, 5));
  const Matrix q = qr.householderQ() * Matrix::Identity(6, 3);
  const SubspaceModel model(q);
  const Vector e1 = project(model, SpectralDataset(q.col(0))).data().col(0);
  CHECK((e1 - Vector::Unit(3, 0)).norm() < 1e-12);

  // l = p = 4: orthonormal change of basis preserves the Frobenius norm.
  Eigen::HouseholderQR<Matrix> qr4(random_matrix(4, 4, 6));
  const SubspaceModel rot(qr4.householderQ() * Matrix::Identity(4, 4));
  const SpectralDataset data(random_matrix(4, 10, 7));
  const Matrix direct = rot.basis().transpose() * data.data();
  const Matrix out = project(rot, data).data();
  CHECK((out - direct).norm() < 1e-12);
  CHECK(std::abs(out.norm() - data.data().norm()) < 1e-10);

  CHECK_THROWS_AS(project(model, SpectralDataset(Matrix::Ones(5, 2))), std::invalid_argument);
}

TEST_CASE("lift and project are inverse on p x p inputs") {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(8, 8, 11));
  const SubspaceModel model(qr.householderQ() * Matrix::Identity(8, 3));
  CHECK((lift(model, MixingMatrix(Matrix::Identity(3, 3))).matrix() - model.basis()).norm() < 1e-15);
  const SubspaceModel id = SubspaceModel::identity(3);
  const Matrix m = random_matrix(3, 3, 12);
  CHECK((lift(id, MixingMatrix(m)).matrix() - m).norm() == 0.0);

  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const Matrix sub = random_matrix(3, 3, seed);
    const Matrix lifted = lift(model, MixingMatrix(sub)).matrix();
    const Matrix back = project(model, SpectralDataset(lifted)).data();
    CHECK((back - sub).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(lift(model, MixingMatrix(Matrix::Identity(4, 4))), std::invalid_argument);
}

TEST_CASE("fit_subspace rejects bad p and non-orthonormal bases are rejected") {
  const SpectralDataset y(random_matrix(5, 4, 13));
  CHECK_THROWS_AS(fit_subspace(y, 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_subspace(y, 5), std::invalid_argument);  // p > n
  CHECK_THROWS_AS(SubspaceModel(2.0 * Matrix::Identity(3, 3)), std::invalid_argument);
}
