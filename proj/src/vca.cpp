#include "mvs/vca.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace mvs {
namespace {

void check_sizes(const SpectralDataset& dataset, Index p, const char* who) {
  if (p < 1 || p > dataset.band_count()) {
    std::ostringstream msg;
    msg << who << ": p = " << p << " must be in [1, bands = " << dataset.band_count() << "]";
    throw std::invalid_argument(msg.str());
  }
  if (dataset.pixel_count() < p) {
    std::ostringstream msg;
    msg << who << ": need at least p = " << p << " pixels, got " << dataset.pixel_count();
    throw std::invalid_argument(msg.str());
  }
}

Vector gaussian_vector(Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

MixingMatrix make_nonsingular(Matrix m, std::mt19937_64& rng) {
  constexpr int kMaxAttempts = 10;
  for (int attempt = 0; attempt <= kMaxAttempts; ++attempt) {
    if (has_full_column_rank(m)) return MixingMatrix(std::move(m));
    if (attempt == kMaxAttempts) break;
    for (Index j = 0; j < m.cols(); ++j) {
      Vector dir = gaussian_vector(m.rows(), rng);
      dir.normalize();
      double scale = m.col(j).norm();
      if (scale == 0.0) scale = 1.0;
      m.col(j) += 1e-6 * scale * dir;
    }
  }
  throw NumericalError("initializer: selected endmembers remain singular after perturbation");
}

}  // namespace

std::vector<Index> vca_select(const SpectralDataset& dataset, Index p, std::uint64_t seed) {
  check_sizes(dataset, p, "vca_init");
  const Matrix& y = dataset.data();
  const Index l = y.rows();
  std::mt19937_64 rng(seed);

  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(p));
  Matrix chosen(l, 0);
  for (Index i = 0; i < p; ++i) {
    Vector f = gaussian_vector(l, rng);
    if (i > 0) {
      // Remove the component lying in span(chosen).
      Eigen::ColPivHouseholderQR<Matrix> qr(chosen);
      f -= chosen * qr.solve(f);
    }
    const Eigen::RowVectorXd scores = (f.transpose() * y).cwiseAbs();
    Index best = -1;
    double best_score = -1.0;
    for (Index j = 0; j < y.cols(); ++j) {
      if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
      if (scores(j) > best_score) {
        best_score = scores(j);
        best = j;
      }
    }
    picked.push_back(best);
    chosen.conservativeResize(l, i + 1);
    chosen.col(i) = y.col(best);
  }
  return picked;
}

MixingMatrix vca_init(const SpectralDataset& dataset, Index p, std::uint64_t seed) {
  const std::vector<Index> picked = vca_select(dataset, p, seed);
  Matrix m(dataset.band_count(), p);
  for (Index i = 0; i < p; ++i) m.col(i) = dataset.data().col(picked[static_cast<std::size_t>(i)]);
  // Separate stream so perturbations do not depend on how many directions were drawn.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return make_nonsingular(std::move(m), rng);
}

MixingMatrix random_columns(const SpectralDataset& dataset, Index p, std::uint64_t seed) {
  check_sizes(dataset, p, "random_columns");
  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(dataset.pixel_count()));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  Matrix m(dataset.band_count(), p);
  for (Index i = 0; i < p; ++i) m.col(i) = dataset.data().col(order[static_cast<std::size_t>(i)]);
  return make_nonsingular(std::move(m), rng);
}

}  // namespace mvs
