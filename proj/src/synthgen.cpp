#include "mvs/synthgen.hpp"

#include <cmath>
#include <sstream>

namespace mvs {
namespace {

// Independent substreams of one user seed.
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void check_alpha(const Vector& alpha) {
  if (alpha.size() < 1) throw std::invalid_argument("dirichlet alpha must be non-empty");
  if (!alpha.allFinite() || alpha.minCoeff() <= 0.0) {
    throw std::invalid_argument("dirichlet alpha entries must be finite and > 0");
  }
}

}  // namespace

Vector SimulationSpec::alpha() const {
  return dirichlet_alpha.size() == 0 ? Vector::Ones(p) : dirichlet_alpha;
}

void SimulationSpec::validate() const {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (n < p) {
    std::ostringstream msg;
    msg << "n = " << n << " must be >= p = " << p;
    throw std::invalid_argument(msg.str());
  }
  if (band_count() < p) throw std::invalid_argument("bands must be >= p");
  const Vector a = alpha();
  if (a.size() != p) throw std::invalid_argument("dirichlet alpha must have length p");
  check_alpha(a);
  if (!(purity_threshold > 1.0 / static_cast<double>(p)) || purity_threshold > 1.0) {
    throw std::invalid_argument("purity threshold must lie in (1/p, 1]");
  }
  if (std::isnan(snr_db) || snr_db == -kNoNoise) throw std::invalid_argument("invalid snr_db");
  if (pure_pixels && purity_threshold != 1.0) {
    throw std::invalid_argument("pure pixels require purity threshold 1");
  }
}

DirichletSampler::DirichletSampler(Vector alpha, std::uint64_t seed)
    : alpha_(std::move(alpha)), rng_(seed) {
  check_alpha(alpha_);
}

void DirichletSampler::draw(Eigen::Ref<Vector> out) {
  const Index p = alpha_.size();
  double total = 0.0;
  do {
    total = 0.0;
    for (Index i = 0; i < p; ++i) {
      std::gamma_distribution<double> gamma(alpha_(i), 1.0);
      out(i) = gamma(rng_);
      total += out(i);
    }
  } while (!(total > 0.0));
  out /= total;
}

AbundanceMatrix sample_dirichlet(const Vector& alpha, Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dirichlet: n must be >= 1");
  DirichletSampler sampler(alpha, seed);
  Matrix s(alpha.size(), n);
  for (Index j = 0; j < n; ++j) sampler.draw(s.col(j));
  return AbundanceMatrix::on_simplex(std::move(s), 1e-12);
}

MixingMatrix random_mixing_matrix(Index l, Index p, std::uint64_t seed) {
  if (p < 1 || l < p) throw std::invalid_argument("random_mixing_matrix: need l >= p >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Matrix m = Matrix::NullaryExpr(l, p, [&]() { return unif(rng); });
    bool ok = false;
    if (l == p) {
      ok = std::abs(m.partialPivLu().determinant()) >= 1e-6;
    } else {
      Eigen::JacobiSVD<Matrix> svd(m);
      ok = svd.singularValues()(p - 1) >= 1e-6;
    }
    if (ok) return MixingMatrix(std::move(m));
  }
  throw NumericalError("random_mixing_matrix: 100 draws failed the conditioning floor");
}

RejectionResult reject_pure(const AbundanceMatrix& s, double threshold, Index target_n,
                            DirichletSampler& resample) {
  const Index p = s.endmember_count();
  if (!(threshold > 1.0 / static_cast<double>(p)) || threshold > 1.0) {
    throw std::invalid_argument("reject_pure: threshold must lie in (1/p, 1]");
  }
  if (resample.dim() != p) throw std::invalid_argument("reject_pure: sampler dimension mismatch");
  if (target_n < 1) throw std::invalid_argument("reject_pure: target_n must be >= 1");

  Matrix out(p, target_n);
  std::size_t examined = 0;
  Index filled = 0;
  for (Index j = 0; j < s.pixel_count() && filled < target_n; ++j) {
    ++examined;
    if (s.matrix().col(j).maxCoeff() <= threshold) out.col(filled++) = s.matrix().col(j);
  }
  constexpr std::size_t kMaxConsecutiveRejects = 1000000;
  Vector col(p);
  std::size_t streak = 0;
  while (filled < target_n) {
    resample.draw(col);
    ++examined;
    if (col.maxCoeff() <= threshold) {
      out.col(filled++) = col;
      streak = 0;
    } else if (++streak >= kMaxConsecutiveRejects) {
      throw std::runtime_error("reject_pure: acceptance probability too low (1e6 rejects in a row)");
    }
  }
  return RejectionResult{AbundanceMatrix::on_simplex(std::move(out), 1e-12), examined,
                         static_cast<std::size_t>(target_n)};
}

double realized_snr_db(const Matrix& clean, const Matrix& noisy) {
  return 10.0 * std::log10(clean.squaredNorm() / (noisy - clean).squaredNorm());
}

SpectralDataset add_noise_snr(const SpectralDataset& y, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("add_noise_snr: snr_db is NaN");
  const double signal = y.data().norm();
  if (signal == 0.0) throw std::invalid_argument("add_noise_snr: all-zero signal");
  if (snr_db == kNoNoise) return y;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix noise = Matrix::NullaryExpr(y.band_count(), y.pixel_count(), [&]() { return normal(rng); });
  const double target = signal * std::pow(10.0, -snr_db / 20.0);
  noise *= target / noise.norm();
  return SpectralDataset(y.data() + noise);
}

SimulatedScene generate(const SimulationSpec& spec) {
  spec.validate();
  const Vector alpha = spec.alpha();
  MixingMatrix m = random_mixing_matrix(spec.band_count(), spec.p, substream(spec.seed, 1));

  const Index vertices = spec.pure_pixels ? spec.p : 0;
  const Index mixed = spec.n - vertices;
  Matrix s(spec.p, spec.n);
  s.leftCols(vertices).setIdentity();
  double acceptance_rate = 1.0;
  if (mixed > 0) {
    DirichletSampler sampler(alpha, substream(spec.seed, 2));
    Matrix raw(spec.p, mixed);
    for (Index j = 0; j < mixed; ++j) sampler.draw(raw.col(j));
    const RejectionResult kept =
        reject_pure(AbundanceMatrix::on_simplex(std::move(raw), 1e-12), spec.purity_threshold,
                    mixed, sampler);
    s.rightCols(mixed) = kept.abundances.matrix();
    acceptance_rate = kept.acceptance_rate();
  }
  AbundanceMatrix abundances = AbundanceMatrix::on_simplex(std::move(s), 1e-12);

  SpectralDataset clean(m.matrix() * abundances.matrix());
  SpectralDataset noisy = add_noise_snr(clean, spec.snr_db, substream(spec.seed, 3));
  return SimulatedScene{std::move(noisy), std::move(m), std::move(abundances), acceptance_rate};
}

}  // namespace mvs
