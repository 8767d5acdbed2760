#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "mvs/model.hpp"

namespace mvs {

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct SimulationSpec {
  Index p = 3;
  Index n = 10000;
  Index bands = 0;         // 0 means bands = p
  Vector dirichlet_alpha;  // empty means all ones
  double purity_threshold = 0.8;
  double snr_db = 40.0;  // kNoNoise disables noise
  // Make the first p pixels the endmembers themselves. Needs purity_threshold = 1.
  bool pure_pixels = false;
  std::uint64_t seed = 0;

  Index band_count() const { return bands == 0 ? p : bands; }
  Vector alpha() const;
  void validate() const;
};

/// Draws Dirichlet columns by normalizing independent Gamma(alpha_i, 1) samples.
class DirichletSampler {
 public:
  DirichletSampler(Vector alpha, std::uint64_t seed);

  Index dim() const { return alpha_.size(); }
  void draw(Eigen::Ref<Vector> out);

 private:
  Vector alpha_;
  std::mt19937_64 rng_;
};

AbundanceMatrix sample_dirichlet(const Vector& alpha, Index n, std::uint64_t seed);

/// l x p with i.i.d. U[0, 1] entries, redrawn (max 100 attempts) until
/// |det| >= 1e-6 when square, or sigma_min >= 1e-6 otherwise.
MixingMatrix random_mixing_matrix(Index l, Index p, std::uint64_t seed);

struct RejectionResult {
  AbundanceMatrix abundances;
  std::size_t examined = 0;  // columns tested, input plus fresh draws
  std::size_t accepted = 0;

  double acceptance_rate() const {
    return examined == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(examined);
  }
};

/// Keeps columns whose largest entry is <= threshold and tops up with fresh
/// draws from `resample` until exactly target_n columns are accepted.
RejectionResult reject_pure(const AbundanceMatrix& s, double threshold, Index target_n,
                            DirichletSampler& resample);

/// Adds Gaussian noise rescaled so that 10 log10(||Y||_F^2 / ||N||_F^2) = snr_db
/// exactly. snr_db = +inf returns the input unchanged.
SpectralDataset add_noise_snr(const SpectralDataset& y, double snr_db, std::uint64_t seed);

double realized_snr_db(const Matrix& clean, const Matrix& noisy);

struct SimulatedScene {
  SpectralDataset data;
  MixingMatrix mixing;
  AbundanceMatrix abundances;
  double acceptance_rate = 1.0;
};

SimulatedScene generate(const SimulationSpec& spec);

}  // namespace mvs
