#pragma once

#include <cstdint>
#include <vector>

#include "mvs/model.hpp"

namespace mvs {

/// Simplified vertex component analysis.
///
/// Picks p data columns one at a time. Each pick maximizes |f^T y| over the
/// pixels, where f is a seeded Gaussian direction projected onto the
/// orthogonal complement of the columns already chosen. On noiseless data
/// with pure pixels this returns the simplex vertices.
///
/// If the selected columns are numerically dependent, each column is
/// perturbed by 1e-6 * ||column|| along a random unit direction, up to 10
/// attempts, before giving up with NumericalError.
MixingMatrix vca_init(const SpectralDataset& dataset, Index p, std::uint64_t seed);

/// p distinct, uniformly chosen data columns (same singularity fallback).
MixingMatrix random_columns(const SpectralDataset& dataset, Index p, std::uint64_t seed);

/// Column indices picked by `vca_init` before any perturbation.
std::vector<Index> vca_select(const SpectralDataset& dataset, Index p, std::uint64_t seed);

}  // namespace mvs
