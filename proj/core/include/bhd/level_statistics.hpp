#pragma once

#include "bhd/floquet.hpp"
#include "bhd/statistics.hpp"

#include <array>
#include <random>
#include <span>
#include <vector>

namespace bhd {

/// Nearest-neighbour statistics of one symmetry sector of a circular spectrum.
struct LevelStatistics {
  std::vector<double> spacings;             // delta_n, including the wrap-around interval
  std::vector<double> ratios;               // r_n = min(delta_n, delta_n+1) / max(...), cyclic
  double mean_ratio = 0.0;
  std::vector<double> normalized_spacings;  // spacings / mean spacing
};

/// Statistics of levels `sorted` (ascending) on a circle of circumference
/// `circumference`. Rejects fewer than three levels.
LevelStatistics level_spacing_ratios(std::span<const double> sorted, double circumference);

struct SpectrumStatistics {
  std::array<LevelStatistics, 2> sectors;
  /// Mean of the ratios of both sectors together.
  double pooled_mean_ratio = 0.0;
  /// Standard deviation of the pooled ratios over sqrt(count).
  double pooled_std_error = 0.0;
  std::vector<double> pooled_normalized_spacings;
};

/// Per-sector statistics of the quasienergies, pooled afterwards.
SpectrumStatistics spectrum_statistics(const FloquetDecomposition& decomp, const ParitySplit& split);

/// Mean ratio when sectors are NOT separated; a regression probe for the
/// sorting step, since superposed independent spectra look more Poissonian.
double unsorted_mean_ratio(const FloquetDecomposition& decomp);

/// 2 ln 2 - 1, the mean ratio of uncorrelated (Poisson) levels.
double poisson_mean_ratio();

/// Eigenphases in (-pi, pi] of a circular-orthogonal-ensemble matrix W^T W,
/// W Haar-distributed on U(dim).
std::vector<double> sample_coe_eigenphases(int dim, std::mt19937_64& rng);

/// Positions on a circle of `count` levels with i.i.d. unit-mean exponential
/// spacings; the circumference is the sum of the spacings.
struct PoissonLevels {
  std::vector<double> levels;
  double circumference = 0.0;
};
PoissonLevels sample_poisson_levels(int count, std::mt19937_64& rng);

/// Mean ratio over `draws` COE matrices of size `dim`.
double sampled_coe_mean_ratio(int dim, int draws, std::uint64_t seed);

}  // namespace bhd
