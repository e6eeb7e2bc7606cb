#pragma once

#include "bhd/floquet.hpp"
#include "bhd/phase_space.hpp"

#include <array>
#include <span>
#include <vector>

namespace bhd {

/// -sum p ln p with 0 ln 0 = 0. The weights must be nonnegative and sum to 1
/// within `sum_tol`.
double shannon_entropy(std::span<const double> weights, double sum_tol = 1e-8);

/// Entropy of a random state in a basis of size d drawn from the circular
/// orthogonal ensemble, ln(0.48 d).
double coe_entropy(double d);

enum class DelocalizationBasis {
  /// Entropy of each Floquet mode over the effective-Hamiltonian eigenbasis.
  FloquetInEffective,
  /// Entropy of each effective-Hamiltonian eigenstate over the Floquet modes.
  EffectiveInFloquet,
};

struct DelocalizationResult {
  DelocalizationBasis basis = DelocalizationBasis::FloquetInEffective;
  /// One entropy per distributed state, grouped by sector (sector 0 first).
  std::vector<double> entropies;
  std::vector<int> sector;  // 0 or 1 for each entry of `entropies`
  std::array<Eigen::Index, 2> sector_sizes{};
  double mean = 0.0;
  /// Mean of S / ln(sector size).
  double mean_scaled = 0.0;
  /// Max deviation of a weight row/column sum from 1.
  double completeness_defect = 0.0;
};

/// Shannon entropies of overlaps |<psi_n|phi_m>|^2 between Floquet modes
/// and eigenstates of `effective` (same dimension, parity-commuting),
/// computed inside each parity sector. Floquet modes without parity labels
/// are sorted with sort_by_parity first.
DelocalizationResult mode_delocalization(const FloquetDecomposition& decomp, const RealMatrix& effective,
                                         const Parity& parity,
                                         DelocalizationBasis basis = DelocalizationBasis::FloquetInEffective);

struct EntropyMap {
  std::vector<double> scaled;  // S / ln(N + 1), one per point
  double max_weight_defect = 0.0;
};

/// Entropy of the coherent state centred at each point, in the basis of all
/// N + 1 Floquet modes, scaled by ln(N + 1).
EntropyMap coherent_entropy_map(std::span<const ClassicalState> points, const FloquetDecomposition& decomp,
                                int workers = 1);

}  // namespace bhd
