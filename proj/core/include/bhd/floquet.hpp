#pragma once

#include "bhd/dynamics.hpp"
#include "bhd/linalg.hpp"
#include "bhd/spin.hpp"

#include <array>
#include <vector>

namespace bhd {

/// Eigen-decomposition of a one-period propagator:
/// U(T)|phi_a> = exp(-i eps_a T)|phi_a>.
struct FloquetDecomposition {
  Matrix modes;              // column a is |phi_a>
  RealVector quasienergies;  // folded to (-omega/2, omega/2]
  std::vector<int> parities; // +1 / -1, or 0 when unresolved
  double omega = 0.0;

  double max_residual = 0.0;        // max_a ||U phi_a - exp(-i eps_a T) phi_a||
  double gram_defect = 0.0;         // max |Phi^dagger Phi - I|
  double max_modulus_defect = 0.0;  // max_a ||lambda_a| - 1|
  /// Largest |<P>| deficit 1 - |<phi_a|P|phi_a>| when parities were resolved.
  double max_parity_impurity = 0.0;
  /// Max magnitude of the parity-mixing blocks of U, when built from sectors.
  double off_block_magnitude = 0.0;

  Eigen::Index size() const { return quasienergies.size(); }
  double period() const;
};

/// Folds a quasienergy into (-omega/2, omega/2].
double fold_quasienergy(double eps, double omega);

/// Schur-based decomposition of a unitary U(T). The Schur vectors of a
/// normal matrix are its eigenvectors, so the modes come out orthonormal
/// even inside degenerate clusters. When `parity` is given, clusters whose
/// quasienergies lie within cluster_gap * omega of each other are rotated to
/// diagonalise P and every mode receives a parity label.
FloquetDecomposition floquet_decompose(const Matrix& U, double omega, const Parity* parity = nullptr,
                                       double cluster_gap = 1e-10);

/// Decomposition from the parity blocks; every mode is a parity eigenstate
/// by construction.
FloquetDecomposition floquet_decompose(const SectorPropagator& U, double omega);

struct ParitySplit {
  std::array<std::vector<Eigen::Index>, 2> sectors;  // 0: P = +1, 1: P = -1
  RealVector expectation;                            // <phi_a|P|phi_a>
  std::vector<Eigen::Index> ambiguous;               // |<P>| <= 1 - purity_tol
};

/// Groups modes by the sign of <P>, reporting those with |<P>| <= 1 - purity_tol.
ParitySplit sort_by_parity(const FloquetDecomposition& decomp, const Parity& parity, double purity_tol = 1e-6);

/// Quasienergies of the listed modes, sorted ascending.
std::vector<double> sector_quasienergies(const FloquetDecomposition& decomp, const std::vector<Eigen::Index>& modes);

}  // namespace bhd
