#pragma once

#include "bhd/linalg.hpp"
#include "bhd/spin.hpp"

namespace bhd {

/// Parameters of H(t) = 2U Sz^2 - 2J(t) Sx with J(t) = J0 + mu cos(omega t).
/// Time is measured in units of 1/J0 when J0 = 1.
struct DriveProtocol {
  int N = 1;
  double U = 0.0;
  double J0 = 1.0;
  double mu = 0.0;
  double omega = 0.0;

  /// Builds a drive from the scaled interaction NU.
  static DriveProtocol from_nu(int n, double nu, double j0, double mu, double omega);

  double nu() const { return N * U; }
  double tunneling(double t) const;
  /// 2 pi / omega. Requires omega > 0.
  double period() const;
  bool modulated() const { return mu != 0.0; }

  /// Throws InvalidArgument for N < 1, non-finite values, or a modulated
  /// drive with omega <= 0.
  void validate() const;
};

/// H(J) = fixed + J * coupled; the drive enters only through J(t).
struct SplitHamiltonian {
  Tridiagonal fixed;    // 2U Sz^2
  Tridiagonal coupled;  // -2 Sx

  Tridiagonal at(double j) const { return Tridiagonal::combine(1.0, fixed, j, coupled); }
};

SplitHamiltonian split_hamiltonian(const DriveProtocol& drive, const SpinOperators& ops);

/// The instantaneous Hamiltonian.
Tridiagonal hamiltonian_at(const DriveProtocol& drive, double t, const SpinOperators& ops);

}  // namespace bhd
