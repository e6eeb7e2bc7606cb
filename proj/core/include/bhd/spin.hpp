#pragma once

#include "bhd/linalg.hpp"

#include <vector>

namespace bhd {

/// Collective spin S = N/2 in the Dicke basis |m>, m = -N/2 ... +N/2
/// (index j = m + N/2).
///
/// Sx is real symmetric tridiagonal. Sy = -i K with K real antisymmetric,
/// stored through the same band: <m+1|Sy|m> = -i b_m, <m|Sy|m+1> = +i b_m,
/// where b_m = <m+1|Sx|m>. Sz is diagonal.
class SpinOperators {
 public:
  explicit SpinOperators(int n_particles);

  int particles() const { return n_; }
  Eigen::Index dim() const { return n_ + 1; }
  double spin() const { return 0.5 * n_; }

  /// m values, ascending.
  const RealVector& m() const { return m_; }
  const Tridiagonal& sx() const { return sx_; }
  /// Band b_m shared by Sx and Sy.
  const RealVector& band() const { return sx_.off_diagonal(); }

  RealMatrix sx_dense() const { return sx_.dense(); }
  Matrix sy_dense() const;
  RealMatrix sz_dense() const { return m_.asDiagonal(); }
  /// Sy^2, which is real.
  RealMatrix sy2_dense() const;

  Vector apply_sx(const Vector& v) const { return sx_ * v; }
  Vector apply_sy(const Vector& v) const;
  Vector apply_sz(const Vector& v) const { return m_.cwiseProduct(v); }

 private:
  int n_;
  RealVector m_;
  Tridiagonal sx_;
};

/// Direction on the Bloch sphere. `phi` is the Bloch azimuth, so that
/// <Sx> + i<Sy> is proportional to exp(+i phi). The dimer phase-space
/// coordinate is the negative of it (see ClassicalState).
struct BlochAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // (-pi, pi]

  void validate() const;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Spin coherent state pointing along `angles`, with amplitudes
/// sqrt(C(N, S+m)) cos(theta/2)^(S+m) sin(theta/2)^(S-m) exp(i (S-m) phi),
/// evaluated in log space.
StateVector coherent_state(int n_particles, const BlochAngles& angles);

/// The component n.S along a Bloch direction, held as
/// D (sin(theta) Sx + cos(theta) Sz) D^dagger with D = exp(-i phi Sz).
class SpinComponent {
 public:
  SpinComponent(const SpinOperators& ops, const BlochAngles& angles);

  const BlochAngles& angles() const { return angles_; }
  Vector apply(const Vector& v) const;
  Matrix dense() const;

  /// exp(i delta n.S) |v>.
  Vector exp_apply(double delta, const Vector& v) const;

 private:
  BlochAngles angles_;
  Tridiagonal rotated_;  // sin(theta) Sx + cos(theta) Sz
  Vector phases_;        // diagonal of D
};

/// Parity P = (-i)^N exp(-i pi Sx). On the Dicke basis it equals
/// (-1)^N F with F|m> = |-m>.
class Parity {
 public:
  explicit Parity(int n_particles);

  int particles() const { return n_; }
  Eigen::Index dim() const { return n_ + 1; }
  /// Overall sign s in P = s F.
  int sign() const { return sign_; }

  Vector apply(const Vector& v) const;
  RealMatrix dense() const;

  /// Orthonormal real basis of the P = +1 (sector 0) or P = -1 (sector 1)
  /// eigenspace; column k is supported on {j_k, N - j_k} with j_k ascending.
  RealMatrix sector_basis(int sector) const;
  Eigen::Index sector_dim(int sector) const;

  /// Projection of a tridiagonal operator commuting with F onto a sector.
  /// The result is again tridiagonal in the sector_basis ordering.
  Tridiagonal project(const Tridiagonal& op, int sector) const;

 private:
  int n_;
  int sign_;
};

/// The parity operator as a dense complex matrix, built literally from
/// (-i)^N exp(-i pi Sx) through an eigendecomposition of Sx.
Matrix parity_operator_dense(const SpinOperators& ops);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

/// <psi|op|psi> and <op^2> - <op>^2. Rejects non-Hermitian `op` and a
/// mean whose imaginary part exceeds 1e-10.
MeanVariance expectation_and_variance(const StateVector& state, const Eigen::Ref<const Matrix>& op,
                                      double hermiticity_tol = 1e-10);
MeanVariance expectation_and_variance(const StateVector& state, const SpinComponent& op);

/// Mean and variance in the maximally mixed state I/d, via traces.
MeanVariance maximally_mixed_moments(const Eigen::Ref<const Matrix>& op);

}  // namespace bhd
