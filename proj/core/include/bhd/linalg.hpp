#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace bhd {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Amplitudes in the Dicke basis, ordered by ascending m = -N/2 ... +N/2.
using StateVector = Eigen::VectorXcd;

/// Real symmetric tridiagonal matrix, stored as its diagonal and first
/// off-diagonal. Every Hamiltonian of the dimer is of this form.
class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(RealVector diagonal, RealVector off_diagonal);

  static Tridiagonal zero(Eigen::Index n);

  Eigen::Index size() const { return diag_.size(); }
  const RealVector& diagonal() const { return diag_; }
  const RealVector& off_diagonal() const { return off_; }

  /// y = T x, column by column. x and y must not alias.
  void apply(const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> y) const;
  Vector operator*(const Vector& x) const;

  RealMatrix dense() const;

  /// Gershgorin enclosure [lo, hi] of the spectrum.
  std::pair<double, double> spectral_bounds() const;

  /// a*A + b*B for equally sized operands.
  static Tridiagonal combine(double a, const Tridiagonal& A, double b, const Tridiagonal& B);

 private:
  RealVector diag_;
  RealVector off_;
};

/// Applies exp(-i H dt) to every column of `block` in place, using a
/// Chebyshev expansion whose truncation error is below `eps` in the
/// 2-norm of each column. dt may be negative.
void expm_apply(const Tridiagonal& H, double dt, Eigen::Ref<Matrix> block, double eps = 1e-15);

/// Number of Chebyshev terms expm_apply uses for a spectral half-width times |dt| of `x`.
int chebyshev_terms(double x, double eps = 1e-15);

/// Max-abs entry.
double max_abs(const Eigen::Ref<const Matrix>& m);

/// max |U^dagger U - I|.
double unitarity_defect(const Eigen::Ref<const Matrix>& u);

}  // namespace bhd
