#include "bhd/drive.hpp"

#include "bhd/error.hpp"

#include <cmath>
#include <numbers>

namespace bhd {

DriveProtocol DriveProtocol::from_nu(int n, double nu, double j0, double mu, double omega) {
  if (n < 1) throw InvalidArgument("DriveProtocol: particle number must be >= 1");
  return DriveProtocol{n, nu / n, j0, mu, omega};
}

double DriveProtocol::tunneling(double t) const { return J0 + mu * std::cos(omega * t); }

double DriveProtocol::period() const {
  if (!(omega > 0.0)) throw InvalidArgument("DriveProtocol: period requires omega > 0");
  return 2.0 * std::numbers::pi / omega;
}

void DriveProtocol::validate() const {
  if (N < 1) throw InvalidArgument("DriveProtocol: particle number must be >= 1");
  if (!std::isfinite(U) || !std::isfinite(J0) || !std::isfinite(mu) || !std::isfinite(omega)) {
    throw InvalidArgument("DriveProtocol: non-finite parameter");
  }
  if (modulated() && !(omega > 0.0)) throw InvalidArgument("DriveProtocol: modulated drive needs omega > 0");
}

SplitHamiltonian split_hamiltonian(const DriveProtocol& drive, const SpinOperators& ops) {
  if (ops.particles() != drive.N) throw InvalidArgument("split_hamiltonian: operators built for a different N");
  const RealVector m2 = ops.m().cwiseProduct(ops.m());
  return SplitHamiltonian{
      Tridiagonal(2.0 * drive.U * m2, RealVector::Zero(ops.dim() - 1)),
      Tridiagonal(RealVector::Zero(ops.dim()), -2.0 * ops.band()),
  };
}

Tridiagonal hamiltonian_at(const DriveProtocol& drive, double t, const SpinOperators& ops) {
  return split_hamiltonian(drive, ops).at(drive.tunneling(t));
}

}  // namespace bhd
