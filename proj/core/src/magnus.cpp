#include "bhd/magnus.hpp"

#include "bhd/error.hpp"

#include <numbers>

namespace bhd {

RealMatrix magnus_second_order(const DriveProtocol& drive, const SpinOperators& ops) {
  if (ops.particles() != drive.N) throw InvalidArgument("magnus_second_order: operators built for a different N");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double u = drive.U, mu = drive.mu, j0 = drive.J0;
  const RealMatrix sx = ops.sx_dense();
  const RealVector& m = ops.m();
  // Sz Sx Sz has entries m_i m_j (Sx)_ij.
  const RealMatrix szsxsz = m.asDiagonal() * sx * m.asDiagonal();
  RealMatrix sy2_minus_sz2 = ops.sy2_dense();
  sy2_minus_sz2.diagonal() -= m.cwiseProduct(m);
  return (2.0 * mu * u * u / pi2) * (sx + 4.0 * szsxsz) + (mu * u / pi2) * (mu - 4.0 * j0) * sy2_minus_sz2;
}

RealMatrix effective_hamiltonian(const DriveProtocol& drive, const SpinOperators& ops, int order) {
  if (order != 0 && order != 2) throw InvalidArgument("effective_hamiltonian: order must be 0 or 2");
  if (ops.particles() != drive.N) throw InvalidArgument("effective_hamiltonian: operators built for a different N");
  RealMatrix h = -2.0 * drive.J0 * ops.sx_dense();
  h.diagonal() += 2.0 * drive.U * ops.m().cwiseProduct(ops.m());
  if (order == 2 && drive.modulated()) {
    const double period = drive.period();
    h += period * period * magnus_second_order(drive, ops);
  }
  return h;
}

}  // namespace bhd
