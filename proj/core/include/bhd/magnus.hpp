#pragma once

#include "bhd/drive.hpp"
#include "bhd/linalg.hpp"
#include "bhd/spin.hpp"

namespace bhd {

/// High-frequency (Floquet-Magnus) effective Hamiltonian truncated at the
/// given order in T = 2 pi / omega:
///
///   order 0:  Omega0 = 2U Sz^2 - 2 J0 Sx
///   order 2:  Omega0 + T^2 Omega2, with
///             Omega2 = (2 mu U^2 / pi^2)(Sx + 4 Sz Sx Sz)
///                    + (mu U / pi^2)(mu - 4 J0)(Sy^2 - Sz^2).
///
/// There is no first-order term. The result is real symmetric (pentadiagonal).
RealMatrix effective_hamiltonian(const DriveProtocol& drive, const SpinOperators& ops, int order);

/// The second-order correction Omega2 alone.
RealMatrix magnus_second_order(const DriveProtocol& drive, const SpinOperators& ops);

}  // namespace bhd
