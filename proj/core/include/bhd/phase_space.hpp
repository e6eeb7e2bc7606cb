#pragma once

#include "bhd/spin.hpp"

#include <vector>

namespace bhd {

/// A point of the reduced mean-field phase space. z = 2<Sz>/N is the
/// population imbalance and phi = -arg(<Sx> + i<Sy>) the relative phase,
/// i.e. the negated Bloch azimuth.
struct ClassicalState {
  double z = 0.0;    // [-1, 1]
  double phi = 0.0;  // (-pi, pi]

  void validate() const;
};

BlochAngles to_bloch(const ClassicalState& s);
ClassicalState from_bloch(const BlochAngles& a);

/// Rectangular lattice over the phase space: n_phi points uniform on
/// (-pi, pi] (the -pi end excluded) by n_z cell-centred points in (-1, 1).
/// Points are ordered z-major: index = iz * n_phi + iphi.
struct PhaseSpaceGrid {
  int n_phi = 21;
  int n_z = 20;

  std::size_t size() const { return static_cast<std::size_t>(n_phi) * static_cast<std::size_t>(n_z); }
  double phi_at(int iphi) const;
  double z_at(int iz) const;
  ClassicalState at(std::size_t index) const;
  std::vector<ClassicalState> points() const;
};

}  // namespace bhd
