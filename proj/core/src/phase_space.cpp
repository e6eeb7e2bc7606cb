#include "bhd/phase_space.hpp"

#include "bhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bhd {

void ClassicalState::validate() const {
  if (!(z >= -1.0 && z <= 1.0)) throw InvalidArgument("ClassicalState: z outside [-1, 1]");
  if (!(phi > -std::numbers::pi - 1e-12 && phi <= std::numbers::pi + 1e-12)) {
    throw InvalidArgument("ClassicalState: phi outside (-pi, pi]");
  }
}

BlochAngles to_bloch(const ClassicalState& s) {
  return BlochAngles{std::acos(std::clamp(s.z, -1.0, 1.0)), wrap_angle(-s.phi)};
}

ClassicalState from_bloch(const BlochAngles& a) { return ClassicalState{std::cos(a.theta), wrap_angle(-a.phi)}; }

double PhaseSpaceGrid::phi_at(int iphi) const {
  return -std::numbers::pi + 2.0 * std::numbers::pi * (iphi + 1) / n_phi;
}

double PhaseSpaceGrid::z_at(int iz) const { return -1.0 + (2.0 * iz + 1.0) / n_z; }

ClassicalState PhaseSpaceGrid::at(std::size_t index) const {
  if (n_phi < 1 || n_z < 1) throw InvalidArgument("PhaseSpaceGrid: dimensions must be positive");
  const int iz = static_cast<int>(index / static_cast<std::size_t>(n_phi));
  const int iphi = static_cast<int>(index % static_cast<std::size_t>(n_phi));
  return ClassicalState{z_at(iz), phi_at(iphi)};
}

std::vector<ClassicalState> PhaseSpaceGrid::points() const {
  std::vector<ClassicalState> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
  return out;
}

}  // namespace bhd
