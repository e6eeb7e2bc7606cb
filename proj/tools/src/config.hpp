#pragma once

#include "bhd/drive.hpp"
#include "bhd/phase_space.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bhd::cli {

struct DriveConfig {
  int n = 300;
  double nu = -1.0;
  double j0 = 1.0;
  double mu = 1.5;
  std::vector<double> omegas{0.5};

  DriveProtocol at(double omega) const { return DriveProtocol::from_nu(n, nu, j0, mu, omega); }
  DriveProtocol at(double omega, int particles) const { return DriveProtocol::from_nu(particles, nu, j0, mu, omega); }
};

struct PoincareConfig {
  int initial_conditions = 20;
  int n_periods = 1000;
  double tol = 1e-12;
};

struct PropagationConfig {
  double tol = 1e-8;
  double unitarity_tol = 1e-9;
};

struct SpectrumConfig {
  int magnus_order = 2;
  int spacing_bins = 30;
  double spacing_hi = 4.0;
  int entropy_bins = 30;
  /// COE surrogate matrices per omega for a sampled reference <r>; 0 skips.
  int coe_draws = 0;
  /// "floquet_in_effective": each Floquet mode over the effective eigenbasis;
  /// "effective_in_floquet" swaps the roles.
  std::string entropy_basis = "floquet_in_effective";
};

struct FotocCentre {
  std::string label;
  double z = 0.0;
  double phi = 0.0;
  double omega = 0.5;
  /// Particle numbers; empty means drive.n.
  std::vector<int> n;
  /// Overrides fotoc.t_max when positive.
  double t_max = 0.0;
};

struct FotocConfig {
  double delta = 1e-2;
  double t_max = 30.0;
  double dt = 0.05;
  std::string form = "variance";  // or "echo"
  std::vector<FotocCentre> centres;
  std::optional<double> fit_t_lo;
  std::optional<double> fit_t_hi;
  double saturation_fraction = 0.25;
};

struct FotocGridConfig {
  std::vector<double> t_eval{30.0};
  int histogram_bins = 40;
  double histogram_hi = 2.0;
};

struct RunConfig {
  std::string name = "custom";
  DriveConfig drive;
  PhaseSpaceGrid grid;
  PoincareConfig poincare;
  PropagationConfig propagation;
  SpectrumConfig spectrum;
  FotocConfig fotoc;
  FotocGridConfig fotoc_grid;
  std::string output_dir = "out";
  int workers = 1;
  std::uint64_t seed = 0;

  /// Checks physical and numerical parameters common to every command.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig from_json(const nlohmann::json& j);

RunConfig load_config(const std::string& path);

/// Named presets for the standard figure sets: fig1, fig2, fig3.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// SHA-256 (hex) of the canonical JSON serialisation without output_dir and
/// workers, which do not affect any numeric result.
std::string config_hash(const RunConfig& c);

}  // namespace bhd::cli
