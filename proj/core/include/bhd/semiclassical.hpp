#pragma once

#include "bhd/drive.hpp"
#include "bhd/phase_space.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace bhd {

struct PhaseVelocity {
  double dz = 0.0;
  double dphi = 0.0;
};

/// Mean-field equations of motion, obtained from the Heisenberg equations of
/// H(t) = 2U Sz^2 - 2J(t) Sx in the large-N limit:
///
///   dz/dt   =  2J sqrt(1-z^2) sin(phi)
///   dphi/dt = -2(NU z + J z cos(phi) / sqrt(1-z^2))
///
/// These conserve h(z, phi) = NU z^2/2 - J sqrt(1-z^2) cos(phi) when J is
/// constant (time is rescaled by -2 relative to the canonical flow of h).
PhaseVelocity mean_field_rhs(const ClassicalState& s, double t, const DriveProtocol& drive);

/// h(z, phi, t) = NU z^2/2 - J(t) sqrt(1-z^2) cos(phi).
double classical_energy(const ClassicalState& s, double t, const DriveProtocol& drive);

/// d(dz/dt, dphi/dt)/d(z, phi); traceless.
Eigen::Matrix2d mean_field_jacobian(const ClassicalState& s, double t, const DriveProtocol& drive);

/// Local error tolerances of the adaptive RKF7(8) stepper. Global errors
/// run about ten to a hundred times larger over tens of time units.
struct ClassicalOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  /// |z| is clamped to 1 - pole_margin; each clamp is counted as an event.
  double pole_margin = 1e-12;
};

struct FlowResult {
  ClassicalState state;
  /// d(z, phi)(t1) / d(z, phi)(t0), filled by flow_with_tangent only.
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
  int pole_events = 0;
};

/// Integrates from t0 to t1 (t1 < t0 runs backwards). phi is wrapped on return.
FlowResult flow(const ClassicalState& s, const DriveProtocol& drive, double t0, double t1,
                const ClassicalOptions& options = {});

/// As flow, co-integrating the variational equations.
FlowResult flow_with_tangent(const ClassicalState& s, const DriveProtocol& drive, double t0, double t1,
                             const ClassicalOptions& options = {});

struct PoincareSection {
  /// orbits[i][k] is initial condition i at t = kT, k = 0..n_periods.
  std::vector<std::vector<ClassicalState>> orbits;
  std::vector<int> pole_events;  // per orbit
  int total_pole_events = 0;
};

/// Stroboscopic samples of each trajectory. Requires omega > 0.
PoincareSection poincare_section(std::span<const ClassicalState> initials, const DriveProtocol& drive,
                                 int n_periods, const ClassicalOptions& options = {}, int workers = 1);

/// n evenly spaced initial conditions along the z axis at phi = 0 and along
/// the phi axis at z = 0 (half each), cell-centred.
std::vector<ClassicalState> poincare_initials(int count);

struct LyapunovOptions {
  int transient_periods = 50;
  /// Fraction of the accumulated periods averaged into the tail estimate.
  double tail_fraction = 0.5;
  /// Converged when |lambda - tail| <= max(tail_abs_tol, tail_rel_tol |lambda|).
  double tail_abs_tol = 2e-3;
  double tail_rel_tol = 0.05;
  ClassicalOptions integration{};
};

struct LyapunovEstimate {
  double lambda = 0.0;       // mean log stretch per unit time after the transient
  double tail_lambda = 0.0;  // the same over the last tail_fraction of periods
  bool converged = false;
  int periods = 0;           // periods accumulated (transient excluded)
  std::vector<double> stretch;  // log stretch factor of each accumulated period
  int pole_events = 0;
};

/// Benettin estimate of the largest Lyapunov exponent from the tangent flow,
/// renormalised once per drive period, over t in [0, t_max].
LyapunovEstimate classical_lyapunov(const ClassicalState& s0, const DriveProtocol& drive, double t_max,
                                    const LyapunovOptions& options = {});

/// Finite-separation estimate: a companion trajectory at distance `offset`
/// is pulled back to that distance along the separation after every period.
LyapunovEstimate two_trajectory_lyapunov(const ClassicalState& s0, const DriveProtocol& drive, double t_max,
                                         double offset = 1e-8, const LyapunovOptions& options = {});

}  // namespace bhd
