#pragma once

#include "bhd/drive.hpp"
#include "bhd/dynamics.hpp"
#include "bhd/phase_space.hpp"
#include "bhd/spin.hpp"
#include "bhd/statistics.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bhd {

/// w = cos(phi) sin(theta) Sx + sin(phi) sin(theta) Sy + cos(theta) Sz, the
/// spin component along the coherent-state direction; coherent_state(angles)
/// is its eigenvector with eigenvalue N/2.
SpinComponent local_generator(const BlochAngles& angles, const SpinOperators& ops);

enum class FotocForm { Echo, Variance };

const char* to_string(FotocForm form);

struct FotocTrace {
  std::vector<double> times;   // units of 1/J0
  std::vector<double> values;  // C(t)
  double delta = 0.0;
  BlochAngles centre;
  DriveProtocol drive;
  FotocForm form = FotocForm::Variance;
  int steps_per_period = 0;
  /// Max |1 - ||psi(t)||| over the samples.
  double norm_defect = 0.0;
};

struct FotocOptions {
  /// Fixed steps per period, or 0 to calibrate on the initial state.
  int steps_per_period = 0;
  double tol = 1e-8;
  StepSearch search{};
};

/// Steps per period for propagating `probe` (columns) under `drive`.
int fotoc_steps(const DriveProtocol& drive, const SpinOperators& ops, const Matrix& probe, const FotocOptions& options);

/// C(t) = delta^2 Var(w) in |psi(t)>. `times` ascending, nonnegative.
FotocTrace fotoc_variance(const StateVector& state0, const SpinComponent& w, const DriveProtocol& drive, double delta,
                          const std::vector<double>& times, const FotocOptions& options = {});
FotocTrace fotoc_variance(const StateVector& state0, const Matrix& w, const DriveProtocol& drive, double delta,
                          const std::vector<double>& times, const FotocOptions& options = {});

/// C(t) = 1 - |<psi0| U(t)^dagger exp(i delta w) U(t) |psi0>|^2, which is
/// <|[W(t), V]|^2> for V = |psi0><psi0| and W = exp(i delta w). Evaluated as
/// a literal echo: forward to t, kick, and back to 0 over the reversed grid.
FotocTrace fotoc_echo(const StateVector& state0, const SpinComponent& w, const DriveProtocol& drive, double delta,
                      const std::vector<double>& times, const FotocOptions& options = {});
FotocTrace fotoc_echo(const StateVector& state0, const Matrix& w, const DriveProtocol& drive, double delta,
                      const std::vector<double>& times, const FotocOptions& options = {});

/// delta^2 N (N + 2) / 12: the infinite-temperature value of delta^2 Var(w).
double diagonal_ensemble_fotoc(int n_particles, double delta);

/// Uniform sample instants 0, dt, 2 dt, ... up to and including t_max.
std::vector<double> uniform_times(double t_max, double dt);

struct LyapunovFitOptions {
  /// Manual window; the automatic choice is used for whichever is unset.
  std::optional<double> t_lo;
  std::optional<double> t_hi;
  double onset_factor = 100.0;     // C exceeds onset_factor * floor
  double ceiling_fraction = 0.1;   // C exceeds ceiling_fraction * c_diag
  double ehrenfest_fraction = 0.5; // C reaches ehrenfest_fraction * c_diag
  int min_points = 20;
  double min_r_squared = 0.98;
};

struct LyapunovFit {
  /// True when an exponential window was found and fitted with r^2 >= min.
  bool accepted = false;
  /// Empty when accepted; otherwise why the trace counts as non-exponential.
  std::string reason;
  double lambda_q = 0.0;  // slope of ln C, units of J0
  double intercept = 0.0;
  double t_lo = std::numeric_limits<double>::quiet_NaN();
  double t_hi = std::numeric_limits<double>::quiet_NaN();
  int points = 0;
  double r_squared = 0.0;
  /// Delay-phase level: median of C over (0, t_hi].
  double floor = 0.0;
  /// First time C >= ehrenfest_fraction * c_diag, NaN if never.
  double ehrenfest_time = std::numeric_limits<double>::quiet_NaN();
};

/// Linear regression of ln C(t) on the window
/// [first t with C > onset_factor * floor, first t with C > ceiling_fraction * c_diag],
/// where the floor is the median of C over (0, t_hi]. A trace without such a
/// window is reported as not exponential rather than thrown.
LyapunovFit fit_quantum_lyapunov(const FotocTrace& trace, double c_diag, const LyapunovFitOptions& options = {});

struct SaturationValue {
  double mean = 0.0;
  double t_from = 0.0;
  double t_to = 0.0;
  int points = 0;
};

/// Mean of C over the final `fraction` of the samples.
SaturationValue saturation_mean(const FotocTrace& trace, double fraction = 0.25);

struct FotocGridOptions {
  FotocOptions propagation{};
  int histogram_bins = 40;
  double histogram_hi = 2.0;  // in units of c_diag; the range starts at 0
  int workers = 1;
};

struct FotocGrid {
  PhaseSpaceGrid grid;
  double t_eval = 0.0;
  double delta = 0.0;
  double c_diag = 0.0;
  int steps_per_period = 0;
  /// C / c_diag per grid point in grid order; NaN marks a failed point.
  std::vector<double> scaled;
  std::vector<std::string> errors;  // per point, empty when valid
  int invalid = 0;
  Histogram histogram;  // of the valid scaled values
  double mean = 0.0;
  double variance = 0.0;
};

/// Variance-form FOTOC at t_eval for the coherent state at every grid point,
/// each with its own local generator.
FotocGrid fotoc_grid(const DriveProtocol& drive, const PhaseSpaceGrid& grid, double t_eval, double delta,
                     const FotocGridOptions& options = {});

}  // namespace bhd
