#pragma once

#include "bhd/drive.hpp"
#include "bhd/linalg.hpp"
#include "bhd/spin.hpp"

#include <array>
#include <functional>
#include <vector>

namespace bhd {

/// Fixed-grid integrator for i d/dt psi = H(t) psi.
///
/// Each step of length h is the fourth-order commutator-free Magnus map
///   exp(-i h (a1 H(t1) + a2 H(t2))) exp(-i h (a2 H(t1) + a1 H(t2)))
/// with Gauss nodes t1 < t2 and a1 = 1/4 - sqrt(3)/6, a2 = 1/4 + sqrt(3)/6.
/// Both exponentials are applied with a Chebyshev expansion in the
/// tridiagonal H. The scheme is time-symmetric: advancing t1 -> t0 over the
/// same grid inverts advancing t0 -> t1 to rounding error.
///
/// An unmodulated drive is constant in time and is exponentiated exactly.
class Propagator {
 public:
  Propagator(const DriveProtocol& drive, SplitHamiltonian hamiltonian, int steps_per_period);

  /// Advances every column of `block` from t0 to t1 (t1 < t0 runs backwards)
  /// using ceil(|t1 - t0| / h) equal steps, h = T / steps_per_period.
  void advance_block(Eigen::Ref<Matrix> block, double t0, double t1) const;
  Vector advance(const Vector& psi, double t0, double t1) const;

  const DriveProtocol& drive() const { return drive_; }
  const SplitHamiltonian& hamiltonian() const { return h_; }
  int steps_per_period() const { return steps_per_period_; }
  bool exact() const { return !drive_.modulated(); }

 private:
  DriveProtocol drive_;
  SplitHamiltonian h_;
  int steps_per_period_;
};

struct StepSearch {
  int initial_steps_per_period = 512;
  int min_steps_per_period = 8;
  int max_steps_per_period = 1 << 16;
  /// Allow coarser grids than the initial one when they still converge.
  bool coarsen = true;
};

struct Calibration {
  int steps_per_period = 0;
  /// Max-abs difference between the chosen grid and its halving over one period.
  double halving_defect = 0.0;
};

/// Chooses steps per period such that one period of propagation of `probe`
/// agrees with the halved-step result within `tol` (max-abs). Throws
/// ConvergenceError when the budget is exhausted.
Calibration calibrate_steps(const DriveProtocol& drive, const SplitHamiltonian& h, const Matrix& probe, double tol,
                            const StepSearch& search = {});

/// Solves the Schrodinger equation from t0 to t1 (t1 >= t0), halving the step
/// from T/512 until successive results agree within tol.
StateVector evolve(const StateVector& state, const DriveProtocol& drive, double t0, double t1, double tol);

struct PropagationResult {
  std::vector<double> times;
  std::vector<StateVector> states;
  /// Max |1 - ||psi||| over the samples.
  double unitarity_defect = 0.0;
};

/// Snapshots of the evolved state at ascending `times` (times[0] >= 0, state given at t = 0).
PropagationResult propagate_samples(const StateVector& state, const Propagator& propagator,
                                    const std::vector<double>& times);

/// Visits the evolved state at each of the ascending `times`.
void sample_trajectory(const StateVector& state, const Propagator& propagator, const std::vector<double>& times,
                       const std::function<void(std::size_t, const StateVector&)>& visit);

struct PropagatorOptions {
  double tol = 1e-8;
  /// Re-unitarise (and report it) when the column defect exceeds this.
  double unitarity_tol = 1e-9;
  int workers = 1;
  StepSearch search{};
};

struct PropagatorDiagnostics {
  int steps_per_period = 0;
  double halving_defect = 0.0;
  double unitarity_defect = 0.0;
  bool reorthonormalised = false;
};

struct PeriodPropagator {
  Matrix U;
  PropagatorDiagnostics diagnostics;
};

/// U(T, 0) in the full Dicke basis, built column by column.
PeriodPropagator one_period_propagator(const DriveProtocol& drive, const SpinOperators& ops,
                                       const PropagatorOptions& options = {});

/// U(T, 0) restricted to the two parity sectors. H commutes with P, so the
/// blocks are propagated independently with the projected Hamiltonians.
struct SectorPropagator {
  std::array<Matrix, 2> blocks;  // sector 0: P = +1, sector 1: P = -1
  std::array<RealMatrix, 2> bases;
  PropagatorDiagnostics diagnostics;

  /// Assembles the full-basis matrix.
  Matrix full() const;
};

SectorPropagator one_period_propagator_sectors(const DriveProtocol& drive, const SpinOperators& ops,
                                               const Parity& parity, const PropagatorOptions& options = {});

/// |psi_k> = U_T^k |psi_0> for k = 0 ... n_periods.
std::vector<StateVector> stroboscopic_evolve(const StateVector& state, const Matrix& period_unitary, int n_periods);

/// Replaces U by the nearest unitary (polar factor).
Matrix nearest_unitary(const Matrix& u);

}  // namespace bhd
