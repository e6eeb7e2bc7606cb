#include "bhd/dynamics.hpp"

#include "bhd/error.hpp"
#include "bhd/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace bhd {

namespace {

constexpr Eigen::Index kChunk = 16;

const double kSqrt3 = std::sqrt(3.0);
// Gauss nodes and commutator-free weights.
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;
const double kWeightSmall = 0.25 - kSqrt3 / 6.0;
const double kWeightLarge = 0.25 + kSqrt3 / 6.0;

std::vector<Eigen::Index> probe_columns(Eigen::Index d) {
  std::vector<Eigen::Index> cols;
  const int count = static_cast<int>(std::min<Eigen::Index>(d, 8));
  for (int k = 0; k < count; ++k) {
    const Eigen::Index j = count == 1 ? 0 : static_cast<Eigen::Index>(std::llround(double(k) * (d - 1) / (count - 1)));
    if (cols.empty() || cols.back() != j) cols.push_back(j);
  }
  return cols;
}

Matrix identity_columns(Eigen::Index d, const std::vector<Eigen::Index>& cols) {
  Matrix m = Matrix::Zero(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m(cols[k], static_cast<Eigen::Index>(k)) = 1.0;
  return m;
}

Matrix propagate_identity(const Propagator& prop, Eigen::Index d, double t1, int workers) {
  Matrix u = Matrix::Identity(d, d);
  const std::size_t chunks = static_cast<std::size_t>((d + kChunk - 1) / kChunk);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const Eigen::Index lo = static_cast<Eigen::Index>(c) * kChunk;
    const Eigen::Index width = std::min(kChunk, d - lo);
    prop.advance_block(u.middleCols(lo, width), 0.0, t1);
  });
  return u;
}

}  // namespace

Propagator::Propagator(const DriveProtocol& drive, SplitHamiltonian hamiltonian, int steps_per_period)
    : drive_(drive), h_(std::move(hamiltonian)), steps_per_period_(steps_per_period) {
  drive_.validate();
  if (drive_.modulated() && steps_per_period_ < 1) throw InvalidArgument("Propagator: steps_per_period must be >= 1");
}

void Propagator::advance_block(Eigen::Ref<Matrix> block, double t0, double t1) const {
  if (t1 == t0) return;
  if (exact()) {
    expm_apply(h_.at(drive_.J0), t1 - t0, block);
    return;
  }
  const double nominal = drive_.period() / steps_per_period_;
  const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(std::abs(t1 - t0) / nominal - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (Eigen::Index lo = 0; lo < block.cols(); lo += kChunk) {
    auto chunk = block.middleCols(lo, std::min(kChunk, block.cols() - lo));
    for (long long k = 0; k < steps; ++k) {
      const double ta = t0 + static_cast<double>(k) * h;
      const double j1 = drive_.tunneling(ta + kNode1 * h);
      const double j2 = drive_.tunneling(ta + kNode2 * h);
      // Each exponent h (a H(t1) + b H(t2)) with a + b = 1/2 equals (h/2) H(2(a j1 + b j2)).
      expm_apply(h_.at(2.0 * (kWeightLarge * j1 + kWeightSmall * j2)), 0.5 * h, chunk);
      expm_apply(h_.at(2.0 * (kWeightSmall * j1 + kWeightLarge * j2)), 0.5 * h, chunk);
    }
  }
}

Vector Propagator::advance(const Vector& psi, double t0, double t1) const {
  Vector out = psi;
  advance_block(out, t0, t1);
  return out;
}

Calibration calibrate_steps(const DriveProtocol& drive, const SplitHamiltonian& h, const Matrix& probe, double tol,
                            const StepSearch& search) {
  if (!(tol > 0.0)) throw InvalidArgument("calibrate_steps: tol must be positive");
  if (!drive.modulated()) return {0, 0.0};
  const double period = drive.period();
  auto run = [&](int n) {
    Matrix m = probe;
    Propagator(drive, h, n).advance_block(m, 0.0, period);
    return m;
  };
  int n = search.initial_steps_per_period;
  Matrix coarse = run(n);
  Matrix fine = run(2 * n);
  double defect = max_abs(coarse - fine);
  if (defect <= tol) {
    while (search.coarsen && n / 2 >= search.min_steps_per_period) {
      Matrix coarser = run(n / 2);
      const double d = max_abs(coarser - coarse);
      if (d > tol) break;
      n /= 2;
      defect = d;
      coarse = std::move(coarser);
    }
    return {n, defect};
  }
  while (defect > tol) {
    if (2 * n > search.max_steps_per_period) {
      throw ConvergenceError("calibrate_steps: step halving did not converge within the step budget", defect);
    }
    n *= 2;
    coarse = std::move(fine);
    fine = run(2 * n);
    defect = max_abs(coarse - fine);
  }
  return {n, defect};
}

StateVector evolve(const StateVector& state, const DriveProtocol& drive, double t0, double t1, double tol) {
  if (t1 < t0) throw InvalidArgument("evolve: t1 must be >= t0");
  if (!(tol > 0.0)) throw InvalidArgument("evolve: tol must be positive");
  const SpinOperators ops(drive.N);
  if (state.size() != ops.dim()) throw InvalidArgument("evolve: state dimension does not match N + 1");
  auto h = split_hamiltonian(drive, ops);
  if (!drive.modulated()) return Propagator(drive, h, 1).advance(state, t0, t1);

  const StepSearch search{};
  int n = search.initial_steps_per_period;
  Vector coarse = Propagator(drive, h, n).advance(state, t0, t1);
  while (true) {
    Vector fine = Propagator(drive, h, 2 * n).advance(state, t0, t1);
    const double defect = (fine - coarse).norm();
    if (defect <= tol) return fine;
    if (4 * n > search.max_steps_per_period) {
      throw ConvergenceError("evolve: step halving did not converge within the step budget", defect);
    }
    n *= 2;
    coarse = std::move(fine);
  }
}

void sample_trajectory(const StateVector& state, const Propagator& propagator, const std::vector<double>& times,
                       const std::function<void(std::size_t, const StateVector&)>& visit) {
  Vector psi = state;
  double t = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t) throw InvalidArgument("sample_trajectory: times must be ascending and >= 0");
    propagator.advance_block(psi, t, times[k]);
    t = times[k];
    visit(k, psi);
  }
}

PropagationResult propagate_samples(const StateVector& state, const Propagator& propagator,
                                    const std::vector<double>& times) {
  PropagationResult out;
  out.times = times;
  out.states.resize(times.size());
  sample_trajectory(state, propagator, times, [&](std::size_t k, const StateVector& psi) {
    out.states[k] = psi;
    out.unitarity_defect = std::max(out.unitarity_defect, std::abs(1.0 - psi.norm()));
  });
  return out;
}

Matrix nearest_unitary(const Matrix& u) {
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace {

void finish(Matrix& u, PropagatorDiagnostics& diag, const PropagatorOptions& options) {
  const double defect = unitarity_defect(u);
  diag.unitarity_defect = std::max(diag.unitarity_defect, defect);
  if (defect > options.unitarity_tol) {
    u = nearest_unitary(u);
    diag.reorthonormalised = true;
  }
}

}  // namespace

PeriodPropagator one_period_propagator(const DriveProtocol& drive, const SpinOperators& ops,
                                       const PropagatorOptions& options) {
  drive.validate();
  const double period = drive.period();
  auto h = split_hamiltonian(drive, ops);
  const Eigen::Index d = ops.dim();
  const Calibration cal = calibrate_steps(drive, h, identity_columns(d, probe_columns(d)), options.tol, options.search);
  Propagator prop(drive, h, std::max(cal.steps_per_period, 1));
  PeriodPropagator out;
  out.U = propagate_identity(prop, d, period, options.workers);
  out.diagnostics.steps_per_period = cal.steps_per_period;
  out.diagnostics.halving_defect = cal.halving_defect;
  finish(out.U, out.diagnostics, options);
  return out;
}

Matrix SectorPropagator::full() const {
  const Eigen::Index d = bases[0].rows();
  Matrix u = Matrix::Zero(d, d);
  for (int s = 0; s < 2; ++s) {
    const Matrix q = bases[s].cast<cplx>();
    u += q * blocks[s] * q.adjoint();
  }
  return u;
}

SectorPropagator one_period_propagator_sectors(const DriveProtocol& drive, const SpinOperators& ops,
                                               const Parity& parity, const PropagatorOptions& options) {
  drive.validate();
  if (parity.particles() != ops.particles()) throw InvalidArgument("one_period_propagator_sectors: N mismatch");
  const double period = drive.period();
  const auto h = split_hamiltonian(drive, ops);
  SectorPropagator out;
  for (int s = 0; s < 2; ++s) {
    out.bases[s] = parity.sector_basis(s);
    const Eigen::Index ds = out.bases[s].cols();
    if (ds == 0) {
      out.blocks[s] = Matrix(0, 0);
      continue;
    }
    SplitHamiltonian hs{parity.project(h.fixed, s), parity.project(h.coupled, s)};
    const Calibration cal =
        calibrate_steps(drive, hs, identity_columns(ds, probe_columns(ds)), options.tol, options.search);
    Propagator prop(drive, hs, std::max(cal.steps_per_period, 1));
    out.blocks[s] = propagate_identity(prop, ds, period, options.workers);
    out.diagnostics.steps_per_period = std::max(out.diagnostics.steps_per_period, cal.steps_per_period);
    out.diagnostics.halving_defect = std::max(out.diagnostics.halving_defect, cal.halving_defect);
    finish(out.blocks[s], out.diagnostics, options);
  }
  return out;
}

std::vector<StateVector> stroboscopic_evolve(const StateVector& state, const Matrix& period_unitary, int n_periods) {
  if (period_unitary.rows() != state.size() || period_unitary.cols() != state.size()) {
    throw InvalidArgument("stroboscopic_evolve: dimension mismatch");
  }
  if (n_periods < 0) throw InvalidArgument("stroboscopic_evolve: n_periods must be >= 0");
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(n_periods) + 1);
  out.push_back(state);
  for (int k = 0; k < n_periods; ++k) out.push_back(period_unitary * out.back());
  return out;
}

}  // namespace bhd
