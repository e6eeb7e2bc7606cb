#include "bhd/scrambling.hpp"

#include "bhd/error.hpp"
#include "bhd/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

namespace bhd {

SpinComponent local_generator(const BlochAngles& angles, const SpinOperators& ops) {
  angles.validate();
  return SpinComponent(ops, angles);
}

const char* to_string(FotocForm form) { return form == FotocForm::Echo ? "echo" : "variance"; }

double diagonal_ensemble_fotoc(int n_particles, double delta) {
  if (n_particles < 1) throw InvalidArgument("diagonal_ensemble_fotoc: N must be >= 1");
  const double n = n_particles;
  return delta * delta * n * (n + 2.0) / 12.0;
}

std::vector<double> uniform_times(double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw InvalidArgument("uniform_times: need dt > 0 and t_max >= 0");
  const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) t[k] = static_cast<double>(k) * dt;
  return t;
}

int fotoc_steps(const DriveProtocol& drive, const SpinOperators& ops, const Matrix& probe, const FotocOptions& options) {
  if (options.steps_per_period > 0 || !drive.modulated()) return options.steps_per_period;
  return calibrate_steps(drive, split_hamiltonian(drive, ops), probe, options.tol, options.search).steps_per_period;
}

namespace {

struct Generator {
  std::function<MeanVariance(const Vector&)> moments;
  std::function<Vector(double, const Vector&)> kick;  // exp(i delta w) v
};

Generator component_generator(const SpinComponent& w) {
  return {[&w](const Vector& v) { return expectation_and_variance(v, w); },
          [&w](double delta, const Vector& v) { return w.exp_apply(delta, v); }};
}

struct DenseGenerator {
  Matrix w;
  Matrix vectors;
  RealVector values;
};

Generator dense_generator(const std::shared_ptr<DenseGenerator>& g) {
  return {[g](const Vector& v) { return expectation_and_variance(v, g->w); },
          [g](double delta, const Vector& v) {
            const Vector c = g->vectors.adjoint() * v;
            const Vector phased = c.cwiseProduct((cplx(0.0, delta) * g->values.cast<cplx>()).array().exp().matrix());
            return Vector(g->vectors * phased);
          }};
}

std::shared_ptr<DenseGenerator> decompose_dense(const Matrix& w) {
  if (w.rows() != w.cols()) throw InvalidArgument("fotoc: generator must be square");
  if (max_abs(w - w.adjoint()) > 1e-10 * std::max(1.0, max_abs(w))) throw InvalidArgument("fotoc: generator not Hermitian");
  auto g = std::make_shared<DenseGenerator>();
  g->w = w;
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success) throw ConvergenceError("fotoc: generator eigensolver failed", 0.0);
  g->vectors = es.eigenvectors();
  g->values = es.eigenvalues();
  return g;
}

void check_inputs(const StateVector& state0, const DriveProtocol& drive, double delta, const std::vector<double>& times) {
  drive.validate();
  if (state0.size() != drive.N + 1) throw InvalidArgument("fotoc: state dimension differs from N + 1");
  if (std::abs(state0.norm() - 1.0) > 1e-10) throw InvalidArgument("fotoc: initial state not normalised");
  if (!(delta > 0.0)) throw InvalidArgument("fotoc: delta must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1])) {
      throw InvalidArgument("fotoc: times must be ascending and nonnegative");
    }
  }
}

BlochAngles centre_of(const StateVector& state0, const SpinOperators& ops) {
  const double x = state0.dot(ops.apply_sx(state0)).real();
  const double y = state0.dot(ops.apply_sy(state0)).real();
  const double z = state0.dot(ops.apply_sz(state0)).real();
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r == 0.0) return {};
  return {std::acos(std::clamp(z / r, -1.0, 1.0)), wrap_angle(std::atan2(y, x))};
}

FotocTrace make_trace(const StateVector& state0, const SpinOperators& ops, const DriveProtocol& drive, double delta,
                      const std::vector<double>& times, FotocForm form, int steps) {
  FotocTrace tr;
  tr.times = times;
  tr.values.assign(times.size(), 0.0);
  tr.delta = delta;
  tr.centre = centre_of(state0, ops);
  tr.drive = drive;
  tr.form = form;
  tr.steps_per_period = steps;
  return tr;
}

FotocTrace variance_trace(const StateVector& state0, const Generator& w, const DriveProtocol& drive, double delta,
                          const std::vector<double>& times, const FotocOptions& options) {
  check_inputs(state0, drive, delta, times);
  const SpinOperators ops(drive.N);
  const int steps = fotoc_steps(drive, ops, state0, options);
  const Propagator prop(drive, split_hamiltonian(drive, ops), steps);
  FotocTrace tr = make_trace(state0, ops, drive, delta, times, FotocForm::Variance, steps);
  sample_trajectory(state0, prop, times, [&](std::size_t k, const StateVector& psi) {
    tr.norm_defect = std::max(tr.norm_defect, std::abs(1.0 - psi.norm()));
    tr.values[k] = delta * delta * w.moments(psi).variance;
  });
  return tr;
}

FotocTrace echo_trace(const StateVector& state0, const Generator& w, const DriveProtocol& drive, double delta,
                      const std::vector<double>& times, const FotocOptions& options) {
  check_inputs(state0, drive, delta, times);
  const SpinOperators ops(drive.N);
  const int steps = fotoc_steps(drive, ops, state0, options);
  const Propagator prop(drive, split_hamiltonian(drive, ops), steps);
  FotocTrace tr = make_trace(state0, ops, drive, delta, times, FotocForm::Echo, steps);
  sample_trajectory(state0, prop, times, [&](std::size_t k, const StateVector& psi) {
    tr.norm_defect = std::max(tr.norm_defect, std::abs(1.0 - psi.norm()));
    Vector phi = w.kick(delta, psi);
    // Retrace the forward segments so the backward map inverts them exactly.
    for (std::size_t j = k; j > 0; --j) prop.advance_block(phi, times[j], times[j - 1]);
    prop.advance_block(phi, times[0], 0.0);
    tr.values[k] = std::max(0.0, 1.0 - std::norm(state0.dot(phi)));
  });
  return tr;
}

}  // namespace

FotocTrace fotoc_variance(const StateVector& state0, const SpinComponent& w, const DriveProtocol& drive, double delta,
                          const std::vector<double>& times, const FotocOptions& options) {
  return variance_trace(state0, component_generator(w), drive, delta, times, options);
}

FotocTrace fotoc_variance(const StateVector& state0, const Matrix& w, const DriveProtocol& drive, double delta,
                          const std::vector<double>& times, const FotocOptions& options) {
  return variance_trace(state0, dense_generator(decompose_dense(w)), drive, delta, times, options);
}

FotocTrace fotoc_echo(const StateVector& state0, const SpinComponent& w, const DriveProtocol& drive, double delta,
                      const std::vector<double>& times, const FotocOptions& options) {
  return echo_trace(state0, component_generator(w), drive, delta, times, options);
}

FotocTrace fotoc_echo(const StateVector& state0, const Matrix& w, const DriveProtocol& drive, double delta,
                      const std::vector<double>& times, const FotocOptions& options) {
  return echo_trace(state0, dense_generator(decompose_dense(w)), drive, delta, times, options);
}

LyapunovFit fit_quantum_lyapunov(const FotocTrace& trace, double c_diag, const LyapunovFitOptions& options) {
  if (trace.times.size() != trace.values.size()) throw InvalidArgument("fit_quantum_lyapunov: malformed trace");
  if (!(c_diag > 0.0)) throw InvalidArgument("fit_quantum_lyapunov: c_diag must be positive");
  const auto& t = trace.times;
  const auto& c = trace.values;
  const std::size_t n = t.size();
  LyapunovFit fit;

  for (std::size_t k = 0; k < n; ++k) {
    if (c[k] >= options.ehrenfest_fraction * c_diag) {
      fit.ehrenfest_time = t[k];
      break;
    }
  }

  // t_hi first: the delay-phase floor is measured below it.
  const double ceiling = options.ceiling_fraction * c_diag;
  double t_hi = std::numeric_limits<double>::quiet_NaN();
  std::size_t hi_index = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (c[k] > ceiling) {
      t_hi = t[k];
      hi_index = k;
      break;
    }
  }
  if (options.t_hi) t_hi = *options.t_hi;

  // Floor: median of C over (0, t_hi], i.e. the plateau level of the delay
  // phase. The first sample alone sits on the quadratic start-up and would
  // make the window depend on the sampling interval.
  std::vector<double> early;
  for (std::size_t k = 0; k < std::min(hi_index + 1, n); ++k) {
    if (t[k] > 0.0) early.push_back(c[k]);
  }
  if (early.empty() || !(*std::max_element(early.begin(), early.end()) > 0.0)) {
    fit.reason = "no positive FOTOC sample after t = 0";
    return fit;
  }
  auto mid = early.begin() + static_cast<std::ptrdiff_t>(early.size() / 2);
  std::nth_element(early.begin(), mid, early.end());
  fit.floor = *mid;
  const double onset = options.onset_factor * fit.floor;

  double t_lo = std::numeric_limits<double>::quiet_NaN();
  if (options.t_lo) {
    t_lo = *options.t_lo;
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (t[k] > 0.0 && c[k] > onset) {
        t_lo = t[k];
        break;
      }
    }
  }
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  if (std::isnan(t_lo)) {
    fit.reason = "FOTOC never rises above the onset level";
    return fit;
  }
  if (std::isnan(t_hi)) {
    fit.reason = "FOTOC never reaches the saturation ceiling";
    return fit;
  }
  if (!(t_hi > t_lo)) {
    fit.reason = "empty fit window";
    return fit;
  }

  std::vector<double> x, y;
  for (std::size_t k = 0; k < n; ++k) {
    if (t[k] >= t_lo && t[k] <= t_hi && c[k] > 0.0) {
      x.push_back(t[k]);
      y.push_back(std::log(c[k]));
    }
  }
  fit.points = static_cast<int>(x.size());
  if (fit.points < options.min_points) {
    fit.reason = "fit window holds fewer than the minimum number of points";
    return fit;
  }
  const LinearFit lf = linear_fit(x, y);
  fit.lambda_q = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  if (lf.r_squared < options.min_r_squared) {
    fit.reason = "r^2 below threshold: growth is not exponential";
    return fit;
  }
  if (!(lf.slope > 0.0)) {
    fit.reason = "non-positive growth rate";
    return fit;
  }
  fit.accepted = true;
  return fit;
}

SaturationValue saturation_mean(const FotocTrace& trace, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("saturation_mean: fraction must lie in (0, 1]");
  const std::size_t n = trace.values.size();
  if (n == 0) throw InvalidArgument("saturation_mean: empty trace");
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))));
  SaturationValue s;
  s.points = static_cast<int>(count);
  s.t_from = trace.times[n - count];
  s.t_to = trace.times[n - 1];
  s.mean = mean(std::span<const double>(trace.values).subspan(n - count));
  return s;
}

FotocGrid fotoc_grid(const DriveProtocol& drive, const PhaseSpaceGrid& grid, double t_eval, double delta,
                     const FotocGridOptions& options) {
  drive.validate();
  if (!(t_eval > 0.0)) throw InvalidArgument("fotoc_grid: t_eval must be positive");
  if (!(delta > 0.0)) throw InvalidArgument("fotoc_grid: delta must be positive");
  if (grid.n_phi < 1 || grid.n_z < 1) throw InvalidArgument("fotoc_grid: empty grid");

  const SpinOperators ops(drive.N);
  const auto points = grid.points();
  const auto count = static_cast<Eigen::Index>(points.size());
  Matrix states(drive.N + 1, count);
  for (Eigen::Index i = 0; i < count; ++i) states.col(i) = coherent_state(drive.N, to_bloch(points[static_cast<std::size_t>(i)]));

  Matrix probe(drive.N + 1, std::min<Eigen::Index>(4, count));
  for (Eigen::Index k = 0; k < probe.cols(); ++k) {
    probe.col(k) = states.col(probe.cols() > 1 ? k * (count - 1) / (probe.cols() - 1) : 0);
  }
  FotocGrid out;
  out.grid = grid;
  out.t_eval = t_eval;
  out.delta = delta;
  out.c_diag = diagonal_ensemble_fotoc(drive.N, delta);
  out.steps_per_period = fotoc_steps(drive, ops, probe, options.propagation);
  const Propagator prop(drive, split_hamiltonian(drive, ops), out.steps_per_period);

  constexpr Eigen::Index chunk = 16;
  const auto chunks = static_cast<std::size_t>((count + chunk - 1) / chunk);
  out.scaled.assign(points.size(), std::numeric_limits<double>::quiet_NaN());
  out.errors.assign(points.size(), std::string());
  parallel_for(chunks, options.workers, [&](std::size_t c) {
    const Eigen::Index lo = static_cast<Eigen::Index>(c) * chunk;
    const Eigen::Index width = std::min(chunk, count - lo);
    try {
      prop.advance_block(states.middleCols(lo, width), 0.0, t_eval);
    } catch (const std::exception& e) {
      for (Eigen::Index i = lo; i < lo + width; ++i) out.errors[static_cast<std::size_t>(i)] = e.what();
      return;
    }
    for (Eigen::Index i = lo; i < lo + width; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      try {
        const SpinComponent w = local_generator(to_bloch(points[idx]), ops);
        const double v = delta * delta * expectation_and_variance(states.col(i), w).variance / out.c_diag;
        if (!std::isfinite(v)) throw ConvergenceError("non-finite FOTOC", v);
        out.scaled[idx] = v;
      } catch (const std::exception& e) {
        out.errors[idx] = e.what();
      }
    }
  });

  std::vector<double> valid;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (out.errors[i].empty()) {
      valid.push_back(out.scaled[i]);
    } else {
      out.scaled[i] = std::numeric_limits<double>::quiet_NaN();
      ++out.invalid;
    }
  }
  if (!valid.empty()) {
    out.mean = mean(valid);
    out.variance = variance(valid);
  }
  out.histogram = make_histogram(valid, options.histogram_bins, 0.0, options.histogram_hi);
  return out;
}

}  // namespace bhd
