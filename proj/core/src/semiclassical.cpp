#include "bhd/semiclassical.hpp"

#include "bhd/error.hpp"
#include "bhd/parallel.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace bhd {

namespace odeint = boost::numeric::odeint;

namespace {

// Clamps z into [-1 + margin, 1 - margin], recording whether it had to.
double clamp_pole(double z, double margin, bool& clamped) {
  const double lim = 1.0 - margin;
  if (std::abs(z) > lim) {
    clamped = true;
    return std::copysign(lim, z);
  }
  return z;
}

struct Rates {
  double s, sin_phi, cos_phi, j, nu;
};

Rates rates(double z, double phi, double t, const DriveProtocol& drive) {
  return {std::sqrt(1.0 - z * z), std::sin(phi), std::cos(phi), drive.tunneling(t), drive.nu()};
}

PhaseVelocity velocity(double z, const Rates& r) {
  return {2.0 * r.j * r.s * r.sin_phi, -2.0 * (r.nu * z + r.j * z * r.cos_phi / r.s)};
}

Eigen::Matrix2d jacobian(double z, const Rates& r) {
  Eigen::Matrix2d a;
  a(0, 0) = -2.0 * r.j * z * r.sin_phi / r.s;
  a(0, 1) = 2.0 * r.j * r.s * r.cos_phi;
  a(1, 0) = -2.0 * r.nu - 2.0 * r.j * r.cos_phi / (r.s * r.s * r.s);
  a(1, 1) = 2.0 * r.j * z * r.sin_phi / r.s;
  return a;
}

double initial_step(double t0, double t1, const DriveProtocol& drive) {
  const double span = std::abs(t1 - t0);
  double h = span / 16.0;
  if (drive.omega > 0.0) h = std::min(h, drive.period() / 64.0);
  return t1 >= t0 ? h : -h;
}

void check_options(const ClassicalOptions& o) {
  if (!(o.abs_tol > 0.0) || !(o.rel_tol > 0.0)) throw InvalidArgument("classical integration: tolerances must be positive");
  if (!(o.pole_margin > 0.0) || o.pole_margin >= 1.0) throw InvalidArgument("classical integration: bad pole margin");
}

}  // namespace

PhaseVelocity mean_field_rhs(const ClassicalState& s, double t, const DriveProtocol& drive) {
  bool clamped = false;
  const double z = clamp_pole(s.z, 1e-12, clamped);
  return velocity(z, rates(z, s.phi, t, drive));
}

double classical_energy(const ClassicalState& s, double t, const DriveProtocol& drive) {
  return 0.5 * drive.nu() * s.z * s.z - drive.tunneling(t) * std::sqrt(std::max(0.0, 1.0 - s.z * s.z)) * std::cos(s.phi);
}

Eigen::Matrix2d mean_field_jacobian(const ClassicalState& s, double t, const DriveProtocol& drive) {
  bool clamped = false;
  const double z = clamp_pole(s.z, 1e-12, clamped);
  return jacobian(z, rates(z, s.phi, t, drive));
}

FlowResult flow(const ClassicalState& s, const DriveProtocol& drive, double t0, double t1,
                const ClassicalOptions& options) {
  check_options(options);
  bool clamped = false;
  std::array<double, 2> x{clamp_pole(s.z, options.pole_margin, clamped), s.phi};
  if (t1 != t0) {
    auto system = [&](const std::array<double, 2>& y, std::array<double, 2>& dy, double t) {
      const double z = clamp_pole(y[0], options.pole_margin, clamped);
      const PhaseVelocity v = velocity(z, rates(z, y[1], t, drive));
      dy[0] = v.dz;
      dy[1] = v.dphi;
    };
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_fehlberg78<std::array<double, 2>>());
    odeint::integrate_adaptive(stepper, system, x, t0, t1, initial_step(t0, t1, drive));
  }
  FlowResult out;
  out.state = {clamp_pole(x[0], options.pole_margin, clamped), wrap_angle(x[1])};
  out.pole_events = clamped ? 1 : 0;
  return out;
}

FlowResult flow_with_tangent(const ClassicalState& s, const DriveProtocol& drive, double t0, double t1,
                             const ClassicalOptions& options) {
  check_options(options);
  bool clamped = false;
  // z, phi, then the 2x2 tangent matrix in row-major order.
  std::array<double, 6> x{clamp_pole(s.z, options.pole_margin, clamped), s.phi, 1.0, 0.0, 0.0, 1.0};
  if (t1 != t0) {
    auto system = [&](const std::array<double, 6>& y, std::array<double, 6>& dy, double t) {
      const double z = clamp_pole(y[0], options.pole_margin, clamped);
      const Rates r = rates(z, y[1], t, drive);
      const PhaseVelocity v = velocity(z, r);
      const Eigen::Matrix2d a = jacobian(z, r);
      dy[0] = v.dz;
      dy[1] = v.dphi;
      dy[2] = a(0, 0) * y[2] + a(0, 1) * y[4];
      dy[3] = a(0, 0) * y[3] + a(0, 1) * y[5];
      dy[4] = a(1, 0) * y[2] + a(1, 1) * y[4];
      dy[5] = a(1, 0) * y[3] + a(1, 1) * y[5];
    };
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_fehlberg78<std::array<double, 6>>());
    odeint::integrate_adaptive(stepper, system, x, t0, t1, initial_step(t0, t1, drive));
  }
  FlowResult out;
  out.state = {clamp_pole(x[0], options.pole_margin, clamped), wrap_angle(x[1])};
  out.jacobian << x[2], x[3], x[4], x[5];
  out.pole_events = clamped ? 1 : 0;
  return out;
}

PoincareSection poincare_section(std::span<const ClassicalState> initials, const DriveProtocol& drive,
                                 int n_periods, const ClassicalOptions& options, int workers) {
  if (!(drive.omega > 0.0)) throw InvalidArgument("poincare_section: requires omega > 0");
  if (n_periods < 0) throw InvalidArgument("poincare_section: n_periods must be >= 0");
  for (const auto& s : initials) s.validate();
  const double period = drive.period();
  PoincareSection out;
  out.orbits.resize(initials.size());
  out.pole_events.assign(initials.size(), 0);
  parallel_for(initials.size(), workers, [&](std::size_t i) {
    auto& orbit = out.orbits[i];
    orbit.reserve(static_cast<std::size_t>(n_periods) + 1);
    orbit.push_back(initials[i]);
    for (int k = 0; k < n_periods; ++k) {
      const FlowResult r = flow(orbit.back(), drive, k * period, (k + 1) * period, options);
      out.pole_events[i] += r.pole_events;
      orbit.push_back(r.state);
    }
  });
  for (int e : out.pole_events) out.total_pole_events += e;
  return out;
}

std::vector<ClassicalState> poincare_initials(int count) {
  if (count < 2) throw InvalidArgument("poincare_initials: count must be >= 2");
  const int along_z = count / 2;
  const int along_phi = count - along_z;
  std::vector<ClassicalState> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < along_z; ++k) out.push_back({-1.0 + (2.0 * k + 1.0) / along_z, 0.0});
  constexpr double pi = std::numbers::pi;
  for (int k = 0; k < along_phi; ++k) out.push_back({0.0, -pi + 2.0 * pi * (k + 0.5) / along_phi});
  return out;
}

namespace {

int period_count(const DriveProtocol& drive, double t_max, const LyapunovOptions& options) {
  if (!(drive.omega > 0.0)) throw InvalidArgument("classical_lyapunov: requires omega > 0");
  if (options.transient_periods < 0) throw InvalidArgument("classical_lyapunov: negative transient");
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    throw InvalidArgument("classical_lyapunov: tail_fraction must lie in (0, 1]");
  }
  const int total = static_cast<int>(std::floor(t_max / drive.period() + 1e-9));
  if (total <= options.transient_periods) throw InvalidArgument("classical_lyapunov: t_max shorter than the transient");
  return total;
}

void summarise(LyapunovEstimate& e, double period, const LyapunovOptions& options) {
  e.periods = static_cast<int>(e.stretch.size());
  double sum = 0.0;
  for (double v : e.stretch) sum += v;
  e.lambda = sum / (e.periods * period);
  const int tail = std::max(1, static_cast<int>(std::lround(options.tail_fraction * e.periods)));
  double tail_sum = 0.0;
  for (int k = e.periods - tail; k < e.periods; ++k) tail_sum += e.stretch[static_cast<std::size_t>(k)];
  e.tail_lambda = tail_sum / (tail * period);
  e.converged = std::abs(e.lambda - e.tail_lambda) <=
                std::max(options.tail_abs_tol, options.tail_rel_tol * std::abs(e.lambda));
}

}  // namespace

LyapunovEstimate classical_lyapunov(const ClassicalState& s0, const DriveProtocol& drive, double t_max,
                                    const LyapunovOptions& options) {
  s0.validate();
  const int total = period_count(drive, t_max, options);
  const double period = drive.period();
  LyapunovEstimate est;
  ClassicalState s = s0;
  Eigen::Vector2d v(1.0, 1.0);
  v.normalize();
  for (int k = 0; k < total; ++k) {
    const FlowResult r = flow_with_tangent(s, drive, k * period, (k + 1) * period, options.integration);
    est.pole_events += r.pole_events;
    s = r.state;
    v = r.jacobian * v;
    const double g = v.norm();
    v /= g;
    if (k >= options.transient_periods) est.stretch.push_back(std::log(g));
  }
  summarise(est, period, options);
  return est;
}

LyapunovEstimate two_trajectory_lyapunov(const ClassicalState& s0, const DriveProtocol& drive, double t_max,
                                         double offset, const LyapunovOptions& options) {
  s0.validate();
  if (!(offset > 0.0)) throw InvalidArgument("two_trajectory_lyapunov: offset must be positive");
  const int total = period_count(drive, t_max, options);
  const double period = drive.period();
  LyapunovEstimate est;
  ClassicalState a = s0;
  const double c = offset / std::sqrt(2.0);
  ClassicalState b{std::clamp(s0.z + c, -1.0, 1.0), wrap_angle(s0.phi + c)};
  for (int k = 0; k < total; ++k) {
    const FlowResult ra = flow(a, drive, k * period, (k + 1) * period, options.integration);
    const FlowResult rb = flow(b, drive, k * period, (k + 1) * period, options.integration);
    est.pole_events += ra.pole_events + rb.pole_events;
    a = ra.state;
    const double dz = rb.state.z - a.z;
    const double dphi = wrap_angle(rb.state.phi - a.phi);
    const double d = std::hypot(dz, dphi);
    const double scale = offset / d;
    b = {std::clamp(a.z + dz * scale, -1.0, 1.0), wrap_angle(a.phi + dphi * scale)};
    if (k >= options.transient_periods) est.stretch.push_back(std::log(d / offset));
  }
  summarise(est, period, options);
  return est;
}

}  // namespace bhd
