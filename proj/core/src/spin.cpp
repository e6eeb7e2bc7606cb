#include "bhd/spin.hpp"

#include "bhd/error.hpp"

#include <cmath>
#include <numbers>

namespace bhd {

namespace {

RealVector ladder_band(int n) {
  const double s = 0.5 * n;
  RealVector b(n);
  for (int j = 0; j < n; ++j) {
    const double m = j - s;
    b[j] = 0.5 * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  return b;
}

RealVector m_values(int n) {
  RealVector m(n + 1);
  for (int j = 0; j <= n; ++j) m[j] = j - 0.5 * n;
  return m;
}

double tridiagonal_entry(const Tridiagonal& t, Eigen::Index a, Eigen::Index b) {
  if (a == b) return t.diagonal()[a];
  if (a == b + 1) return t.off_diagonal()[b];
  if (b == a + 1) return t.off_diagonal()[a];
  return 0.0;
}

}  // namespace

SpinOperators::SpinOperators(int n_particles)
    : n_(n_particles),
      m_(n_particles >= 1 ? m_values(n_particles) : RealVector()),
      sx_(n_particles >= 1 ? Tridiagonal(RealVector::Zero(n_particles + 1), ladder_band(n_particles))
                           : Tridiagonal()) {
  if (n_particles < 1) throw InvalidArgument("SpinOperators: particle number must be >= 1");
}

Matrix SpinOperators::sy_dense() const {
  Matrix y = Matrix::Zero(dim(), dim());
  for (Eigen::Index j = 0; j + 1 < dim(); ++j) {
    y(j + 1, j) = cplx(0.0, -band()[j]);
    y(j, j + 1) = cplx(0.0, band()[j]);
  }
  return y;
}

RealMatrix SpinOperators::sy2_dense() const {
  // Sy = -i K with K real antisymmetric, so Sy^2 = -K^2.
  RealMatrix k = RealMatrix::Zero(dim(), dim());
  for (Eigen::Index j = 0; j + 1 < dim(); ++j) {
    k(j + 1, j) = band()[j];
    k(j, j + 1) = -band()[j];
  }
  return -(k * k);
}

Vector SpinOperators::apply_sy(const Vector& v) const {
  const Eigen::Index n = dim();
  Vector out = Vector::Zero(n);
  const cplx i(0.0, 1.0);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    out[j + 1] += -i * band()[j] * v[j];
    out[j] += i * band()[j] * v[j + 1];
  }
  return out;
}

void BlochAngles::validate() const {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw InvalidArgument("BlochAngles: theta outside [0, pi]");
  if (!(phi > -std::numbers::pi - 1e-12 && phi <= std::numbers::pi + 1e-12)) {
    throw InvalidArgument("BlochAngles: phi outside (-pi, pi]");
  }
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

StateVector coherent_state(int n_particles, const BlochAngles& angles) {
  if (n_particles < 1) throw InvalidArgument("coherent_state: particle number must be >= 1");
  angles.validate();
  const int n = n_particles;
  const double c = std::cos(0.5 * angles.theta);
  const double s = std::sin(0.5 * angles.theta);
  const double log_c = std::log(std::abs(c));
  const double log_s = std::log(std::abs(s));
  const double lg_n = std::lgamma(n + 1.0);
  StateVector psi(n + 1);
  for (int j = 0; j <= n; ++j) {
    // j = S + m counts powers of cos, n - j = S - m powers of sin.
    const int up = j, down = n - j;
    double mag;
    if ((up > 0 && c == 0.0) || (down > 0 && s == 0.0)) {
      mag = 0.0;
    } else {
      const double log_binom = lg_n - std::lgamma(up + 1.0) - std::lgamma(down + 1.0);
      mag = std::exp(0.5 * log_binom + (up > 0 ? up * log_c : 0.0) + (down > 0 ? down * log_s : 0.0));
    }
    psi[j] = std::polar(mag, down * angles.phi);
  }
  return psi / psi.norm();
}

SpinComponent::SpinComponent(const SpinOperators& ops, const BlochAngles& angles)
    : angles_(angles),
      rotated_(ops.m() * std::cos(angles.theta), ops.band() * std::sin(angles.theta)),
      phases_(ops.dim()) {
  angles.validate();
  for (Eigen::Index j = 0; j < ops.dim(); ++j) phases_[j] = std::polar(1.0, -angles.phi * ops.m()[j]);
}

Vector SpinComponent::apply(const Vector& v) const {
  Vector rotated = phases_.conjugate().cwiseProduct(v);
  return phases_.cwiseProduct(rotated_ * rotated);
}

Matrix SpinComponent::dense() const {
  return phases_.asDiagonal() * rotated_.dense().cast<cplx>() * phases_.conjugate().asDiagonal();
}

Vector SpinComponent::exp_apply(double delta, const Vector& v) const {
  Vector w = phases_.conjugate().cwiseProduct(v);
  expm_apply(rotated_, -delta, w);
  return phases_.cwiseProduct(w);
}

Parity::Parity(int n_particles) : n_(n_particles), sign_(n_particles % 2 == 0 ? 1 : -1) {
  if (n_particles < 1) throw InvalidArgument("Parity: particle number must be >= 1");
}

Vector Parity::apply(const Vector& v) const {
  return static_cast<double>(sign_) * v.reverse();
}

RealMatrix Parity::dense() const {
  const Eigen::Index d = dim();
  RealMatrix p = RealMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) p(d - 1 - j, j) = sign_;
  return p;
}

Eigen::Index Parity::sector_dim(int sector) const {
  const int flip = (sector == 0) ? sign_ : -sign_;
  const Eigen::Index d = dim();
  return flip > 0 ? (d + 1) / 2 : d / 2;
}

RealMatrix Parity::sector_basis(int sector) const {
  if (sector != 0 && sector != 1) throw InvalidArgument("Parity::sector_basis: sector must be 0 or 1");
  const int flip = (sector == 0) ? sign_ : -sign_;
  const Eigen::Index d = dim();
  RealMatrix q = RealMatrix::Zero(d, sector_dim(sector));
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; 2 * j < n_; ++j, ++k) {
    q(j, k) = r;
    q(d - 1 - j, k) = flip * r;
  }
  if (n_ % 2 == 0 && flip > 0) q(n_ / 2, k) = 1.0;
  return q;
}

Tridiagonal Parity::project(const Tridiagonal& op, int sector) const {
  const RealMatrix q = sector_basis(sector);
  const Eigen::Index ds = q.cols();
  // Support of each basis column: one or two Dicke indices.
  std::vector<std::vector<std::pair<Eigen::Index, double>>> support(ds);
  for (Eigen::Index k = 0; k < ds; ++k) {
    for (Eigen::Index j = 0; j < q.rows(); ++j) {
      if (q(j, k) != 0.0) support[k].emplace_back(j, q(j, k));
    }
  }
  auto entry = [&](Eigen::Index k, Eigen::Index l) {
    double sum = 0.0;
    for (const auto& [a, ca] : support[k]) {
      for (const auto& [b, cb] : support[l]) sum += ca * cb * tridiagonal_entry(op, a, b);
    }
    return sum;
  };
  RealVector diag(ds), off(std::max<Eigen::Index>(ds - 1, 0));
  for (Eigen::Index k = 0; k < ds; ++k) diag[k] = entry(k, k);
  for (Eigen::Index k = 0; k + 1 < ds; ++k) off[k] = entry(k, k + 1);
  return Tridiagonal(diag, off);
}

Matrix parity_operator_dense(const SpinOperators& ops) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(ops.sx_dense());
  const RealMatrix& v = es.eigenvectors();
  Vector phase(ops.dim());
  for (Eigen::Index k = 0; k < ops.dim(); ++k) phase[k] = std::polar(1.0, -std::numbers::pi * es.eigenvalues()[k]);
  const cplx prefactor = std::pow(cplx(0.0, -1.0), ops.particles());
  return prefactor * (v.cast<cplx>() * phase.asDiagonal() * v.transpose().cast<cplx>());
}

MeanVariance expectation_and_variance(const StateVector& state, const Eigen::Ref<const Matrix>& op,
                                      double hermiticity_tol) {
  if (op.rows() != state.size() || op.cols() != state.size()) {
    throw InvalidArgument("expectation_and_variance: dimension mismatch");
  }
  const double asym = max_abs(op - op.adjoint());
  if (asym > hermiticity_tol) {
    throw InvalidArgument("expectation_and_variance: operator is not Hermitian (asymmetry " + std::to_string(asym) +
                          ")");
  }
  const Vector applied = op * state;
  const cplx mean = state.dot(applied);
  if (std::abs(mean.imag()) > 1e-10) {
    throw InvalidArgument("expectation_and_variance: expectation value has an imaginary part");
  }
  const Vector centred = applied - mean.real() * state;
  return {mean.real(), centred.squaredNorm()};
}

MeanVariance expectation_and_variance(const StateVector& state, const SpinComponent& op) {
  const Vector applied = op.apply(state);
  const double mean = state.dot(applied).real();
  return {mean, (applied - mean * state).squaredNorm()};
}

MeanVariance maximally_mixed_moments(const Eigen::Ref<const Matrix>& op) {
  const double d = static_cast<double>(op.rows());
  const double mean = op.trace().real() / d;
  const double second = (op * op).trace().real() / d;
  return {mean, second - mean * mean};
}

}  // namespace bhd
