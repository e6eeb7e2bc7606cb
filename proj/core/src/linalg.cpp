#include "bhd/linalg.hpp"

#include "bhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bhd {

Tridiagonal::Tridiagonal(RealVector diagonal, RealVector off_diagonal)
    : diag_(std::move(diagonal)), off_(std::move(off_diagonal)) {
  const auto n = diag_.size();
  if (n == 0 || off_.size() != std::max<Eigen::Index>(n - 1, 0)) {
    throw InvalidArgument("Tridiagonal: off-diagonal length must be size - 1");
  }
}

Tridiagonal Tridiagonal::zero(Eigen::Index n) {
  return Tridiagonal(RealVector::Zero(n), RealVector::Zero(n - 1));
}

void Tridiagonal::apply(const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> y) const {
  const Eigen::Index n = size();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const cplx* xc = x.col(c).data();
    cplx* yc = y.col(c).data();
    if (n == 1) {
      yc[0] = diag_[0] * xc[0];
      continue;
    }
    yc[0] = diag_[0] * xc[0] + off_[0] * xc[1];
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
      yc[j] = off_[j - 1] * xc[j - 1] + diag_[j] * xc[j] + off_[j] * xc[j + 1];
    }
    yc[n - 1] = off_[n - 2] * xc[n - 2] + diag_[n - 1] * xc[n - 1];
  }
}

Vector Tridiagonal::operator*(const Vector& x) const {
  Vector y(x.size());
  apply(x, y);
  return y;
}

RealMatrix Tridiagonal::dense() const {
  const Eigen::Index n = size();
  RealMatrix m = RealMatrix::Zero(n, n);
  m.diagonal() = diag_;
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    m(j, j + 1) = off_[j];
    m(j + 1, j) = off_[j];
  }
  return m;
}

std::pair<double, double> Tridiagonal::spectral_bounds() const {
  const Eigen::Index n = size();
  double lo = diag_[0], hi = diag_[0];
  for (Eigen::Index j = 0; j < n; ++j) {
    double radius = 0.0;
    if (j > 0) radius += std::abs(off_[j - 1]);
    if (j + 1 < n) radius += std::abs(off_[j]);
    lo = std::min(lo, diag_[j] - radius);
    hi = std::max(hi, diag_[j] + radius);
  }
  return {lo, hi};
}

Tridiagonal Tridiagonal::combine(double a, const Tridiagonal& A, double b, const Tridiagonal& B) {
  if (A.size() != B.size()) throw InvalidArgument("Tridiagonal::combine: size mismatch");
  return Tridiagonal(a * A.diag_ + b * B.diag_, a * A.off_ + b * B.off_);
}

namespace {

// Bessel J_0..J_{m} at x >= 0 by Miller's backward recurrence, normalised
// with J_0 + 2 sum_k J_{2k} = 1.
std::vector<double> bessel_sequence(double x, int m) {
  std::vector<double> j(static_cast<std::size_t>(m) + 2, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  j[m + 1] = 0.0;
  j[m] = 1e-300;
  for (int k = m; k >= 1; --k) {
    j[k - 1] = (2.0 * k / x) * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e250) {
      for (int i = k - 1; i <= m + 1; ++i) j[i] *= 1e-250;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= m; k += 2) norm += 2.0 * j[k];
  for (auto& v : j) v /= norm;
  return j;
}

int miller_start(double x) { return static_cast<int>(std::ceil(x + 15.0 * std::cbrt(x) + 40.0)); }

int truncation_index(const std::vector<double>& j, double x, double eps) {
  int k = static_cast<int>(j.size()) - 2;
  // Last index with a coefficient above eps, past the turning point k ~ x.
  while (k > 0 && (std::abs(j[k]) < 0.1 * eps) && k > x) --k;
  return k + 1;
}

}  // namespace

int chebyshev_terms(double x, double eps) {
  x = std::abs(x);
  return truncation_index(bessel_sequence(x, miller_start(x)), x, eps);
}

void expm_apply(const Tridiagonal& H, double dt, Eigen::Ref<Matrix> block, double eps) {
  const Eigen::Index n = H.size();
  if (block.rows() != n) throw InvalidArgument("expm_apply: dimension mismatch");
  if (dt == 0.0) return;

  auto [lo, hi] = H.spectral_bounds();
  const double centre = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  const cplx global = std::exp(cplx(0.0, -centre * dt));
  if (half * std::abs(dt) < 1e-300) {
    block *= global;
    return;
  }
  half *= 1.0 + 1e-12;

  // Scaled operator (H - centre)/half has spectrum inside [-1, 1].
  const RealVector d = (H.diagonal().array() - centre) / half;
  const RealVector e = H.off_diagonal() / half;

  const double x = half * std::abs(dt);
  const auto bessel = bessel_sequence(x, miller_start(x));
  const int terms = truncation_index(bessel, x, eps);

  // exp(-i s y) = sum_k (2 - delta_k0) (-i)^k J_k(s) T_k(y) with s = half*dt.
  // Even-k coefficients are real and odd-k ones imaginary, so the sum is
  // accumulated as even + i * odd with real weights.
  std::vector<double> weight(static_cast<std::size_t>(terms));
  const double sign = dt > 0 ? 1.0 : -1.0;
  for (int k = 0; k < terms; ++k) {
    // (-i)^k = (-1)^(k/2) for even k, -(-1)^((k-1)/2) i for odd k.
    const double phase = (k % 2 == 0) ? ((k / 2) % 2 == 0 ? 1.0 : -1.0) : (((k - 1) / 2) % 2 == 0 ? -sign : sign);
    weight[k] = (k == 0 ? 1.0 : 2.0) * bessel[k] * phase;
  }

  Vector prev(n), curr(n), even(n), odd(n);
  const double* dd = d.data();
  const double* ee = e.data();
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    cplx* col = block.col(c).data();
    cplx* p = prev.data();
    cplx* q = curr.data();
    cplx* ae = even.data();
    cplx* ao = odd.data();
    for (Eigen::Index j = 0; j < n; ++j) {
      p[j] = col[j];
      ae[j] = weight[0] * col[j];
      ao[j] = 0.0;
    }
    if (terms > 1) {
      if (n == 1) {
        q[0] = dd[0] * p[0];
      } else {
        q[0] = dd[0] * p[0] + ee[0] * p[1];
        for (Eigen::Index j = 1; j + 1 < n; ++j) q[j] = ee[j - 1] * p[j - 1] + dd[j] * p[j] + ee[j] * p[j + 1];
        q[n - 1] = ee[n - 2] * p[n - 2] + dd[n - 1] * p[n - 1];
      }
      for (Eigen::Index j = 0; j < n; ++j) ao[j] += weight[1] * q[j];
    }
    for (int k = 2; k < terms; ++k) {
      // p <- T_k = 2 y T_{k-1} - T_{k-2}, then swap roles.
      const double wk = weight[k];
      cplx* acc = (k % 2 == 0) ? ae : ao;
      if (n == 1) {
        p[0] = 2.0 * dd[0] * q[0] - p[0];
        acc[0] += wk * p[0];
      } else {
        p[0] = 2.0 * (dd[0] * q[0] + ee[0] * q[1]) - p[0];
        acc[0] += wk * p[0];
        for (Eigen::Index j = 1; j + 1 < n; ++j) {
          p[j] = 2.0 * (ee[j - 1] * q[j - 1] + dd[j] * q[j] + ee[j] * q[j + 1]) - p[j];
          acc[j] += wk * p[j];
        }
        p[n - 1] = 2.0 * (ee[n - 2] * q[n - 2] + dd[n - 1] * q[n - 1]) - p[n - 1];
        acc[n - 1] += wk * p[n - 1];
      }
      std::swap(p, q);
    }
    const cplx i_unit(0.0, 1.0);
    for (Eigen::Index j = 0; j < n; ++j) col[j] = global * (ae[j] + i_unit * ao[j]);
  }
}

double max_abs(const Eigen::Ref<const Matrix>& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const Eigen::Ref<const Matrix>& u) {
  Matrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return max_abs(g);
}

}  // namespace bhd
