#include "bhd/error.hpp"
#include "bhd/spin.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bhd;

namespace {

const std::vector<int> kSizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 100};

double rel(const Matrix& a, const Matrix& b) {
  const double scale = std::max(max_abs(b), 1.0);
  return max_abs(a - b) / scale;
}

}  // namespace

TEST_SUITE("spin") {

TEST_CASE("commutators close the su(2) algebra") {
  for (int n : kSizes) {
    SpinOperators ops(n);
    const Matrix sx = ops.sx_dense().cast<cplx>();
    const Matrix sy = ops.sy_dense();
    const Matrix sz = ops.sz_dense().cast<cplx>();
    const cplx i(0.0, 1.0);
    CAPTURE(n);
    CHECK(rel(sx * sy - sy * sx, i * sz) < 1e-12);
    CHECK(rel(sy * sz - sz * sy, i * sx) < 1e-12);
    CHECK(rel(sz * sx - sx * sz, i * sy) < 1e-12);
  }
}

TEST_CASE("Casimir equals S(S+1)") {
  for (int n : kSizes) {
    SpinOperators ops(n);
    const Matrix sx = ops.sx_dense().cast<cplx>();
    const Matrix sy = ops.sy_dense();
    const Matrix sz = ops.sz_dense().cast<cplx>();
    const double s = ops.spin();
    const Matrix expect = Matrix::Identity(n + 1, n + 1) * (s * (s + 1.0));
    CAPTURE(n);
    CHECK(rel(sx * sx + sy * sy + sz * sz, expect) < 1e-12);
    CHECK(rel(ops.sy2_dense().cast<cplx>(), sy * sy) < 1e-12);
  }
}

TEST_CASE("trace identities Tr(Sa Sb) = delta_ab N(N+1)(N+2)/12") {
  for (int n : kSizes) {
    SpinOperators ops(n);
    const std::array<Matrix, 3> s = {ops.sx_dense().cast<cplx>(), ops.sy_dense(), ops.sz_dense().cast<cplx>()};
    const double expect = n * (n + 1.0) * (n + 2.0) / 12.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const cplx tr = (s[a] * s[b]).trace();
        CAPTURE(n);
        CAPTURE(a);
        CAPTURE(b);
        if (a == b) {
          CHECK(std::abs(tr - expect) / expect < 1e-12);
        } else {
          CHECK(std::abs(tr) / expect < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("matrix-free applications match the dense operators") {
  SpinOperators ops(9);
  Vector v = Vector::Random(10);
  CHECK(max_abs(ops.apply_sx(v) - ops.sx_dense().cast<cplx>() * v) < 1e-14);
  CHECK(max_abs(ops.apply_sy(v) - ops.sy_dense() * v) < 1e-14);
  CHECK(max_abs(ops.apply_sz(v) - ops.sz_dense().cast<cplx>() * v) < 1e-14);
}

TEST_CASE("coherent states: norm, mean spin, overlap") {
  for (int n : {1, 7, 100, 1000}) {
    const BlochAngles a{1.1, -2.3};
    const auto psi = coherent_state(n, a);
    CAPTURE(n);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    SpinOperators ops(n);
    const double sx = psi.dot(ops.apply_sx(psi)).real();
    const double sy = psi.dot(ops.apply_sy(psi)).real();
    const double sz = psi.dot(ops.apply_sz(psi)).real();
    const double s = 0.5 * n;
    CHECK(sx == doctest::Approx(s * std::sin(a.theta) * std::cos(a.phi)).epsilon(1e-10));
    CHECK(sy == doctest::Approx(s * std::sin(a.theta) * std::sin(a.phi)).epsilon(1e-10));
    CHECK(sz == doctest::Approx(s * std::cos(a.theta)).epsilon(1e-10));
  }
  // |<a|b>|^2 = ((1 + n_a . n_b) / 2)^N
  const int n = 20;
  const BlochAngles a{0.4, 0.3}, b{0.9, -0.5};
  const double dot = std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi) + std::cos(a.theta) * std::cos(b.theta);
  const double overlap = std::norm(coherent_state(n, a).dot(coherent_state(n, b)));
  CHECK(overlap == doctest::Approx(std::pow(0.5 * (1.0 + dot), n)).epsilon(1e-12));
}

TEST_CASE("coherent state at the poles is a Dicke state") {
  const auto up = coherent_state(6, {0.0, 0.0});
  CHECK(std::abs(std::abs(up(6)) - 1.0) < 1e-14);
  const auto down = coherent_state(6, {std::numbers::pi, 0.0});
  CHECK(std::abs(std::abs(down(0)) - 1.0) < 1e-14);
}

TEST_CASE("invalid angles are rejected") {
  CHECK_THROWS_AS(coherent_state(4, {-0.1, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(coherent_state(4, {0.5, 4.0}), InvalidArgument);
  CHECK_THROWS_AS(SpinOperators(0), InvalidArgument);
}

TEST_CASE("spin component and its exponential") {
  const int n = 8;
  SpinOperators ops(n);
  const BlochAngles a{0.7, 2.1};
  SpinComponent w(ops, a);
  const Matrix expect = std::sin(a.theta) * std::cos(a.phi) * ops.sx_dense().cast<cplx>() +
                        std::sin(a.theta) * std::sin(a.phi) * ops.sy_dense() +
                        std::cos(a.theta) * ops.sz_dense().cast<cplx>();
  CHECK(max_abs(w.dense() - expect) < 1e-13);
  // The coherent state along `a` is the top eigenvector.
  const auto psi = coherent_state(n, a);
  CHECK(max_abs(w.apply(psi) - 0.5 * n * psi) < 1e-12);

  Eigen::SelfAdjointEigenSolver<Matrix> es(expect);
  const double delta = 0.3;
  const Matrix ex = es.eigenvectors() *
                    (cplx(0.0, delta) * es.eigenvalues().cast<cplx>()).array().exp().matrix().asDiagonal() *
                    es.eigenvectors().adjoint();
  Vector v = Vector::Random(n + 1);
  CHECK(max_abs(w.exp_apply(delta, v) - ex * v) < 1e-12);
}

TEST_CASE("parity: literal form, square, and sectors") {
  for (int n : {1, 2, 5, 12, 40}) {
    SpinOperators ops(n);
    Parity p(n);
    const Matrix literal = parity_operator_dense(ops);
    const Matrix pd = p.dense().cast<cplx>();
    CAPTURE(n);
    CHECK(max_abs(literal - pd) < 1e-10);
    CHECK(max_abs(pd * pd - Matrix::Identity(n + 1, n + 1)) < 1e-14);
    CHECK(p.sector_dim(0) + p.sector_dim(1) == n + 1);
    for (int s = 0; s < 2; ++s) {
      const RealMatrix b = p.sector_basis(s);
      CHECK((b.transpose() * b - RealMatrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff() < 1e-14);
      const double sign = s == 0 ? 1.0 : -1.0;
      CHECK((p.dense() * b - sign * b).cwiseAbs().maxCoeff() < 1e-14);
      const RealMatrix proj = b.transpose() * ops.sx_dense() * b;
      CHECK((p.project(ops.sx(), s).dense() - proj).cwiseAbs().maxCoeff() < 1e-13);
    }
    // Sx and Sz^2 commute with P; Sz anticommutes.
    const RealMatrix sx = ops.sx_dense();
    const RealMatrix sz = ops.sz_dense();
    CHECK((p.dense() * sx - sx * p.dense()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((p.dense() * sz + sz * p.dense()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("variance in the maximally mixed state") {
  const int n = 10;
  SpinOperators ops(n);
  const auto mv = maximally_mixed_moments(SpinComponent(ops, {1.2, 0.4}).dense());
  CHECK(std::abs(mv.mean) < 1e-13);
  CHECK(mv.variance == doctest::Approx(n * (n + 2.0) / 12.0).epsilon(1e-13));
  const auto psi = coherent_state(n, {1.2, 0.4});
  const auto cs = expectation_and_variance(psi, SpinComponent(ops, {1.2, 0.4}));
  CHECK(cs.mean == doctest::Approx(0.5 * n));
  CHECK(std::abs(cs.variance) < 1e-11);
  CHECK_THROWS_AS(expectation_and_variance(psi, Matrix(Matrix::Random(n + 1, n + 1))), InvalidArgument);
}

}
