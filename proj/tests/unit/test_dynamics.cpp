#include "bhd/dynamics.hpp"
#include "bhd/error.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace bhd;

namespace {

Matrix dense_expm(const RealMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
  const Vector phases = (cplx(0.0, -dt) * es.eigenvalues().cast<cplx>()).array().exp().matrix();
  return es.eigenvectors().cast<cplx>() * phases.asDiagonal() * es.eigenvectors().transpose().cast<cplx>();
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("Chebyshev exponential matches eigendecomposition") {
  const int n = 30;
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 0.0, 1.0);
  const auto h = hamiltonian_at(drive, 0.0, SpinOperators(n));
  for (double dt : {0.01, 0.7, -2.5, 40.0}) {
    Matrix block = Matrix::Random(n + 1, 3);
    const Matrix expect = dense_expm(h.dense(), dt) * block;
    expm_apply(h, dt, block);
    // The eigendecomposition reference carries a phase error ~ eps |E| |dt|.
    const auto [lo, hi] = h.spectral_bounds();
    CAPTURE(dt);
    CHECK(max_abs(block - expect) < 1e-14 * (10.0 + std::max(std::abs(lo), std::abs(hi)) * std::abs(dt)));
  }
}

TEST_CASE("Tridiagonal algebra") {
  Tridiagonal t(RealVector::LinSpaced(4, 1.0, 4.0), RealVector::Constant(3, 0.5));
  const auto [lo, hi] = t.spectral_bounds();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(t.dense());
  CHECK(lo <= es.eigenvalues().minCoeff());
  CHECK(hi >= es.eigenvalues().maxCoeff());
  Vector v = Vector::Random(4);
  CHECK(max_abs(t * v - t.dense().cast<cplx>() * v) < 1e-14);
  const auto c = Tridiagonal::combine(2.0, t, -1.0, t);
  CHECK((c.dense() - t.dense()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("one-period propagator is unitary and parity-symmetric") {
  const int n = 60;
  SpinOperators ops(n);
  Parity parity(n);
  const Matrix p = parity.dense().cast<cplx>();
  for (double omega : {0.5, 7.0}) {
    const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, omega);
    const auto full = one_period_propagator(drive, ops);
    const auto sectors = one_period_propagator_sectors(drive, ops, parity);
    CAPTURE(omega);
    CHECK(unitarity_defect(full.U) <= 1e-9);
    CHECK(max_abs(p * full.U - full.U * p) <= 1e-8);
    CHECK(full.diagnostics.halving_defect <= 1e-8);
    const Matrix u = sectors.full();
    CHECK(unitarity_defect(u) <= 1e-9);
    CHECK(max_abs(p * u - u * p) <= 1e-12);
    // Both constructions agree to the propagation tolerance.
    CHECK(max_abs(u - full.U) < 1e-7);
  }
}

TEST_CASE("an unmodulated drive is propagated exactly") {
  const int n = 20;
  SpinOperators ops(n);
  const auto drive = DriveProtocol::from_nu(n, -2.0, 1.0, 0.0, 3.0);
  const auto u = one_period_propagator(drive, ops);
  const RealMatrix h = hamiltonian_at(drive, 0.0, ops).dense();
  CHECK(max_abs(u.U - dense_expm(h, drive.period())) < 1e-12);
}

TEST_CASE("stepping is fourth order and time-reversible") {
  const int n = 40;
  SpinOperators ops(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, 2.0);
  const auto h = split_hamiltonian(drive, ops);
  const Vector psi0 = coherent_state(n, {1.0, 0.5});
  const double t1 = drive.period();
  const Vector ref = Propagator(drive, h, 4096).advance(psi0, 0.0, t1);
  const double e1 = (Propagator(drive, h, 64).advance(psi0, 0.0, t1) - ref).norm();
  const double e2 = (Propagator(drive, h, 128).advance(psi0, 0.0, t1) - ref).norm();
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);

  Propagator prop(drive, h, 100);
  const Vector fwd = prop.advance(psi0, 0.3, 5.0);
  const Vector back = prop.advance(fwd, 5.0, 0.3);
  CHECK((back - psi0).norm() < 1e-12);
  CHECK(std::abs(fwd.norm() - 1.0) < 1e-12);
}

TEST_CASE("calibration meets the halving tolerance") {
  const int n = 50;
  SpinOperators ops(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, 0.5);
  const auto h = split_hamiltonian(drive, ops);
  const Matrix probe = coherent_state(n, {1.3, 0.2});
  const auto cal = calibrate_steps(drive, h, probe, 1e-8);
  CHECK(cal.halving_defect <= 1e-8);
  StepSearch tight;
  tight.max_steps_per_period = 8;
  tight.initial_steps_per_period = 8;
  CHECK_THROWS_AS(calibrate_steps(drive, h, probe, 1e-14, tight), ConvergenceError);
}

TEST_CASE("sampled evolution and stroboscopic powers agree") {
  const int n = 16;
  SpinOperators ops(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, 3.0);
  const auto u = one_period_propagator(drive, ops);
  const Vector psi0 = coherent_state(n, {0.8, 1.0});
  const auto strobe = stroboscopic_evolve(psi0, u.U, 4);
  REQUIRE(strobe.size() == 5);
  const auto h = split_hamiltonian(drive, ops);
  Propagator prop(drive, h, u.diagnostics.steps_per_period);
  const std::vector<double> times = {0.0, drive.period(), 2 * drive.period(), 4 * drive.period()};
  const auto samples = propagate_samples(psi0, prop, times);
  CHECK(max_abs(samples.states[1] - strobe[1]) < 1e-9);
  CHECK(max_abs(samples.states[3] - strobe[4]) < 1e-9);
  CHECK(samples.unitarity_defect < 1e-12);
  const auto ev = evolve(psi0, drive, 0.0, 2 * drive.period(), 1e-10);
  CHECK(max_abs(ev - strobe[2]) < 1e-8);
}

TEST_CASE("nearest unitary restores a perturbed propagator") {
  Eigen::HouseholderQR<Matrix> qr(Matrix::Random(12, 12));
  const Matrix q = qr.householderQ();
  const Matrix noisy = q + 1e-6 * Matrix::Random(12, 12);
  const Matrix fixed = nearest_unitary(noisy);
  CHECK(unitarity_defect(fixed) < 1e-13);
  CHECK(max_abs(fixed - q) < 1e-5);
}

TEST_CASE("drive validation") {
  CHECK_THROWS_AS(DriveProtocol::from_nu(0, -1.0, 1.0, 1.5, 1.0), InvalidArgument);
  auto d = DriveProtocol::from_nu(10, -1.0, 1.0, 1.5, 0.0);
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
  CHECK_THROWS_AS(d.period(), InvalidArgument);
  d.omega = 2.0;
  CHECK(d.tunneling(0.0) == doctest::Approx(2.5));
  CHECK(d.nu() == doctest::Approx(-1.0));
}

}
