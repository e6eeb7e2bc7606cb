#include "bhd/error.hpp"
#include "bhd/semiclassical.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bhd;

TEST_SUITE("semiclassical") {

TEST_CASE("phase-space grid layout") {
  PhaseSpaceGrid g{21, 20};
  CHECK(g.size() == 420);
  CHECK(g.points().size() == 420);
  CHECK(g.phi_at(20) == doctest::Approx(std::numbers::pi));
  CHECK(g.phi_at(0) > -std::numbers::pi);
  CHECK(g.z_at(0) == doctest::Approx(-1.0 + 1.0 / 20));
  const auto p = g.at(21 * 3 + 5);
  CHECK(p.z == doctest::Approx(g.z_at(3)));
  CHECK(p.phi == doctest::Approx(g.phi_at(5)));
}

TEST_CASE("Bloch and phase-space coordinates are inverse") {
  const ClassicalState s{0.3, -2.0};
  const auto a = to_bloch(s);
  CHECK(a.phi == doctest::Approx(2.0));
  const auto back = from_bloch(a);
  CHECK(back.z == doctest::Approx(0.3));
  CHECK(back.phi == doctest::Approx(-2.0));
}

TEST_CASE("Jacobian matches finite differences and is traceless") {
  const auto d = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 2.0);
  const ClassicalState s{0.35, 1.1};
  const double t = 0.4, h = 1e-6;
  const auto j = mean_field_jacobian(s, t, d);
  const auto fz = [&](double dz) { return mean_field_rhs({s.z + dz, s.phi}, t, d); };
  const auto fp = [&](double dp) { return mean_field_rhs({s.z, s.phi + dp}, t, d); };
  CHECK(j(0, 0) == doctest::Approx((fz(h).dz - fz(-h).dz) / (2 * h)).epsilon(1e-6));
  CHECK(j(1, 0) == doctest::Approx((fz(h).dphi - fz(-h).dphi) / (2 * h)).epsilon(1e-6));
  CHECK(j(0, 1) == doctest::Approx((fp(h).dz - fp(-h).dz) / (2 * h)).epsilon(1e-6));
  CHECK(j(1, 1) == doctest::Approx((fp(h).dphi - fp(-h).dphi) / (2 * h)).epsilon(1e-6));
  CHECK(std::abs(j.trace()) < 1e-12);
}

// Initial points have |h| of order one, so the relative error is not
// dominated by a small denominator.
TEST_CASE("undriven flow conserves energy") {
  const auto d = DriveProtocol::from_nu(1, -1.0, 1.0, 0.0, 1.0);
  for (const ClassicalState s : {ClassicalState{0.5, 1.0}, ClassicalState{-0.3, 2.8}, ClassicalState{0.1, -3.0}}) {
    const double e0 = classical_energy(s, 0.0, d);
    const auto r = flow(s, d, 0.0, 100.0);
    CAPTURE(s.z);
    CHECK(std::abs(classical_energy(r.state, 100.0, d) - e0) / std::abs(e0) < 1e-10);
  }
}

TEST_CASE("flow is time-reversible and area-preserving") {
  const auto d = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 0.5);
  const ClassicalState s{0.2, 0.7};
  const auto f = flow_with_tangent(s, d, 0.0, 10.0);
  CHECK(f.jacobian.determinant() == doctest::Approx(1.0).epsilon(1e-7));
  const auto b = flow(f.state, d, 10.0, 0.0);
  CHECK(std::abs(b.state.z - s.z) < 1e-7);
  CHECK(std::abs(std::remainder(b.state.phi - s.phi, 2 * std::numbers::pi)) < 1e-7);
}

TEST_CASE("hyperbolic fixed point at (0, pi)") {
  // The tangent flow sees the local stretching rate of the fixed point,
  // which differs from the sea average.
  const auto d = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 0.5);
  // pi is inexact in floating point; the offset grows at the unstable rate.
  const auto r = flow({0.0, std::numbers::pi}, d, 0.0, 5.0);
  CHECK(std::abs(r.state.z) < 1e-11);
  const auto l = classical_lyapunov({0.0, std::numbers::pi}, d, 200 * d.period());
  CHECK(l.lambda > 0.1);
  CHECK(l.converged);
}

TEST_CASE("fixed point at the origin") {
  const auto d = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 7.0);
  const auto r = flow({0.0, 0.0}, d, 0.0, 50.0);
  CHECK(std::abs(r.state.z) < 1e-14);
  CHECK(std::abs(r.state.phi) < 1e-14);
}

TEST_CASE("Poincare sections") {
  const auto d = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 3.0);
  const auto init = poincare_initials(6);
  REQUIRE(init.size() == 6);
  const auto zero = poincare_section(init, d, 0);
  for (std::size_t i = 0; i < init.size(); ++i) {
    REQUIRE(zero.orbits[i].size() == 1);
    CHECK(zero.orbits[i][0].z == init[i].z);
    CHECK(zero.orbits[i][0].phi == init[i].phi);
  }
  const auto a = poincare_section(init, d, 20, {}, 1);
  const auto b = poincare_section(init, d, 20, {}, 3);
  for (std::size_t i = 0; i < init.size(); ++i) {
    REQUIRE(a.orbits[i].size() == 21);
    for (std::size_t k = 0; k < 21; ++k) {
      CHECK(a.orbits[i][k].z == b.orbits[i][k].z);
      CHECK(std::abs(a.orbits[i][k].z) <= 1.0);
    }
  }
  auto bad = d;
  bad.omega = 0.0;
  CHECK_THROWS_AS(poincare_section(init, bad, 5), InvalidArgument);
  CHECK_THROWS_AS(poincare_section(init, d, -1), InvalidArgument);
}

TEST_CASE("Lyapunov exponents: chaotic sea versus island") {
  const auto sea = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 0.5);
  const auto island = DriveProtocol::from_nu(1, -1.0, 1.0, 1.5, 7.0);
  const double t_sea = 1000 * sea.period();
  const auto ls = classical_lyapunov({0.2, 0.7}, sea, t_sea);
  CHECK(ls.lambda > 0.1);
  const auto lt = two_trajectory_lyapunov({0.2, 0.7}, sea, t_sea);
  CHECK(std::abs(lt.lambda - ls.lambda) / ls.lambda < 0.1);
  const auto li = classical_lyapunov({0.0, 0.0}, island, 500 * island.period());
  CHECK(li.lambda < 0.01);
  CHECK(li.periods == 450);
}

}
