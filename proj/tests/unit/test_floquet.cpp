#include "bhd/delocalization.hpp"
#include "bhd/error.hpp"
#include "bhd/floquet.hpp"
#include "bhd/level_statistics.hpp"
#include "bhd/magnus.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bhd;

namespace {

struct Setup {
  SpinOperators ops;
  Parity parity;
  DriveProtocol drive;
  SectorPropagator u;
  FloquetDecomposition decomp;
};

Setup make(int n, double omega) {
  SpinOperators ops(n);
  Parity parity(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, omega);
  auto u = one_period_propagator_sectors(drive, ops, parity);
  auto decomp = floquet_decompose(u, omega);
  return {std::move(ops), std::move(parity), drive, std::move(u), std::move(decomp)};
}

}  // namespace

TEST_SUITE("floquet") {

TEST_CASE("quasienergy folding") {
  CHECK(fold_quasienergy(0.0, 2.0) == doctest::Approx(0.0));
  CHECK(fold_quasienergy(1.0, 2.0) == doctest::Approx(1.0));
  CHECK(fold_quasienergy(-1.0, 2.0) == doctest::Approx(1.0));
  CHECK(fold_quasienergy(2.5, 2.0) == doctest::Approx(0.5));
  CHECK(fold_quasienergy(-2.9, 2.0) == doctest::Approx(-0.9));
}

TEST_CASE("decomposition of the sector propagator") {
  auto s = make(41, 3.0);
  const auto& d = s.decomp;
  CHECK(d.size() == 42);
  CHECK(d.max_residual < 1e-10);
  CHECK(d.gram_defect < 1e-12);
  CHECK(d.max_modulus_defect < 1e-10);
  for (Eigen::Index a = 0; a < d.size(); ++a) {
    CHECK(d.quasienergies(a) > -0.5 * 3.0);
    CHECK(d.quasienergies(a) <= 0.5 * 3.0);
    CHECK(std::abs(d.parities[a]) == 1);
  }
  // Sector-built and dense decompositions carry the same spectrum.
  const Matrix full = s.u.full();
  const auto dense = floquet_decompose(full, 3.0, &s.parity);
  std::vector<double> a(d.quasienergies.data(), d.quasienergies.data() + d.size());
  std::vector<double> b(dense.quasienergies.data(), dense.quasienergies.data() + dense.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
  CHECK(dense.max_parity_impurity < 1e-8);
}

TEST_CASE("undriven quasienergies are the folded static energies") {
  const int n = 12;
  SpinOperators ops(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 0.0, 1.3);
  const auto u = one_period_propagator(drive, ops);
  const auto d = floquet_decompose(u.U, 1.3);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(hamiltonian_at(drive, 0.0, ops).dense());
  std::vector<double> expect, got(d.quasienergies.data(), d.quasienergies.data() + d.size());
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) expect.push_back(fold_quasienergy(es.eigenvalues()(k), 1.3));
  std::sort(expect.begin(), expect.end());
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("parity sorting splits the modes by sector size") {
  auto s = make(30, 1.0);
  const auto split = sort_by_parity(s.decomp, s.parity);
  CHECK(split.ambiguous.empty());
  CHECK(split.sectors[0].size() == 16);
  CHECK(split.sectors[1].size() == 15);
  const auto q = sector_quasienergies(s.decomp, split.sectors[0]);
  CHECK(std::is_sorted(q.begin(), q.end()));
}

}

TEST_SUITE("level_statistics") {

TEST_CASE("ratios of a hand-made spectrum") {
  // Spacings 1, 2, 1 on a circle of length 4 -> ratios 1/2, 1/2, 1.
  const std::vector<double> levels = {0.0, 1.0, 3.0};
  const auto st = level_spacing_ratios(levels, 4.0);
  REQUIRE(st.spacings.size() == 3);
  CHECK(st.spacings[2] == doctest::Approx(1.0));
  CHECK(st.ratios[0] == doctest::Approx(0.5));
  CHECK(st.ratios[1] == doctest::Approx(0.5));
  CHECK(st.ratios[2] == doctest::Approx(1.0));
  CHECK(st.mean_ratio == doctest::Approx(2.0 / 3.0));
  CHECK(st.normalized_spacings[1] == doctest::Approx(2.0 / (4.0 / 3.0)));
  const std::vector<double> two = {0.0, 1.0};
  CHECK_THROWS_AS(level_spacing_ratios(two, 4.0), InvalidArgument);
}

TEST_CASE("equally spaced levels have r = 1") {
  std::vector<double> l;
  for (int i = 0; i < 50; ++i) l.push_back(0.1 * i);
  CHECK(level_spacing_ratios(l, 5.0).mean_ratio == doctest::Approx(1.0));
}

TEST_CASE("Poisson levels approach 2 ln 2 - 1") {
  CHECK(poisson_mean_ratio() == doctest::Approx(2.0 * std::log(2.0) - 1.0));
  std::mt19937_64 rng(11);
  const auto p = sample_poisson_levels(200000, rng);
  const auto st = level_spacing_ratios(p.levels, p.circumference);
  CHECK(std::abs(st.mean_ratio - poisson_mean_ratio()) < 0.004);
}

TEST_CASE("COE sampler agrees with the independent oracle") {
  // tests/oracles/coe_mean_ratio.py --dims 51 --draws 2000 --seed 7
  // -> mean_r = 0.53115, standard error 0.00097
  const double oracle = 0.53115, oracle_se = 0.00097;
  const double got = sampled_coe_mean_ratio(51, 2000, 3);
  CHECK(std::abs(got - oracle) < 3.0 * std::sqrt(2.0) * oracle_se);

  std::mt19937_64 rng(5);
  const auto ph = sample_coe_eigenphases(40, rng);
  CHECK(ph.size() == 40);
  for (double x : ph) CHECK(std::abs(x) <= std::numbers::pi + 1e-12);
}

TEST_CASE("sampler is deterministic in the seed") {
  CHECK(sampled_coe_mean_ratio(20, 5, 42) == sampled_coe_mean_ratio(20, 5, 42));
  CHECK(sampled_coe_mean_ratio(20, 5, 42) != sampled_coe_mean_ratio(20, 5, 43));
}

TEST_CASE("pooled statistics and the unsorted probe") {
  auto s = make(200, 0.5);
  const auto split = sort_by_parity(s.decomp, s.parity);
  const auto st = spectrum_statistics(s.decomp, split);
  CHECK(st.sectors[0].ratios.size() + st.sectors[1].ratios.size() == 201);
  CHECK(st.pooled_std_error > 0.0);
  // Mixing two independent spectra drives r towards Poisson.
  CHECK(unsorted_mean_ratio(s.decomp) < st.pooled_mean_ratio - 0.03);
}

}

TEST_SUITE("delocalization") {

TEST_CASE("Shannon entropy") {
  const std::vector<double> uniform(8, 0.125);
  CHECK(shannon_entropy(uniform) == doctest::Approx(std::log(8.0)));
  const std::vector<double> point = {0.0, 1.0, 0.0};
  CHECK(shannon_entropy(point) == doctest::Approx(0.0));
  const std::vector<double> bad_sum = {0.5, 0.4};
  CHECK_THROWS_AS(shannon_entropy(bad_sum), InvalidArgument);
  const std::vector<double> negative = {1.2, -0.2};
  CHECK_THROWS_AS(shannon_entropy(negative), InvalidArgument);
  CHECK(coe_entropy(100.0) == doctest::Approx(std::log(48.0)));
}

TEST_CASE("identical bases have zero entropy") {
  // Floquet modes of a static drive are the eigenstates of H itself.
  const int n = 24;
  SpinOperators ops(n);
  Parity parity(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 0.0, 0.37);
  const auto u = one_period_propagator_sectors(drive, ops, parity);
  const auto d = floquet_decompose(u, 0.37);
  const auto r = mode_delocalization(d, effective_hamiltonian(drive, ops, 0), parity);
  CHECK(r.entropies.size() == 25);
  CHECK(r.mean < 1e-6);
  CHECK(r.completeness_defect < 1e-10);
}

TEST_CASE("entropy bounds and both distribution directions") {
  auto s = make(60, 0.5);
  const auto eff = effective_hamiltonian(s.drive, s.ops, 2);
  const auto a = mode_delocalization(s.decomp, eff, s.parity, DelocalizationBasis::FloquetInEffective);
  const auto b = mode_delocalization(s.decomp, eff, s.parity, DelocalizationBasis::EffectiveInFloquet);
  CHECK(a.sector_sizes[0] == 31);
  CHECK(a.sector_sizes[1] == 30);
  for (std::size_t i = 0; i < a.entropies.size(); ++i) {
    CHECK(a.entropies[i] >= 0.0);
    CHECK(a.entropies[i] <= std::log(static_cast<double>(a.sector_sizes[a.sector[i]])) + 1e-12);
  }
  CHECK(a.mean_scaled > 0.5);
  CHECK(a.completeness_defect < 1e-10);
  CHECK(b.completeness_defect < 1e-10);
  CHECK(b.entropies.size() == a.entropies.size());
}

TEST_CASE("coherent entropy map is bounded by one") {
  auto s = make(40, 7.0);
  PhaseSpaceGrid g{6, 5};
  const auto pts = g.points();
  const auto m = coherent_entropy_map(pts, s.decomp, 2);
  REQUIRE(m.scaled.size() == 30);
  for (double x : m.scaled) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  CHECK(m.max_weight_defect < 1e-10);
  CHECK(coherent_entropy_map(pts, s.decomp, 1).scaled == m.scaled);
}

}

TEST_SUITE("magnus") {

TEST_CASE("zeroth order is the time-averaged Hamiltonian") {
  const int n = 10;
  SpinOperators ops(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, 5.0);
  const RealMatrix h0 = effective_hamiltonian(drive, ops, 0);
  const RealMatrix expect = hamiltonian_at(DriveProtocol::from_nu(n, -1.0, 1.0, 0.0, 5.0), 0.0, ops).dense();
  CHECK((h0 - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(effective_hamiltonian(drive, ops, 1), InvalidArgument);
}

TEST_CASE("second order improves the high-frequency limit") {
  // Compare exp(-i H_eff T) with the exact one-period propagator. The
  // second-order correction must remove most of the residual, and the
  // residual must shrink with the period.
  const int n = 20;
  SpinOperators ops(n);
  auto residual = [&](double omega, int order) {
    const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, omega);
    const auto u = one_period_propagator(drive, ops).U;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(effective_hamiltonian(drive, ops, order));
    const Vector ph = (cplx(0.0, -drive.period()) * es.eigenvalues().cast<cplx>()).array().exp().matrix();
    const Matrix ueff = es.eigenvectors().cast<cplx>() * ph.asDiagonal() * es.eigenvectors().transpose().cast<cplx>();
    return max_abs(u - ueff);
  };
  const double r0 = residual(20.0, 0), r2 = residual(20.0, 2);
  CHECK(r2 < 0.2 * r0);
  CHECK(residual(40.0, 2) < 0.5 * r2);
}

TEST_CASE("the correction is real symmetric and parity-even") {
  const int n = 15;
  SpinOperators ops(n);
  Parity p(n);
  const auto drive = DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, 7.0);
  const RealMatrix m2 = magnus_second_order(drive, ops);
  CHECK((m2 - m2.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((p.dense() * m2 - m2 * p.dense()).cwiseAbs().maxCoeff() < 1e-12);
}

}
