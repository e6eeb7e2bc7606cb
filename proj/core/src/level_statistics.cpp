#include "bhd/level_statistics.hpp"

#include "bhd/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bhd {

LevelStatistics level_spacing_ratios(std::span<const double> sorted, double circumference) {
  const std::size_t n = sorted.size();
  if (n < 3) throw InvalidArgument("level_spacing_ratios: a sector needs at least three levels");
  if (!(circumference > 0.0)) throw InvalidArgument("level_spacing_ratios: circumference must be positive");
  if (!std::is_sorted(sorted.begin(), sorted.end())) throw InvalidArgument("level_spacing_ratios: levels not sorted");

  LevelStatistics st;
  st.spacings.resize(n);
  for (std::size_t k = 0; k + 1 < n; ++k) st.spacings[k] = sorted[k + 1] - sorted[k];
  st.spacings[n - 1] = sorted[0] + circumference - sorted[n - 1];

  st.ratios.resize(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = st.spacings[k];
    const double b = st.spacings[(k + 1) % n];
    const double hi = std::max(a, b);
    st.ratios[k] = hi > 0.0 ? std::min(a, b) / hi : 1.0;
    sum += st.ratios[k];
  }
  st.mean_ratio = sum / static_cast<double>(n);

  const double mean_spacing = circumference / static_cast<double>(n);
  st.normalized_spacings.resize(n);
  for (std::size_t k = 0; k < n; ++k) st.normalized_spacings[k] = st.spacings[k] / mean_spacing;
  return st;
}

SpectrumStatistics spectrum_statistics(const FloquetDecomposition& decomp, const ParitySplit& split) {
  SpectrumStatistics out;
  double sum = 0.0;
  std::size_t count = 0;
  for (int s = 0; s < 2; ++s) {
    const auto levels = sector_quasienergies(decomp, split.sectors[s]);
    out.sectors[s] = level_spacing_ratios(levels, decomp.omega);
    for (double r : out.sectors[s].ratios) sum += r;
    count += out.sectors[s].ratios.size();
    out.pooled_normalized_spacings.insert(out.pooled_normalized_spacings.end(),
                                          out.sectors[s].normalized_spacings.begin(),
                                          out.sectors[s].normalized_spacings.end());
  }
  out.pooled_mean_ratio = sum / static_cast<double>(count);
  double sq = 0.0;
  for (const auto& sector : out.sectors) {
    for (double r : sector.ratios) sq += (r - out.pooled_mean_ratio) * (r - out.pooled_mean_ratio);
  }
  out.pooled_std_error = std::sqrt(sq / static_cast<double>(count)) / std::sqrt(static_cast<double>(count));
  return out;
}

double unsorted_mean_ratio(const FloquetDecomposition& decomp) {
  std::vector<double> all(decomp.quasienergies.data(), decomp.quasienergies.data() + decomp.size());
  std::sort(all.begin(), all.end());
  return level_spacing_ratios(all, decomp.omega).mean_ratio;
}

double poisson_mean_ratio() { return 2.0 * std::numbers::ln2 - 1.0; }

std::vector<double> sample_coe_eigenphases(int dim, std::mt19937_64& rng) {
  if (dim < 1) throw InvalidArgument("sample_coe_eigenphases: dim must be >= 1");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Matrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = cplx(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const cplx rk = r(k, k);
    q.col(k) *= std::abs(rk) > 0.0 ? rk / std::abs(rk) : cplx(1.0);
  }
  const Matrix coe = q.transpose() * q;
  Eigen::ComplexEigenSolver<Matrix> es(coe, false);
  std::vector<double> phases(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) phases[static_cast<std::size_t>(k)] = std::arg(es.eigenvalues()[k]);
  std::sort(phases.begin(), phases.end());
  return phases;
}

PoissonLevels sample_poisson_levels(int count, std::mt19937_64& rng) {
  if (count < 1) throw InvalidArgument("sample_poisson_levels: count must be >= 1");
  std::exponential_distribution<double> expo(1.0);
  PoissonLevels out;
  out.levels.resize(static_cast<std::size_t>(count));
  double x = 0.0;
  for (int k = 0; k < count; ++k) {
    out.levels[static_cast<std::size_t>(k)] = x;
    x += expo(rng);
  }
  out.circumference = x;
  return out;
}

double sampled_coe_mean_ratio(int dim, int draws, std::uint64_t seed) {
  if (draws < 1) throw InvalidArgument("sampled_coe_mean_ratio: draws must be >= 1");
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int k = 0; k < draws; ++k) {
    sum += level_spacing_ratios(sample_coe_eigenphases(dim, rng), 2.0 * std::numbers::pi).mean_ratio;
  }
  return sum / draws;
}

}  // namespace bhd
