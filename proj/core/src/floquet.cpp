#include "bhd/floquet.hpp"

#include "bhd/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bhd {

double FloquetDecomposition::period() const { return 2.0 * std::numbers::pi / omega; }

double fold_quasienergy(double eps, double omega) {
  const double half = 0.5 * omega;
  double f = std::fmod(eps + half, omega);
  if (f < 0.0) f += omega;
  f -= half;
  // (-omega/2, omega/2]: the lower edge maps to the upper one.
  if (f <= -half) f += omega;
  return f;
}

namespace {

struct SchurModes {
  Matrix vectors;
  Vector eigenvalues;
};

SchurModes schur_modes(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) throw ConvergenceError("floquet_decompose: Schur iteration failed", 0.0);
  return {schur.matrixU(), schur.matrixT().diagonal()};
}

void fill_spectrum(FloquetDecomposition& d, const Vector& eigenvalues, Eigen::Index offset) {
  const double period = d.period();
  for (Eigen::Index a = 0; a < eigenvalues.size(); ++a) {
    const cplx lambda = eigenvalues[a];
    d.max_modulus_defect = std::max(d.max_modulus_defect, std::abs(std::abs(lambda) - 1.0));
    d.quasienergies[offset + a] = fold_quasienergy(-std::arg(lambda) / period, d.omega);
  }
}

void finish_diagnostics(FloquetDecomposition& d, const Matrix& u) {
  const double period = d.period();
  for (Eigen::Index a = 0; a < d.size(); ++a) {
    const cplx phase = std::polar(1.0, -d.quasienergies[a] * period);
    d.max_residual = std::max(d.max_residual, (u * d.modes.col(a) - phase * d.modes.col(a)).norm());
  }
  Matrix gram = d.modes.adjoint() * d.modes;
  gram.diagonal().array() -= 1.0;
  d.gram_defect = max_abs(gram);
}

// Rotates each near-degenerate cluster onto P eigenvectors.
void resolve_parity(FloquetDecomposition& d, const Parity& parity, double cluster_gap) {
  const Eigen::Index n = d.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return d.quasienergies[a] < d.quasienergies[b]; });
  const double gap = cluster_gap * d.omega;

  std::vector<std::vector<Eigen::Index>> clusters;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index a = order[static_cast<std::size_t>(k)];
    if (k > 0 && d.quasienergies[a] - d.quasienergies[order[static_cast<std::size_t>(k - 1)]] < gap) {
      clusters.back().push_back(a);
    } else {
      clusters.push_back({a});
    }
  }
  // Merge across the zone edge.
  if (clusters.size() > 1) {
    const double wrap = d.quasienergies[order.front()] + d.omega - d.quasienergies[order.back()];
    if (wrap < gap) {
      clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
      clusters.pop_back();
    }
  }

  const RealMatrix p = parity.dense();
  for (const auto& cluster : clusters) {
    if (cluster.size() < 2) continue;
    const auto m = static_cast<Eigen::Index>(cluster.size());
    Matrix block(d.modes.rows(), m);
    for (Eigen::Index k = 0; k < m; ++k) block.col(k) = d.modes.col(cluster[static_cast<std::size_t>(k)]);
    Matrix restricted = block.adjoint() * p.cast<cplx>() * block;
    restricted = 0.5 * (restricted + restricted.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(restricted);
    const Matrix rotated = block * es.eigenvectors();
    for (Eigen::Index k = 0; k < m; ++k) d.modes.col(cluster[static_cast<std::size_t>(k)]) = rotated.col(k);
  }

  d.parities.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double expectation = d.modes.col(a).dot(parity.apply(d.modes.col(a))).real();
    d.parities[static_cast<std::size_t>(a)] = expectation >= 0.0 ? 1 : -1;
    d.max_parity_impurity = std::max(d.max_parity_impurity, 1.0 - std::abs(expectation));
  }
}

}  // namespace

FloquetDecomposition floquet_decompose(const Matrix& U, double omega, const Parity* parity, double cluster_gap) {
  if (!(omega > 0.0)) throw InvalidArgument("floquet_decompose: omega must be positive");
  if (U.rows() != U.cols() || U.rows() == 0) throw InvalidArgument("floquet_decompose: U must be square");
  if (parity && parity->dim() != U.rows()) throw InvalidArgument("floquet_decompose: parity dimension mismatch");
  const double defect = unitarity_defect(U);
  if (defect > 1e-8) throw InvalidArgument("floquet_decompose: U is not unitary (defect " + std::to_string(defect) + ")");

  FloquetDecomposition d;
  d.omega = omega;
  const SchurModes sm = schur_modes(U);
  d.modes = sm.vectors;
  d.quasienergies.resize(U.rows());
  fill_spectrum(d, sm.eigenvalues, 0);
  if (parity) resolve_parity(d, *parity, cluster_gap);
  finish_diagnostics(d, U);
  return d;
}

FloquetDecomposition floquet_decompose(const SectorPropagator& U, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("floquet_decompose: omega must be positive");
  const Eigen::Index d_full = U.bases[0].rows();
  FloquetDecomposition d;
  d.omega = omega;
  d.modes = Matrix::Zero(d_full, d_full);
  d.quasienergies.resize(d_full);
  d.parities.assign(static_cast<std::size_t>(d_full), 0);
  Eigen::Index offset = 0;
  for (int s = 0; s < 2; ++s) {
    const Eigen::Index ds = U.blocks[s].rows();
    if (ds == 0) continue;
    const double defect = unitarity_defect(U.blocks[s]);
    if (defect > 1e-8) throw InvalidArgument("floquet_decompose: sector block is not unitary");
    const SchurModes sm = schur_modes(U.blocks[s]);
    d.modes.middleCols(offset, ds) = U.bases[s].cast<cplx>() * sm.vectors;
    fill_spectrum(d, sm.eigenvalues, offset);
    for (Eigen::Index a = 0; a < ds; ++a) d.parities[static_cast<std::size_t>(offset + a)] = s == 0 ? 1 : -1;
    offset += ds;
  }
  const Matrix full = U.full();
  finish_diagnostics(d, full);
  // Parity-mixing blocks of U in the sector basis; zero when assembled from blocks,
  // reported for uniformity with the full-basis path.
  const Matrix q0 = U.bases[0].cast<cplx>();
  const Matrix q1 = U.bases[1].cast<cplx>();
  if (q0.cols() > 0 && q1.cols() > 0) d.off_block_magnitude = max_abs(q0.adjoint() * full * q1);
  return d;
}

ParitySplit sort_by_parity(const FloquetDecomposition& decomp, const Parity& parity, double purity_tol) {
  if (parity.dim() != decomp.modes.rows()) throw InvalidArgument("sort_by_parity: dimension mismatch");
  ParitySplit split;
  split.expectation.resize(decomp.size());
  for (Eigen::Index a = 0; a < decomp.size(); ++a) {
    const double e = decomp.modes.col(a).dot(parity.apply(decomp.modes.col(a))).real();
    split.expectation[a] = e;
    split.sectors[e >= 0.0 ? 0 : 1].push_back(a);
    if (std::abs(e) <= 1.0 - purity_tol) split.ambiguous.push_back(a);
  }
  return split;
}

std::vector<double> sector_quasienergies(const FloquetDecomposition& decomp, const std::vector<Eigen::Index>& modes) {
  std::vector<double> q;
  q.reserve(modes.size());
  for (auto a : modes) q.push_back(decomp.quasienergies[a]);
  std::sort(q.begin(), q.end());
  return q;
}

}  // namespace bhd
