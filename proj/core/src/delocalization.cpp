#include "bhd/delocalization.hpp"

#include "bhd/error.hpp"
#include "bhd/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace bhd {

double shannon_entropy(std::span<const double> weights, double sum_tol) {
  double total = 0.0, s = 0.0;
  for (double p : weights) {
    if (p < 0.0 || !std::isfinite(p)) throw InvalidArgument("shannon_entropy: weights must be finite and nonnegative");
    total += p;
    if (p > 0.0) s -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > sum_tol) throw InvalidArgument("shannon_entropy: weights do not sum to 1");
  return s;
}

double coe_entropy(double d) {
  if (!(d >= 1.0)) throw InvalidArgument("coe_entropy: basis size must be >= 1");
  return std::log(0.48 * d);
}

DelocalizationResult mode_delocalization(const FloquetDecomposition& decomp, const RealMatrix& effective,
                                         const Parity& parity, DelocalizationBasis basis) {
  const Eigen::Index dim = decomp.size();
  if (effective.rows() != dim || effective.cols() != dim || parity.dim() != dim) {
    throw InvalidArgument("mode_delocalization: dimension mismatch");
  }
  const ParitySplit split = sort_by_parity(decomp, parity);
  if (!split.ambiguous.empty()) throw InvalidArgument("mode_delocalization: Floquet modes of mixed parity");

  DelocalizationResult out;
  out.basis = basis;
  double sum = 0.0, sum_scaled = 0.0;
  for (int s = 0; s < 2; ++s) {
    const RealMatrix b = parity.sector_basis(s);
    const Eigen::Index ds = b.cols();
    const auto& idx = split.sectors[s];
    if (static_cast<Eigen::Index>(idx.size()) != ds) {
      throw InvalidArgument("mode_delocalization: Floquet sector size differs from the parity sector");
    }
    out.sector_sizes[s] = ds;
    if (ds == 0) continue;

    Eigen::SelfAdjointEigenSolver<RealMatrix> es(b.transpose() * effective * b);
    if (es.info() != Eigen::Success) throw ConvergenceError("mode_delocalization: eigensolver failed", 0.0);
    const Matrix eff = (b * es.eigenvectors()).cast<cplx>();

    Matrix floquet(dim, ds);
    for (Eigen::Index k = 0; k < ds; ++k) floquet.col(k) = decomp.modes.col(idx[static_cast<std::size_t>(k)]);

    // Rows index the distributed states, columns the reference basis.
    RealMatrix w = basis == DelocalizationBasis::FloquetInEffective ? (floquet.adjoint() * eff).cwiseAbs2()
                                                                    : (eff.adjoint() * floquet).cwiseAbs2();
    for (Eigen::Index r = 0; r < ds; ++r) {
      out.completeness_defect = std::max(out.completeness_defect, std::abs(w.row(r).sum() - 1.0));
      out.completeness_defect = std::max(out.completeness_defect, std::abs(w.col(r).sum() - 1.0));
    }
    const double smax = std::log(static_cast<double>(ds));
    for (Eigen::Index r = 0; r < ds; ++r) {
      const RealVector row = w.row(r).transpose();
      const double e = shannon_entropy({row.data(), static_cast<std::size_t>(ds)}, 1e-6);
      out.entropies.push_back(e);
      out.sector.push_back(s);
      sum += e;
      sum_scaled += ds > 1 ? e / smax : 0.0;
    }
  }
  const auto count = static_cast<double>(out.entropies.size());
  out.mean = sum / count;
  out.mean_scaled = sum_scaled / count;
  return out;
}

EntropyMap coherent_entropy_map(std::span<const ClassicalState> points, const FloquetDecomposition& decomp,
                                int workers) {
  const Eigen::Index dim = decomp.size();
  if (dim < 2) throw InvalidArgument("coherent_entropy_map: need at least two modes");
  const int n = static_cast<int>(dim) - 1;
  const double smax = std::log(static_cast<double>(dim));
  EntropyMap out;
  out.scaled.resize(points.size());
  std::vector<double> defects(points.size(), 0.0);
  const Matrix modes_h = decomp.modes.adjoint();
  parallel_for(points.size(), workers, [&](std::size_t i) {
    const StateVector psi = coherent_state(n, to_bloch(points[i]));
    const RealVector p = (modes_h * psi).cwiseAbs2();
    defects[i] = std::abs(p.sum() - 1.0);
    out.scaled[i] = shannon_entropy({p.data(), static_cast<std::size_t>(dim)}, 1e-6) / smax;
  });
  for (double d : defects) out.max_weight_defect = std::max(out.max_weight_defect, d);
  return out;
}

}  // namespace bhd
