#pragma once

#include "bhd/linalg.hpp"

#include <span>
#include <vector>

namespace bhd {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> density;  // normalised so that sum(density) * width = fraction inside [lo, hi)
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double centre(std::size_t bin) const { return lo + (static_cast<double>(bin) + 0.5) * width(); }
};

Histogram make_histogram(std::span<const double> values, int bins, double lo, double hi);

double mean(std::span<const double> values);
/// Population variance.
double variance(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace bhd
