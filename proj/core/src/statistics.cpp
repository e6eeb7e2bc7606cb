#include "bhd/statistics.hpp"

#include "bhd/error.hpp"

#include <cmath>
#include <numeric>

namespace bhd {

Histogram make_histogram(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw InvalidArgument("make_histogram: need bins >= 1 and hi > lo");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  h.total = values.size();
  for (double v : values) {
    if (!(v >= lo && v < hi)) continue;
    auto bin = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
    if (bin >= h.counts.size()) bin = h.counts.size() - 1;
    ++h.counts[bin];
  }
  h.density.resize(h.counts.size());
  const double norm = h.total == 0 ? 0.0 : 1.0 / (static_cast<double>(h.total) * h.width());
  for (std::size_t b = 0; b < h.counts.size(); ++b) h.density[b] = static_cast<double>(h.counts[b]) * norm;
  return h;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(values.size());
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear_fit: need at least two paired samples");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace bhd
