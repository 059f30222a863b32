#include "polsarkit/labelgen.hpp"

#include <cmath>
#include <stdexcept>

#include "polsarkit/parallel.hpp"

namespace polsar {

double rayleigh_quantile(double mu, double p) {
  return mu * std::sqrt(-2.0 * std::log1p(-p));
}

RayleighFit fit_rayleigh(const std::vector<double>& samples) {
  std::vector<double> sq;
  sq.reserve(samples.size());
  std::size_t dropped = 0;
  for (double x : samples) {
    if (x > 0.0) {
      sq.push_back(x * x);
    } else {
      ++dropped;
    }
  }
  if (sq.size() < 2) {
    throw std::invalid_argument("rayleigh fit needs at least 2 positive samples");
  }
  RayleighFit fit;
  fit.n = sq.size();
  fit.dropped_zeros = dropped;
  const double sumsq = pairwise_block_sum(sq.data(), sq.size());
  fit.mu = std::sqrt(sumsq / (2.0 * static_cast<double>(fit.n)));
  fit.quartiles = {rayleigh_quantile(fit.mu, 0.25), rayleigh_quantile(fit.mu, 0.5),
                   rayleigh_quantile(fit.mu, 0.75)};
  return fit;
}

double median_threshold(const RayleighFit& fit) {
  return fit.mu * std::sqrt(2.0 * std::log(2.0));
}

MaskGrid binarize_component(const RealGrid& values, double theta) {
  MaskGrid out(values.height, values.width);
  const auto n = static_cast<long long>(values.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out.cells[idx] = values.cells[idx] < theta ? 0 : 1;
  }
  return out;
}

BinaryLabelStack generate_labels(const ComponentStack& stack) {
  BinaryLabelStack out;
  for (int i = 0; i < kComponentCount; ++i) {
    const RealGrid& plane = stack.plane(i);
    const auto idx = static_cast<std::size_t>(i);
    std::size_t positives = 0;
    for (double v : plane.cells) {
      if (v > 0.0) ++positives;
    }
    if (positives < 2) {
      // degenerate component, nothing to fit
      out.degenerate[idx] = true;
      out.thresholds[idx] = 0.0;
      out.masks[idx] = MaskGrid(plane.height, plane.width, 0);
      continue;
    }
    out.fits[idx] = fit_rayleigh(plane.cells);
    out.thresholds[idx] = median_threshold(out.fits[idx]);
    out.masks[idx] = binarize_component(plane, out.thresholds[idx]);
  }
  return out;
}

}  // namespace polsar
