#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "polsarkit/types.hpp"
#include "polsarkit/yamaguchi.hpp"

namespace polsar {

struct RayleighFit {
  double mu = 0.0;
  std::array<double, 3> quartiles{};  // cumulative probability 1/4, 1/2, 3/4
  std::size_t n = 0;                  // positive samples used
  std::size_t dropped_zeros = 0;
};

// Maximum-likelihood fit mu = sqrt(sum(x^2) / (2n)) over the positive
// samples; throws if fewer than 2 remain.
RayleighFit fit_rayleigh(const std::vector<double>& samples);

// Rayleigh median mu * sqrt(2 ln 2).
double median_threshold(const RayleighFit& fit);

double rayleigh_quantile(double mu, double p);

// 0 where value < theta, 1 otherwise.
MaskGrid binarize_component(const RealGrid& values, double theta);

struct BinaryLabelStack {
  std::array<MaskGrid, kComponentCount> masks;
  std::array<double, kComponentCount> thresholds{};
  std::array<RayleighFit, kComponentCount> fits;
  // Components whose positive sample set was too small; their mask is
  // all zero and their threshold is 0.
  std::array<bool, kComponentCount> degenerate{};
};

// Per component: global Rayleigh fit over positive values, median
// threshold, binarize.
BinaryLabelStack generate_labels(const ComponentStack& stack);

}  // namespace polsar
