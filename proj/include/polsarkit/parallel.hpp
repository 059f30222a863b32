#pragma once

#include <cstddef>
#include <vector>

namespace polsar {

// Reduction with a summation order fixed by n alone: partial sums over
// fixed-size blocks (parallelizable), then a serial pairwise tree over the
// block sums. Identical results for any thread count.
inline double pairwise_block_sum(const double* x, std::size_t n) {
  constexpr std::size_t kBlock = 4096;
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  // pairwise combine, serial
  std::size_t m = nblocks;
  while (m > 1) {
    const std::size_t half = (m + 1) / 2;
    for (std::size_t i = 0; i < m / 2; ++i)
      partial[i] = partial[2 * i] + partial[2 * i + 1];
    if (m % 2) partial[m / 2] = partial[m - 1];
    m = half;
  }
  return partial[0];
}

inline double pairwise_block_sum(const std::vector<double>& v) {
  return pairwise_block_sum(v.data(), v.size());
}

}  // namespace polsar
