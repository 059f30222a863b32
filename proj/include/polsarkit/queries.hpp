#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "polsarkit/bases.hpp"

namespace polsar {

using Vec3c = std::array<Cpx, 3>;

struct PairSample {
  Vec3c y;  // unit-norm probe
  Vec3c x;  // exact product basis.matrix * y
};

inline constexpr int kEmbedDim = 768;
inline constexpr int kQueryDim = 256;

struct ScatteringQuery {
  BasisKind kind = BasisKind::Surface;
  std::vector<double> vec768;  // mean pair embedding
  std::vector<double> vec256;  // projected, unit Euclidean norm
  std::uint64_t seed = 0;
  int m = 0;
};

// Y unit-norm complex from the per-basis stream, X = matrix * Y.
std::vector<PairSample> sample_pairs(const ScatteringBasis& basis, int m,
                                     std::uint64_t seed);

// (Y, X) as 12 reals through the fixed seeded 12->768 projection, then
// sin. Odd nonlinearity, so the zero pair maps to the zero vector.
std::vector<double> embed_pair(const PairSample& pair);

ScatteringQuery init_query(const ScatteringBasis& basis, int m,
                           std::uint64_t seed);

// All ten bases through init_query with per-kind derived streams.
std::vector<ScatteringQuery> shipped_queries(std::uint64_t seed, int m);

struct IndependenceReport {
  int n = 0;
  std::vector<double> cosines;  // row-major n x n
  double max_off_diag = 0.0;

  double at(int i, int j) const { return cosines[static_cast<std::size_t>(i) * n + j]; }
};

IndependenceReport independence_report(const std::vector<ScatteringQuery>& queries);

}  // namespace polsar
