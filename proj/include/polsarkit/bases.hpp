#pragma once

#include <array>
#include <vector>

#include "polsarkit/types.hpp"

namespace polsar {

using Mat3 = std::array<std::array<Cpx, 3>, 3>;

Mat3 mat3_from_coherency(const CoherencyMatrix& t);
CoherencyMatrix coherency_from_mat3(const Mat3& m);
double frobenius_distance(const Mat3& a, const Mat3& b);

// Factor of a Hermitian PSD matrix with L * L^H == m (diagonally pivoted,
// tolerates rank deficiency).
Mat3 psd_factor(const Mat3& m);

enum class BasisKind {
  Surface,
  DoubleBounce,
  Volume,
  Helix,
  OrientedDipole,
  CompoundDipole,
  MixedDipole,
  RotatedDihedral,
  RollInvariantCrossPol,
  Adaptive,
};

inline constexpr int kBasisCount = 10;
const char* basis_name(BasisKind k);

// Unit-trace Hermitian PSD coherency matrix of one scattering mechanism.
struct ScatteringBasis {
  BasisKind kind = BasisKind::Surface;
  Mat3 matrix{};
};

struct TenPowers {
  std::array<double, kBasisCount> p{};

  double sum() const;
};

// Adaptive is generated from the shipped seed; the other nine are fixed.
ScatteringBasis basis_matrix(BasisKind kind);
const std::vector<ScatteringBasis>& all_bases();

// Sum of p_i * basis_i. Trace equals sum of powers.
CoherencyMatrix synthesize_pixel(const TenPowers& powers);

// Total power sum; equals trace(synthesize_pixel) because bases have unit
// trace.
double reconstruct_power(const TenPowers& powers);

// Axis-aligned region [r0,r1) x [c0,c1) with one target mixture.
struct SceneRegion {
  int r0 = 0, c0 = 0, r1 = 0, c1 = 0;
  TenPowers powers;
};

struct SceneSpec {
  int height = 0, width = 0;
  std::vector<SceneRegion> regions;
};

// Checks that the regions tile the grid exactly once and are non-empty.
void validate_scene(const SceneSpec& spec);

// Draws circular complex Gaussian Pauli vectors with covariance equal to
// each region's target coherency, then maps back to scattering matrices.
// Pixel streams are derived from (seed, pixel index), so the result is
// independent of traversal order.
PolsarRaster synthesize_scene(const SceneSpec& spec, std::uint64_t seed);

}  // namespace polsar
