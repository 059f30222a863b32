#pragma once

#include "polsarkit/types.hpp"

namespace polsar {

enum class VolumeBranch { VvDominant, Balanced, HhDominant };

const char* branch_name(VolumeBranch b);

struct YamaguchiPowers {
  double ps = 0.0, pd = 0.0, pv = 0.0, ph = 0.0;
  VolumeBranch branch = VolumeBranch::Balanced;
  bool clipped = false;

  double total() const { return ps + pd + pv + ph; }
};

// Four same-geometry power planes in component order S.F., Dbl, Vol, Hlx.
struct ComponentStack {
  RealGrid surface, double_bounce, volume, helix;

  int height() const { return surface.height; }
  int width() const { return surface.width; }
  const RealGrid& plane(int i) const;
  RealGrid& plane(int i);
};

inline constexpr int kComponentCount = 4;
const char* component_name(int i);

// 2|Im t23| clamped to trace(t).
double helix_power(const CoherencyMatrix& t);

struct VolumeResult {
  VolumeBranch branch = VolumeBranch::Balanced;
  double pv = 0.0;
  bool clipped = false;  // clamp fired or branch ratio was undefined
};

// Branch on rho = 10 log10(Pvv/Phh); |rho| <= 2 dB keeps the balanced
// volume model. Pv clamped to [0, trace - ph].
VolumeResult volume_branch(const CoherencyMatrix& t, double ph);

struct SurfaceDoubleResult {
  double ps = 0.0, pd = 0.0;
  bool clipped = false;
};

// Splits the remainder after volume and helix removal between surface and
// double bounce. Negative outcomes are clipped with the deficit moved to
// the other component, preserving the pair sum.
SurfaceDoubleResult surface_double(const CoherencyMatrix& t, double pv,
                                   VolumeBranch branch, double ph);

YamaguchiPowers yamaguchi_decompose(const CoherencyMatrix& t);

ComponentStack decompose_raster(const CoherencyGrid& grid);

}  // namespace polsar
