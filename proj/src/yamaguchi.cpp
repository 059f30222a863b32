#include "polsarkit/yamaguchi.hpp"

#include <cmath>
#include <stdexcept>

namespace polsar {

namespace {

constexpr double kSnapScale = 1e-12;  // roundoff snaps below this stay unflagged
constexpr double kBranchDb = 2.0;

CoherencyMatrix volume_model(VolumeBranch b) {
  CoherencyMatrix m;
  if (b == VolumeBranch::Balanced) {
    m.t11 = 0.5;
    m.t22 = 0.25;
    m.t33 = 0.25;
  } else {
    m.t11 = 15.0 / 30.0;
    m.t22 = 7.0 / 30.0;
    m.t33 = 8.0 / 30.0;
    m.t12 = Cpx(b == VolumeBranch::HhDominant ? 5.0 / 30.0 : -5.0 / 30.0, 0.0);
  }
  return m;
}

CoherencyMatrix helix_model(double sign) {
  CoherencyMatrix m;
  m.t22 = 0.5;
  m.t33 = 0.5;
  m.t23 = Cpx(0.0, 0.5 * sign);
  return m;
}

}  // namespace

const char* branch_name(VolumeBranch b) {
  switch (b) {
    case VolumeBranch::VvDominant: return "vv_dominant";
    case VolumeBranch::Balanced: return "balanced";
    case VolumeBranch::HhDominant: return "hh_dominant";
  }
  return "unknown";
}

const char* component_name(int i) {
  switch (i) {
    case 0: return "surface";
    case 1: return "double_bounce";
    case 2: return "volume";
    case 3: return "helix";
  }
  return "unknown";
}

const RealGrid& ComponentStack::plane(int i) const {
  switch (i) {
    case 0: return surface;
    case 1: return double_bounce;
    case 2: return volume;
    default: return helix;
  }
}

RealGrid& ComponentStack::plane(int i) {
  switch (i) {
    case 0: return surface;
    case 1: return double_bounce;
    case 2: return volume;
    default: return helix;
  }
}

double helix_power(const CoherencyMatrix& t) {
  const double ph = 2.0 * std::abs(t.t23.imag());
  const double tr = std::max(0.0, t.trace());
  return std::min(ph, tr);
}

VolumeResult volume_branch(const CoherencyMatrix& t, double ph) {
  VolumeResult out;
  const double phh = 0.5 * (t.t11 + t.t22 + 2.0 * t.t12.real());
  const double pvv = 0.5 * (t.t11 + t.t22 - 2.0 * t.t12.real());
  if (phh <= 0.0 || pvv <= 0.0) {
    out.branch = VolumeBranch::Balanced;
    out.clipped = true;
  } else {
    const double rho = 10.0 * std::log10(pvv / phh);
    if (rho > kBranchDb) {
      out.branch = VolumeBranch::VvDominant;
    } else if (rho < -kBranchDb) {
      out.branch = VolumeBranch::HhDominant;
    } else {
      out.branch = VolumeBranch::Balanced;
    }
  }

  const double raw = out.branch == VolumeBranch::Balanced
                         ? 2.0 * (2.0 * t.t33 - ph)
                         : (15.0 / 8.0) * (2.0 * t.t33 - ph);
  const double tr = std::max(0.0, t.trace());
  const double snap = kSnapScale * tr;
  const double hi = std::max(0.0, tr - ph);
  double pv = raw;
  if (pv < 0.0) {
    if (pv < -snap) out.clipped = true;
    pv = 0.0;
  } else if (pv > hi) {
    if (pv - hi > snap) out.clipped = true;
    pv = hi;
  }
  out.pv = pv;
  return out;
}

SurfaceDoubleResult surface_double(const CoherencyMatrix& t, double pv,
                                   VolumeBranch branch, double ph) {
  SurfaceDoubleResult out;
  const double tr = std::max(0.0, t.trace());
  const double snap = kSnapScale * tr;

  const CoherencyMatrix rem =
      t + (-pv) * volume_model(branch) +
      (-ph) * helix_model(t.t23.imag() >= 0.0 ? 1.0 : -1.0);
  const double s = rem.t11;
  const double d = rem.t22;
  const double c2 = std::norm(rem.t12);

  double ps = 0.0, pd = 0.0;
  if (std::max(s, d) <= snap) {
    if (s + d < -snap) out.clipped = true;
  } else if (s >= d) {
    ps = s + c2 / s;
    pd = d - c2 / s;
  } else {
    ps = s - c2 / d;
    pd = d + c2 / d;
  }

  if (ps < 0.0) {
    if (ps < -snap) out.clipped = true;
    pd += ps;
    ps = 0.0;
  }
  if (pd < 0.0) {
    if (pd < -snap) out.clipped = true;
    ps += pd;
    pd = 0.0;
    if (ps < 0.0) ps = 0.0;
  }

  // The remainder diagonal can exceed trace - pv - ph when the volume
  // clamp fired; rescale so the component sum never exceeds the trace.
  const double budget = std::max(0.0, tr - pv - ph);
  const double pair = ps + pd;
  if (pair > budget) {
    if (pair - budget > snap) out.clipped = true;
    const double scale = pair > 0.0 ? budget / pair : 0.0;
    ps *= scale;
    pd *= scale;
  }
  out.ps = ps;
  out.pd = pd;
  return out;
}

YamaguchiPowers yamaguchi_decompose(const CoherencyMatrix& t) {
  YamaguchiPowers out;
  out.ph = helix_power(t);
  const VolumeResult v = volume_branch(t, out.ph);
  out.branch = v.branch;
  out.pv = v.pv;
  const SurfaceDoubleResult sd = surface_double(t, v.pv, v.branch, out.ph);
  out.ps = sd.ps;
  out.pd = sd.pd;
  out.clipped = v.clipped || sd.clipped;
  return out;
}

ComponentStack decompose_raster(const CoherencyGrid& grid) {
  ComponentStack stack{RealGrid(grid.height, grid.width),
                       RealGrid(grid.height, grid.width),
                       RealGrid(grid.height, grid.width),
                       RealGrid(grid.height, grid.width)};
  const auto n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const YamaguchiPowers p = yamaguchi_decompose(grid.cells[idx]);
    stack.surface.cells[idx] = p.ps;
    stack.double_bounce.cells[idx] = p.pd;
    stack.volume.cells[idx] = p.pv;
    stack.helix.cells[idx] = p.ph;
  }
  return stack;
}

}  // namespace polsar
