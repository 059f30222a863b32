#include "polsarkit/bases.hpp"

#include <cmath>
#include <stdexcept>

#include "polsarkit/rng.hpp"
#include "polsarkit/version.hpp"

namespace polsar {

Mat3 mat3_from_coherency(const CoherencyMatrix& t) {
  Mat3 m;
  m[0][0] = Cpx(t.t11, 0.0);
  m[1][1] = Cpx(t.t22, 0.0);
  m[2][2] = Cpx(t.t33, 0.0);
  m[0][1] = t.t12;
  m[1][0] = std::conj(t.t12);
  m[0][2] = t.t13;
  m[2][0] = std::conj(t.t13);
  m[1][2] = t.t23;
  m[2][1] = std::conj(t.t23);
  return m;
}

CoherencyMatrix coherency_from_mat3(const Mat3& m) {
  CoherencyMatrix t;
  t.t11 = m[0][0].real();
  t.t22 = m[1][1].real();
  t.t33 = m[2][2].real();
  t.t12 = m[0][1];
  t.t13 = m[0][2];
  t.t23 = m[1][2];
  return t;
}

double frobenius_distance(const Mat3& a, const Mat3& b) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) acc += std::norm(a[i][j] - b[i][j]);
  }
  return std::sqrt(acc);
}

Mat3 psd_factor(const Mat3& m) {
  Mat3 a = m;
  Mat3 l{};
  std::array<int, 3> piv = {0, 1, 2};
  const double tr = a[0][0].real() + a[1][1].real() + a[2][2].real();
  const double tol = 1e-12 * std::max(1.0, tr);
  for (int j = 0; j < 3; ++j) {
    int best = j;
    for (int k = j + 1; k < 3; ++k) {
      if (a[piv[k]][piv[k]].real() > a[piv[best]][piv[best]].real()) best = k;
    }
    std::swap(piv[j], piv[best]);
    const double djj = a[piv[j]][piv[j]].real();
    if (djj <= tol) break;  // remaining complement is numerically zero
    const double root = std::sqrt(djj);
    l[piv[j]][j] = Cpx(root, 0.0);
    for (int i = j + 1; i < 3; ++i) {
      l[piv[i]][j] = a[piv[i]][piv[j]] / root;
    }
    for (int i = j + 1; i < 3; ++i) {
      for (int k = j + 1; k < 3; ++k) {
        a[piv[i]][piv[k]] -= l[piv[i]][j] * std::conj(l[piv[k]][j]);
      }
    }
  }
  return l;
}

const char* basis_name(BasisKind k) {
  switch (k) {
    case BasisKind::Surface: return "surface";
    case BasisKind::DoubleBounce: return "double_bounce";
    case BasisKind::Volume: return "volume";
    case BasisKind::Helix: return "helix";
    case BasisKind::OrientedDipole: return "oriented_dipole";
    case BasisKind::CompoundDipole: return "compound_dipole";
    case BasisKind::MixedDipole: return "mixed_dipole";
    case BasisKind::RotatedDihedral: return "rotated_dihedral";
    case BasisKind::RollInvariantCrossPol: return "roll_invariant_cross_pol";
    case BasisKind::Adaptive: return "adaptive";
  }
  return "unknown";
}

double TenPowers::sum() const {
  double acc = 0.0;
  for (double v : p) acc += v;
  return acc;
}

namespace {

Mat3 diag3(double a, double b, double c) {
  Mat3 m{};
  m[0][0] = Cpx(a, 0.0);
  m[1][1] = Cpx(b, 0.0);
  m[2][2] = Cpx(c, 0.0);
  return m;
}

Mat3 adaptive_matrix() {
  Rng rng(kAdaptiveBasisSeed);
  Mat3 g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g[i][j] = rng.next_circular();
  }
  Mat3 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Cpx acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += g[i][k] * std::conj(g[j][k]);
      m[i][j] = acc;
    }
  }
  const double tr = m[0][0].real() + m[1][1].real() + m[2][2].real();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] /= tr;
  }
  // exact unit trace, off-diagonal Hermitian by construction
  for (int i = 0; i < 3; ++i) m[i][i] = Cpx(m[i][i].real(), 0.0);
  return m;
}

Mat3 make_matrix(BasisKind k) {
  const Cpx j(0.0, 1.0);
  Mat3 m{};
  switch (k) {
    case BasisKind::Surface:
      return diag3(1.0, 0.0, 0.0);
    case BasisKind::DoubleBounce:
      return diag3(0.0, 1.0, 0.0);
    case BasisKind::Volume:
      return diag3(0.5, 0.25, 0.25);
    case BasisKind::Helix:
      m[1][1] = 0.5;
      m[2][2] = 0.5;
      m[1][2] = 0.5 * j;
      m[2][1] = -0.5 * j;
      return m;
    case BasisKind::OrientedDipole:
      m[0][0] = 0.5;
      m[2][2] = 0.5;
      m[0][2] = 0.5;
      m[2][0] = 0.5;
      return m;
    case BasisKind::CompoundDipole:
      m[0][0] = 0.5;
      m[2][2] = 0.5;
      m[0][2] = -0.5 * j;
      m[2][0] = 0.5 * j;
      return m;
    case BasisKind::MixedDipole:
      m[1][1] = 0.5;
      m[2][2] = 0.5;
      m[1][2] = 0.5;
      m[2][1] = 0.5;
      return m;
    case BasisKind::RotatedDihedral:
      m[1][1] = 0.5;
      m[2][2] = 0.5;
      m[1][2] = -0.5;
      m[2][1] = -0.5;
      return m;
    case BasisKind::RollInvariantCrossPol:
      return diag3(0.0, 0.0, 1.0);
    case BasisKind::Adaptive:
      return adaptive_matrix();
  }
  throw std::invalid_argument("unknown basis kind");
}

}  // namespace

ScatteringBasis basis_matrix(BasisKind kind) {
  return ScatteringBasis{kind, make_matrix(kind)};
}

const std::vector<ScatteringBasis>& all_bases() {
  static const std::vector<ScatteringBasis> bases = [] {
    std::vector<ScatteringBasis> out;
    out.reserve(kBasisCount);
    for (int i = 0; i < kBasisCount; ++i) {
      out.push_back(basis_matrix(static_cast<BasisKind>(i)));
    }
    return out;
  }();
  return bases;
}

CoherencyMatrix synthesize_pixel(const TenPowers& powers) {
  Mat3 acc{};
  const auto& bases = all_bases();
  for (int b = 0; b < kBasisCount; ++b) {
    const double p = powers.p[static_cast<std::size_t>(b)];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) acc[i][j] += p * bases[static_cast<std::size_t>(b)].matrix[i][j];
    }
  }
  return coherency_from_mat3(acc);
}

double reconstruct_power(const TenPowers& powers) { return powers.sum(); }

void validate_scene(const SceneSpec& spec) {
  if (spec.height < 1 || spec.width < 1) {
    throw std::invalid_argument("scene extents must be >= 1");
  }
  if (spec.regions.empty()) throw std::invalid_argument("scene has no regions");
  Grid<std::uint8_t> cover(spec.height, spec.width, 0);
  for (const auto& reg : spec.regions) {
    if (reg.r0 >= reg.r1 || reg.c0 >= reg.c1) {
      throw std::invalid_argument("empty scene region");
    }
    if (reg.r0 < 0 || reg.c0 < 0 || reg.r1 > spec.height || reg.c1 > spec.width) {
      throw std::invalid_argument("scene region out of bounds");
    }
    for (double p : reg.powers.p) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("region powers must be finite and >= 0");
      }
    }
    for (int r = reg.r0; r < reg.r1; ++r) {
      for (int c = reg.c0; c < reg.c1; ++c) {
        if (cover.at(r, c)++) throw std::invalid_argument("scene regions overlap");
      }
    }
  }
  for (auto v : cover.cells) {
    if (!v) throw std::invalid_argument("scene regions leave gaps");
  }
}

PolsarRaster synthesize_scene(const SceneSpec& spec, std::uint64_t seed) {
  validate_scene(spec);
  PolsarRaster out;
  out.pixels = Grid<ScatteringMatrix>(spec.height, spec.width);
  out.meta.sensor = "synthetic";
  out.meta.resolution_m = 1.0;
  out.meta.tags["seed"] = std::to_string(seed);
  out.meta.tags["regions"] = std::to_string(spec.regions.size());

  constexpr double kInvSqrt2 = 0.7071067811865475244;
  const Rng base(seed);
  for (const auto& reg : spec.regions) {
    const Mat3 l = psd_factor(mat3_from_coherency(synthesize_pixel(reg.powers)));
    const int rows = reg.r1 - reg.r0;
#pragma omp parallel for schedule(static)
    for (int rr = 0; rr < rows; ++rr) {
      const int r = reg.r0 + rr;
      for (int c = reg.c0; c < reg.c1; ++c) {
        Rng px = base.derive(static_cast<std::uint64_t>(r) * spec.width + c);
        const Cpx z0 = px.next_circular();
        const Cpx z1 = px.next_circular();
        const Cpx z2 = px.next_circular();
        const Cpx k1 = l[0][0] * z0 + l[0][1] * z1 + l[0][2] * z2;
        const Cpx k2 = l[1][0] * z0 + l[1][1] * z1 + l[1][2] * z2;
        const Cpx k3 = l[2][0] * z0 + l[2][1] * z1 + l[2][2] * z2;
        ScatteringMatrix& px_out = out.pixels.at(r, c);
        px_out.hh = kInvSqrt2 * (k1 + k2);
        px_out.vv = kInvSqrt2 * (k1 - k2);
        px_out.hv = kInvSqrt2 * k3;
        px_out.vh = px_out.hv;
      }
    }
  }
  return out;
}

}  // namespace polsar
