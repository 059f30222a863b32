#include "polsarkit/polsar.hpp"

#include <algorithm>
#include <stdexcept>

namespace polsar {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

bool CoherencyMatrix::is_valid(double tol_scale) const {
  if (!is_finite()) return false;
  const double tr = trace();
  const double tol = tol_scale * tr * tr + tol_scale;
  if (t11 < -tol || t22 < -tol || t33 < -tol) return false;
  const double m12 = t11 * t22 - std::norm(t12);
  const double m13 = t11 * t33 - std::norm(t13);
  const double m23 = t22 * t33 - std::norm(t23);
  return m12 >= -tol && m13 >= -tol && m23 >= -tol;
}

ScatteringMatrix symmetrize_reciprocal(const ScatteringMatrix& s) {
  ScatteringMatrix out = s;
  const Cpx xv = 0.5 * (s.hv + s.vh);
  out.hv = xv;
  out.vh = xv;
  return out;
}

PauliVector pauli_vector(const ScatteringMatrix& s) {
  PauliVector k;
  k.k1 = kInvSqrt2 * (s.hh + s.vv);
  k.k2 = kInvSqrt2 * (s.hh - s.vv);
  k.k3 = kInvSqrt2 * (s.hv + s.vh);  // 2*S_xv/sqrt(2) for symmetrized input
  return k;
}

CoherencyMatrix rank1_coherency(const PauliVector& k) {
  CoherencyMatrix t;
  t.t11 = std::norm(k.k1);
  t.t22 = std::norm(k.k2);
  t.t33 = std::norm(k.k3);
  t.t12 = k.k1 * std::conj(k.k2);
  t.t13 = k.k1 * std::conj(k.k3);
  t.t23 = k.k2 * std::conj(k.k3);
  return t;
}

double span_pixel(const ScatteringMatrix& s) {
  return std::norm(s.hh) + std::norm(s.hv) + std::norm(s.vh) + std::norm(s.vv);
}

RealGrid span_raster(const PolsarRaster& raster) {
  RealGrid out(raster.height(), raster.width());
  const auto n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    out.cells[static_cast<std::size_t>(i)] =
        span_pixel(raster.pixels.cells[static_cast<std::size_t>(i)]);
  }
  return out;
}

CoherencyGrid rank1_grid(const PolsarRaster& raster) {
  CoherencyGrid out(raster.height(), raster.width());
  const auto n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto& px = raster.pixels.cells[static_cast<std::size_t>(i)];
    out.cells[static_cast<std::size_t>(i)] =
        rank1_coherency(pauli_vector(symmetrize_reciprocal(px)));
  }
  return out;
}

CoherencyGrid boxcar_average(const CoherencyGrid& grid, int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("boxcar window must be odd and positive");
  }
  CoherencyGrid out(grid.height, grid.width);
  const int h = grid.height, w = grid.width, half = window / 2;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int r0 = std::max(0, r - half), r1 = std::min(h - 1, r + half);
      const int c0 = std::max(0, c - half), c1 = std::min(w - 1, c + half);
      CoherencyMatrix acc;
      for (int rr = r0; rr <= r1; ++rr) {
        for (int cc = c0; cc <= c1; ++cc) acc += grid.at(rr, cc);
      }
      const double inv = 1.0 / ((r1 - r0 + 1) * (c1 - c0 + 1));
      acc *= inv;
      out.at(r, c) = acc;
    }
  }
  return out;
}

CoherencyGrid boxcar_coherency(const PolsarRaster& raster, int window) {
  return boxcar_average(rank1_grid(raster), window);
}

}  // namespace polsar
