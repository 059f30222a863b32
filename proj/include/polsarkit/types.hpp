#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace polsar {

using Cpx = std::complex<double>;

inline bool finite(const Cpx& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Per-pixel 2x2 complex scattering matrix, linear amplitude units.
struct ScatteringMatrix {
  Cpx hh, hv, vh, vv;

  bool is_finite() const {
    return finite(hh) && finite(hv) && finite(vh) && finite(vv);
  }
};

// Pauli projection of a reciprocity-symmetrized scattering matrix.
struct PauliVector {
  Cpx k1, k2, k3;

  double norm_sq() const {
    return std::norm(k1) + std::norm(k2) + std::norm(k3);
  }
};

// Upper triangle of a 3x3 Hermitian coherency matrix, linear power units.
// t21 = conj(t12) etc. are implied, never stored.
struct CoherencyMatrix {
  double t11 = 0.0, t22 = 0.0, t33 = 0.0;
  Cpx t12{}, t13{}, t23{};

  double trace() const { return t11 + t22 + t33; }

  CoherencyMatrix& operator+=(const CoherencyMatrix& o) {
    t11 += o.t11;
    t22 += o.t22;
    t33 += o.t33;
    t12 += o.t12;
    t13 += o.t13;
    t23 += o.t23;
    return *this;
  }

  CoherencyMatrix& operator*=(double c) {
    t11 *= c;
    t22 *= c;
    t33 *= c;
    t12 *= c;
    t13 *= c;
    t23 *= c;
    return *this;
  }

  friend CoherencyMatrix operator+(CoherencyMatrix a, const CoherencyMatrix& b) {
    a += b;
    return a;
  }
  friend CoherencyMatrix operator*(double c, CoherencyMatrix a) {
    a *= c;
    return a;
  }

  bool is_finite() const {
    return std::isfinite(t11) && std::isfinite(t22) && std::isfinite(t33) &&
           finite(t12) && finite(t13) && finite(t23);
  }

  // Hermitian PSD up to tolerance: diagonal entries and 2x2 principal
  // minors >= -tol_scale * trace^2.
  bool is_valid(double tol_scale = 1e-9) const;
};

template <class T>
struct Grid {
  int height = 0;
  int width = 0;
  std::vector<T> cells;

  Grid() = default;
  Grid(int h, int w) : height(h), width(w), cells(size()) {
    if (h < 1 || w < 1) throw std::invalid_argument("grid extents must be >= 1");
  }
  Grid(int h, int w, const T& fill) : height(h), width(w), cells(size(), fill) {
    if (h < 1 || w < 1) throw std::invalid_argument("grid extents must be >= 1");
  }

  std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  T& at(int r, int c) { return cells[static_cast<std::size_t>(r) * width + c]; }
  const T& at(int r, int c) const {
    return cells[static_cast<std::size_t>(r) * width + c];
  }
  bool same_geometry(const Grid& o) const {
    return height == o.height && width == o.width;
  }
};

using RealGrid = Grid<double>;
using MaskGrid = Grid<std::uint8_t>;  // entries 0 or 1
using CoherencyGrid = Grid<CoherencyMatrix>;

struct RasterMetadata {
  std::string sensor;
  double resolution_m = 0.0;
  std::map<std::string, std::string> tags;
};

// Row-major grid of scattering matrices plus acquisition metadata.
struct PolsarRaster {
  Grid<ScatteringMatrix> pixels;
  RasterMetadata meta;

  int height() const { return pixels.height; }
  int width() const { return pixels.width; }
};

}  // namespace polsar
