#include "polsarkit/reference.hpp"

#include <algorithm>
#include <stdexcept>

#include "polsarkit/labelgen.hpp"
#include "polsarkit/polsar.hpp"

namespace polsar::serial {

RealGrid span_raster(const PolsarRaster& raster) {
  RealGrid out(raster.height(), raster.width());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.cells[i] = span_pixel(raster.pixels.cells[i]);
  }
  return out;
}

CoherencyGrid rank1_grid(const PolsarRaster& raster) {
  CoherencyGrid out(raster.height(), raster.width());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.cells[i] =
        rank1_coherency(pauli_vector(symmetrize_reciprocal(raster.pixels.cells[i])));
  }
  return out;
}

CoherencyGrid boxcar_average(const CoherencyGrid& grid, int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("boxcar window must be odd and positive");
  }
  CoherencyGrid out(grid.height, grid.width);
  const int h = grid.height, w = grid.width, half = window / 2;
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
  return serial::boxcar_average(serial::rank1_grid(raster), window);
}

ComponentStack decompose_raster(const CoherencyGrid& grid) {
  ComponentStack stack{RealGrid(grid.height, grid.width),
                       RealGrid(grid.height, grid.width),
                       RealGrid(grid.height, grid.width),
                       RealGrid(grid.height, grid.width)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const YamaguchiPowers p = yamaguchi_decompose(grid.cells[i]);
    stack.surface.cells[i] = p.ps;
    stack.double_bounce.cells[i] = p.pd;
    stack.volume.cells[i] = p.pv;
    stack.helix.cells[i] = p.ph;
  }
  return stack;
}

MaskGrid binarize_component(const RealGrid& values, double theta) {
  MaskGrid out(values.height, values.width);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.cells[i] = values.cells[i] < theta ? 0 : 1;
  }
  return out;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace polsar::serial
