#pragma once

#include <vector>

#include "polsarkit/types.hpp"
#include "polsarkit/yamaguchi.hpp"

namespace polsar::serial {

// Plain-loop counterparts of the parallel raster kernels. Per-pixel
// arithmetic is shared with the parallel versions, so grid outputs must
// match bit for bit; reductions use a straight left-to-right sum and are
// compared within tolerance instead.

RealGrid span_raster(const PolsarRaster& raster);
CoherencyGrid rank1_grid(const PolsarRaster& raster);
CoherencyGrid boxcar_average(const CoherencyGrid& grid, int window);
CoherencyGrid boxcar_coherency(const PolsarRaster& raster, int window);
ComponentStack decompose_raster(const CoherencyGrid& grid);
MaskGrid binarize_component(const RealGrid& values, double theta);

double sum(const double* x, std::size_t n);
inline double sum(const std::vector<double>& v) { return sum(v.data(), v.size()); }

}  // namespace polsar::serial
