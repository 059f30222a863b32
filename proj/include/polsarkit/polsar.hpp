#pragma once

#include "polsarkit/types.hpp"

namespace polsar {

// Monostatic reciprocity: replaces both cross-pol entries by their mean.
ScatteringMatrix symmetrize_reciprocal(const ScatteringMatrix& s);

// Pauli projection. Expects a reciprocity-symmetrized input; |k|^2 then
// equals span_pixel of the symmetrized matrix.
PauliVector pauli_vector(const ScatteringMatrix& s);

// Outer product k k^H, upper triangle. Rank <= 1, trace == |k|^2.
CoherencyMatrix rank1_coherency(const PauliVector& k);

// Total power |hh|^2+|hv|^2+|vh|^2+|vv|^2 over the raw four channels.
double span_pixel(const ScatteringMatrix& s);
RealGrid span_raster(const PolsarRaster& raster);

// Entry-wise mean over an odd square window centered at each cell; the
// window shrinks to the valid intersection at borders (no padding).
// This is the linear averaging stage shared by boxcar_coherency.
CoherencyGrid boxcar_average(const CoherencyGrid& grid, int window);

// Per-pixel symmetrize -> pauli -> rank-1 coherency, then boxcar_average.
CoherencyGrid boxcar_coherency(const PolsarRaster& raster, int window);

// Rank-1 coherency grid before averaging (window 1 equivalent).
CoherencyGrid rank1_grid(const PolsarRaster& raster);

}  // namespace polsar
