// Timing comparison between the OpenMP raster kernels and the plain-loop
// reference, with an equality check on every pair.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "polsarkit/labelgen.hpp"
#include "polsarkit/parallel.hpp"
#include "polsarkit/polsar.hpp"
#include "polsarkit/reference.hpp"
#include "polsarkit/rng.hpp"
#include "polsarkit/yamaguchi.hpp"

using namespace polsar;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(Clock::now() - t0)
                        .count());
  }
  return best;
}

void row(const char* name, double par_ms, double ser_ms, bool equal) {
  std::printf("%-22s %10.2f ms %10.2f ms %7.2fx  %s\n", name, par_ms, ser_ms,
              ser_ms / par_ms, equal ? "outputs equal" : "OUTPUTS DIFFER");
}

bool grids_equal(const RealGrid& a, const RealGrid& b) {
  return a.cells == b.cells;
}

bool coherency_equal(const CoherencyGrid& a, const CoherencyGrid& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const CoherencyMatrix& x = a.cells[i];
    const CoherencyMatrix& y = b.cells[i];
    if (x.t11 != y.t11 || x.t22 != y.t22 || x.t33 != y.t33 || x.t12 != y.t12 ||
        x.t13 != y.t13 || x.t23 != y.t23) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int edge = 512;
  int reps = 3;
  if (argc > 1) edge = std::stoi(argv[1]);
  if (argc > 2) reps = std::stoi(argv[2]);

  std::printf("raster %dx%d, best of %d\n", edge, edge, reps);
  std::printf("%-22s %13s %13s %8s\n", "kernel", "parallel", "serial",
              "speedup");

  Rng rng(20240);
  PolsarRaster raster;
  raster.pixels = Grid<ScatteringMatrix>(edge, edge);
  for (auto& px : raster.pixels.cells) {
    auto draw = [&] { return Cpx(rng.next_gaussian(), rng.next_gaussian()); };
    px = ScatteringMatrix{draw(), draw(), draw(), draw()};
  }

  RealGrid span_par, span_ser;
  row("span",
      time_best_of(reps, [&] { span_par = span_raster(raster); }),
      time_best_of(reps, [&] { span_ser = serial::span_raster(raster); }),
      grids_equal(span_par, span_ser));

  CoherencyGrid rank1_par, rank1_ser;
  row("rank1 coherency",
      time_best_of(reps, [&] { rank1_par = rank1_grid(raster); }),
      time_best_of(reps, [&] { rank1_ser = serial::rank1_grid(raster); }),
      coherency_equal(rank1_par, rank1_ser));

  CoherencyGrid box_par, box_ser;
  row("boxcar 7x7",
      time_best_of(reps, [&] { box_par = boxcar_coherency(raster, 7); }),
      time_best_of(reps, [&] { box_ser = serial::boxcar_coherency(raster, 7); }),
      coherency_equal(box_par, box_ser));

  ComponentStack stack_par, stack_ser;
  row("yamaguchi decompose",
      time_best_of(reps, [&] { stack_par = decompose_raster(box_par); }),
      time_best_of(reps, [&] { stack_ser = serial::decompose_raster(box_par); }),
      grids_equal(stack_par.surface, stack_ser.surface) &&
          grids_equal(stack_par.double_bounce, stack_ser.double_bounce) &&
          grids_equal(stack_par.volume, stack_ser.volume) &&
          grids_equal(stack_par.helix, stack_ser.helix));

  MaskGrid mask_par, mask_ser;
  row("binarize",
      time_best_of(reps,
                   [&] { mask_par = binarize_component(span_par, 1.0); }),
      time_best_of(
          reps, [&] { mask_ser = serial::binarize_component(span_ser, 1.0); }),
      mask_par.cells == mask_ser.cells);

  std::vector<double> xs(static_cast<std::size_t>(edge) * edge);
  for (double& v : xs) v = rng.next_gaussian();
  double sum_par = 0.0, sum_ser = 0.0;
  row("reduction",
      time_best_of(reps, [&] { sum_par = pairwise_block_sum(xs); }),
      time_best_of(reps, [&] { sum_ser = serial::sum(xs); }),
      std::abs(sum_par - sum_ser) <=
          1e-12 * std::max(1.0, std::abs(sum_ser)));

  return 0;
}
