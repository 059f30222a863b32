#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "polsarkit/labelgen.hpp"
#include "polsarkit/parallel.hpp"
#include "polsarkit/polsar.hpp"
#include "polsarkit/reference.hpp"
#include "polsarkit/rng.hpp"
#include "polsarkit/yamaguchi.hpp"
#include "test_util.hpp"

using namespace polsar;

namespace {

bool grids_equal(const RealGrid& a, const RealGrid& b) {
  if (!a.same_geometry(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.cells[i] != b.cells[i]) return false;
  }
  return true;
}

bool coherency_equal(const CoherencyGrid& a, const CoherencyGrid& b) {
  if (!a.same_geometry(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
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

TEST_CASE("span kernels agree bit for bit with the serial reference") {
  const PolsarRaster r = testutil::random_raster(37, 41, 7001);
  CHECK(grids_equal(span_raster(r), serial::span_raster(r)));
}

TEST_CASE("coherency kernels agree bit for bit with the serial reference") {
  const PolsarRaster r = testutil::random_raster(23, 19, 7002);
  CHECK(coherency_equal(rank1_grid(r), serial::rank1_grid(r)));
  for (int window : {1, 3, 7}) {
    CAPTURE(window);
    CHECK(coherency_equal(boxcar_coherency(r, window),
                          serial::boxcar_coherency(r, window)));
    CHECK(coherency_equal(boxcar_average(rank1_grid(r), window),
                          serial::boxcar_average(serial::rank1_grid(r), window)));
  }
}

TEST_CASE("decomposition kernels agree bit for bit with the serial reference") {
  const PolsarRaster r = testutil::random_raster(21, 17, 7003, 1.4);
  const CoherencyGrid grid = boxcar_coherency(r, 3);
  const ComponentStack par = decompose_raster(grid);
  const ComponentStack ser = serial::decompose_raster(grid);
  for (int i = 0; i < kComponentCount; ++i) {
    CAPTURE(component_name(i));
    CHECK(grids_equal(par.plane(i), ser.plane(i)));
  }
}

TEST_CASE("binarization agrees bit for bit with the serial reference") {
  Rng rng(7004);
  RealGrid g(33, 29);
  for (double& v : g.cells) v = 2.0 * rng.next_double();
  const MaskGrid par = binarize_component(g, 1.0);
  const MaskGrid ser = serial::binarize_component(g, 1.0);
  REQUIRE(par.same_geometry(ser));
  for (std::size_t i = 0; i < par.size(); ++i) CHECK(par.cells[i] == ser.cells[i]);
}

TEST_CASE("pairwise reduction tracks plain summation") {
  Rng rng(7005);
  for (const std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{4095},
                              std::size_t{4096}, std::size_t{4097},
                              std::size_t{100000}}) {
    CAPTURE(n);
    std::vector<double> xs(n);
    for (double& v : xs) v = rng.next_gaussian();
    const double pairwise = pairwise_block_sum(xs.data(), xs.size());
    const double plain = serial::sum(xs);
    CHECK(testutil::approx_rel(pairwise, plain, 1e-12));
  }
}

TEST_CASE("pairwise reduction is deterministic across calls") {
  Rng rng(7006);
  std::vector<double> xs(250000);
  for (double& v : xs) v = rng.next_gaussian();
  const double a = pairwise_block_sum(xs.data(), xs.size());
  const double b = pairwise_block_sum(xs.data(), xs.size());
  CHECK(a == b);
}

TEST_CASE("parallel kernels are stable across repeated invocations") {
  const PolsarRaster r = testutil::random_raster(29, 31, 7007);
  const RealGrid s1 = span_raster(r);
  const RealGrid s2 = span_raster(r);
  CHECK(grids_equal(s1, s2));

  const CoherencyGrid g1 = boxcar_coherency(r, 5);
  const CoherencyGrid g2 = boxcar_coherency(r, 5);
  CHECK(coherency_equal(g1, g2));

  const ComponentStack d1 = decompose_raster(g1);
  const ComponentStack d2 = decompose_raster(g2);
  for (int i = 0; i < kComponentCount; ++i) {
    CHECK(grids_equal(d1.plane(i), d2.plane(i)));
  }
}
