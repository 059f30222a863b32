#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "polsarkit/bases.hpp"
#include "polsarkit/polsar.hpp"
#include "polsarkit/rng.hpp"
#include "test_util.hpp"

using namespace polsar;

namespace {

// independent principal-minor PSD check (all seven minors of a 3x3)
bool psd_by_minors(const Mat3& m, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (m[i][i].real() < -tol) return false;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double det2 = m[i][i].real() * m[j][j].real() - std::norm(m[i][j]);
      if (det2 < -tol) return false;
    }
  }
  const Cpx det3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return det3.real() >= -tol;
}

bool hermitian(const Mat3& m, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(m[i][i].imag()) > tol) return false;
    for (int j = 0; j < 3; ++j) {
      if (std::abs(m[i][j] - std::conj(m[j][i])) > tol) return false;
    }
  }
  return true;
}

double trace_re(const Mat3& m) {
  return m[0][0].real() + m[1][1].real() + m[2][2].real();
}

// scalar-loop mean coherency over a raster (estimator oracle)
CoherencyMatrix mean_coherency(const PolsarRaster& raster, int r0, int c0, int r1,
                               int c1) {
  CoherencyMatrix acc;
  int n = 0;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      acc += rank1_coherency(pauli_vector(symmetrize_reciprocal(raster.pixels.at(r, c))));
      ++n;
    }
  }
  acc *= 1.0 / n;
  return acc;
}

}  // namespace

TEST_CASE("fixed basis matrices match their closed forms") {
  const Mat3 s = basis_matrix(BasisKind::Surface).matrix;
  CHECK(s[0][0] == Cpx(1.0, 0.0));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != 0 || j != 0) CHECK(s[i][j] == Cpx(0.0, 0.0));
    }
  }

  const Mat3 v = basis_matrix(BasisKind::Volume).matrix;
  CHECK(v[0][0] == Cpx(0.5, 0.0));
  CHECK(v[1][1] == Cpx(0.25, 0.0));
  CHECK(v[2][2] == Cpx(0.25, 0.0));
  CHECK(trace_re(v) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("every basis is Hermitian, PSD, unit trace") {
  for (const auto& basis : all_bases()) {
    CAPTURE(basis_name(basis.kind));
    CHECK(hermitian(basis.matrix, 1e-12));
    CHECK(psd_by_minors(basis.matrix, 1e-12));
    CHECK(std::abs(trace_re(basis.matrix) - 1.0) <= 1e-12);
  }
}

TEST_CASE("bases are pairwise distinct in Frobenius distance") {
  const auto& bases = all_bases();
  for (std::size_t i = 0; i < bases.size(); ++i) {
    for (std::size_t j = i + 1; j < bases.size(); ++j) {
      CAPTURE(basis_name(bases[i].kind));
      CAPTURE(basis_name(bases[j].kind));
      CHECK(frobenius_distance(bases[i].matrix, bases[j].matrix) >= 0.1);
    }
  }
}

TEST_CASE("adaptive basis is seeded-deterministic") {
  const Mat3 a = basis_matrix(BasisKind::Adaptive).matrix;
  const Mat3 b = basis_matrix(BasisKind::Adaptive).matrix;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(a[i][j] == b[i][j]);
  }
}

TEST_CASE("pixel synthesis sums weighted bases") {
  TenPowers one_hot;
  one_hot.p[static_cast<int>(BasisKind::Surface)] = 10.0;
  const CoherencyMatrix t = synthesize_pixel(one_hot);
  CHECK(t.t11 == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(t.t22 == 0.0);
  CHECK(t.t33 == 0.0);

  TenPowers uniform;
  for (double& v : uniform.p) v = 0.1;
  CHECK(synthesize_pixel(uniform).trace() == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    TenPowers p;
    for (double& v : p.p) v = 5.0 * rng.next_double();
    const CoherencyMatrix m = synthesize_pixel(p);
    CHECK(std::abs(m.trace() - p.sum()) <= 1e-12 * std::max(1.0, p.sum()));
    CHECK(psd_by_minors(mat3_from_coherency(m), 1e-9 * p.sum() * p.sum()));
  }
}

TEST_CASE("reconstructed power equals the trace of the synthesized pixel") {
  TenPowers uniform;
  for (double& v : uniform.p) v = 0.1;
  CHECK(reconstruct_power(uniform) == doctest::Approx(1.0).epsilon(1e-15));

  TenPowers one_hot;
  one_hot.p[static_cast<int>(BasisKind::Helix)] = 7.5;
  CHECK(reconstruct_power(one_hot) == doctest::Approx(7.5));

  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    TenPowers p;
    for (double& v : p.p) v = 3.0 * rng.next_double();
    CHECK(std::abs(reconstruct_power(p) - synthesize_pixel(p).trace()) <=
          1e-12 * std::max(1.0, p.sum()));
  }
}

TEST_CASE("psd factor reconstructs the matrix") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const CoherencyMatrix t = testutil::random_psd(rng);
    const Mat3 m = mat3_from_coherency(t);
    const Mat3 l = psd_factor(m);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Cpx acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += l[i][k] * std::conj(l[j][k]);
        CHECK(std::abs(acc - m[i][j]) <= 1e-10 * std::max(1.0, t.trace()));
      }
    }
  }

  // rank-deficient input
  const CoherencyMatrix rank1 = synthesize_pixel([] {
    TenPowers p;
    p.p[static_cast<int>(BasisKind::OrientedDipole)] = 4.0;
    return p;
  }());
  const Mat3 m1 = mat3_from_coherency(rank1);
  const Mat3 l1 = psd_factor(m1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Cpx acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += l1[i][k] * std::conj(l1[j][k]);
      CHECK(std::abs(acc - m1[i][j]) <= 1e-10);
    }
  }
}

TEST_CASE("scene validation rejects bad tilings") {
  SceneSpec spec;
  spec.height = 4;
  spec.width = 4;
  SceneRegion whole;
  whole.r1 = 4;
  whole.c1 = 4;
  spec.regions.push_back(whole);
  CHECK_NOTHROW(validate_scene(spec));

  SceneSpec empty = spec;
  empty.regions[0].r1 = 0;
  CHECK_THROWS_AS(validate_scene(empty), std::invalid_argument);

  SceneSpec gap = spec;
  gap.regions[0].r1 = 3;
  CHECK_THROWS_AS(validate_scene(gap), std::invalid_argument);

  SceneSpec overlap = spec;
  overlap.regions.push_back(whole);
  CHECK_THROWS_AS(validate_scene(overlap), std::invalid_argument);

  SceneSpec none;
  none.height = 2;
  none.width = 2;
  CHECK_THROWS_AS(validate_scene(none), std::invalid_argument);
}

TEST_CASE("single-region synthetic scene matches the target statistics") {
  SceneSpec spec;
  spec.height = 64;
  spec.width = 64;
  SceneRegion reg;
  reg.r1 = 64;
  reg.c1 = 64;
  reg.powers.p[static_cast<int>(BasisKind::Surface)] = 10.0;
  spec.regions.push_back(reg);

  const PolsarRaster scene = synthesize_scene(spec, 2024);
  const CoherencyMatrix mean = mean_coherency(scene, 0, 0, 64, 64);
  // estimator sigma for t11 is T11/sqrt(n)
  const double sigma = 10.0 / 64.0;
  CHECK(std::abs(mean.t11 - 10.0) < 3.0 * sigma);
  // surface target is rank one in the first Pauli channel; others vanish
  CHECK(mean.t22 == 0.0);
  CHECK(mean.t33 == 0.0);
}

TEST_CASE("zero-power scene synthesizes a zero raster") {
  SceneSpec spec;
  spec.height = 3;
  spec.width = 5;
  SceneRegion reg;
  reg.r1 = 3;
  reg.c1 = 5;
  spec.regions.push_back(reg);
  const PolsarRaster scene = synthesize_scene(spec, 9);
  for (const auto& px : scene.pixels.cells) {
    CHECK(px.hh == Cpx(0.0, 0.0));
    CHECK(px.hv == Cpx(0.0, 0.0));
    CHECK(px.vh == Cpx(0.0, 0.0));
    CHECK(px.vv == Cpx(0.0, 0.0));
  }
}

TEST_CASE("two-region scene means separate") {
  SceneSpec spec;
  spec.height = 64;
  spec.width = 64;
  SceneRegion left;
  left.r1 = 64;
  left.c1 = 32;
  left.powers.p[static_cast<int>(BasisKind::Surface)] = 10.0;
  SceneRegion right;
  right.c0 = 32;
  right.r1 = 64;
  right.c1 = 64;
  right.powers.p[static_cast<int>(BasisKind::DoubleBounce)] = 10.0;
  spec.regions = {left, right};

  const PolsarRaster scene = synthesize_scene(spec, 77);
  const CoherencyMatrix ml = mean_coherency(scene, 0, 0, 64, 32);
  const CoherencyMatrix mr = mean_coherency(scene, 0, 32, 64, 64);
  const double sigma = 10.0 / std::sqrt(64.0 * 32.0);
  CHECK(std::abs(ml.t11 - 10.0) < 3.0 * sigma);
  CHECK(std::abs(mr.t22 - 10.0) < 3.0 * sigma);
  CHECK(ml.t11 > 10.0 * ml.t22);
  CHECK(mr.t22 > 10.0 * mr.t11);
}

TEST_CASE("scene synthesis is bit-deterministic per seed") {
  SceneSpec spec;
  spec.height = 8;
  spec.width = 8;
  SceneRegion reg;
  reg.r1 = 8;
  reg.c1 = 8;
  for (double& v : reg.powers.p) v = 0.7;
  spec.regions.push_back(reg);

  const PolsarRaster a = synthesize_scene(spec, 123);
  const PolsarRaster b = synthesize_scene(spec, 123);
  const PolsarRaster c = synthesize_scene(spec, 124);
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    identical = identical && a.pixels.cells[i].hh == b.pixels.cells[i].hh &&
                a.pixels.cells[i].hv == b.pixels.cells[i].hv &&
                a.pixels.cells[i].vv == b.pixels.cells[i].vv;
    differs = differs || a.pixels.cells[i].hh != c.pixels.cells[i].hh;
  }
  CHECK(identical);
  CHECK(differs);
}
