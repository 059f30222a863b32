#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "polsarkit/queries.hpp"
#include "polsarkit/version.hpp"
#include "test_util.hpp"

using namespace polsar;

namespace {

Vec3c apply(const Mat3& m, const Vec3c& y) {
  Vec3c out{};
  for (int r = 0; r < 3; ++r) {
    Cpx acc = 0.0;
    for (int c = 0; c < 3; ++c) {
      acc += m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
             y[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

double norm3(const Vec3c& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return num / std::sqrt(na * nb);
}

}  // namespace

TEST_CASE("surface basis maps its eigenvector and kills its null direction") {
  const Mat3 s = basis_matrix(BasisKind::Surface).matrix;
  const Vec3c e1{Cpx(1, 0), Cpx(0, 0), Cpx(0, 0)};
  const Vec3c e2{Cpx(0, 0), Cpx(1, 0), Cpx(0, 0)};
  const Vec3c x1 = apply(s, e1);
  const Vec3c x2 = apply(s, e2);
  CHECK(x1[0] == Cpx(1, 0));
  CHECK(x1[1] == Cpx(0, 0));
  CHECK(x1[2] == Cpx(0, 0));
  CHECK(norm3(x2) == 0.0);
}

TEST_CASE("sampled pairs satisfy the matrix relation exactly") {
  for (const auto& basis : all_bases()) {
    CAPTURE(basis_name(basis.kind));
    const auto pairs = sample_pairs(basis, 16, 42);
    CHECK(pairs.size() == 16);
    for (const auto& p : pairs) {
      CHECK(std::abs(norm3(p.y) - 1.0) <= 1e-12);
      const Vec3c expect = apply(basis.matrix, p.y);
      for (int i = 0; i < 3; ++i) {
        CHECK(p.x[static_cast<std::size_t>(i)] == expect[static_cast<std::size_t>(i)]);
      }
    }
  }
}

TEST_CASE("pair embedding is deterministic and odd at the origin") {
  const auto pairs = sample_pairs(basis_matrix(BasisKind::Helix), 4, 7);
  const auto a = embed_pair(pairs[2]);
  const auto b = embed_pair(pairs[2]);
  CHECK(a.size() == kEmbedDim);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  PairSample zero;  // default zero vectors
  zero.y = Vec3c{};
  zero.x = Vec3c{};
  for (double v : embed_pair(zero)) CHECK(v == 0.0);
}

TEST_CASE("embeddings of different bases are not colinear") {
  const auto ps = sample_pairs(basis_matrix(BasisKind::Surface), 1, 99);
  const auto pd = sample_pairs(basis_matrix(BasisKind::DoubleBounce), 1, 99);
  const double c = cosine(embed_pair(ps[0]), embed_pair(pd[0]));
  CHECK(std::abs(c) < 0.99);
}

TEST_CASE("query of one sample equals that sample's embedding") {
  const ScatteringBasis basis = basis_matrix(BasisKind::RotatedDihedral);
  const ScatteringQuery q = init_query(basis, 1, 1234);
  const auto pairs = sample_pairs(basis, 1, 1234);
  const auto emb = embed_pair(pairs[0]);
  REQUIRE(q.vec768.size() == emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) CHECK(q.vec768[i] == emb[i]);
  double norm = 0.0;
  for (double v : q.vec256) norm += v * v;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean embedding converges at the square-root rate") {
  // prefix sampling means vec768 at larger m walks toward the limit;
  // average deviation over seeds should shrink close to sqrt(m ratio)
  auto rms_norm = [](int m) {
    double acc = 0.0;
    const int trials = 12;
    for (int t = 0; t < trials; ++t) {
      const ScatteringQuery q =
          init_query(basis_matrix(BasisKind::Volume), m, 9000 + static_cast<std::uint64_t>(t));
      double n2 = 0.0;
      for (double v : q.vec768) n2 += v * v;
      acc += n2;
    }
    return std::sqrt(acc / trials);
  };
  const double r64 = rms_norm(64);
  const double r1024 = rms_norm(1024);
  const double ratio = r64 / r1024;  // ideal 4
  CHECK(ratio > 2.4);
  CHECK(ratio < 6.5);
}

TEST_CASE("queries are bit-deterministic in kind, seed, and sample count") {
  const ScatteringQuery a = init_query(basis_matrix(BasisKind::MixedDipole), 32, 5);
  const ScatteringQuery b = init_query(basis_matrix(BasisKind::MixedDipole), 32, 5);
  const ScatteringQuery c = init_query(basis_matrix(BasisKind::MixedDipole), 32, 6);
  for (std::size_t i = 0; i < a.vec768.size(); ++i) CHECK(a.vec768[i] == b.vec768[i]);
  for (std::size_t i = 0; i < a.vec256.size(); ++i) CHECK(a.vec256[i] == b.vec256[i]);
  bool differs = false;
  for (std::size_t i = 0; i < a.vec256.size(); ++i) {
    differs = differs || a.vec256[i] != c.vec256[i];
  }
  CHECK(differs);
}

TEST_CASE("independence report flags duplicates and clears orthogonal sets") {
  ScatteringQuery e1, e2;
  e1.vec256.assign(kQueryDim, 0.0);
  e2.vec256.assign(kQueryDim, 0.0);
  e1.vec256[0] = 1.0;
  e2.vec256[1] = 1.0;

  const IndependenceReport dup = independence_report({e1, e1});
  CHECK(dup.max_off_diag == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dup.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));

  const IndependenceReport ortho = independence_report({e1, e2});
  CHECK(ortho.max_off_diag == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ortho.at(0, 1) == ortho.at(1, 0));
}

TEST_CASE("shipped queries stay mutually separated") {
  const auto queries = shipped_queries(kQuerySeed, kQuerySamplePairs);
  REQUIRE(queries.size() == kBasisCount);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    CHECK(queries[i].kind == static_cast<BasisKind>(i));
    CHECK(queries[i].m == kQuerySamplePairs);
    double norm = 0.0;
    for (double v : queries[i].vec256) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const IndependenceReport rep = independence_report(queries);
  CHECK(rep.n == kBasisCount);
  for (int i = 0; i < rep.n; ++i) {
    CHECK(rep.at(i, i) == doctest::Approx(1.0).epsilon(1e-9));
    for (int j = 0; j < rep.n; ++j) CHECK(rep.at(i, j) == rep.at(j, i));
  }
  CHECK(rep.max_off_diag < 0.5);

  // same call is reproducible bit for bit
  const auto again = shipped_queries(kQuerySeed, kQuerySamplePairs);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (std::size_t k = 0; k < queries[i].vec256.size(); ++k) {
      CHECK(queries[i].vec256[k] == again[i].vec256[k]);
    }
  }
}
