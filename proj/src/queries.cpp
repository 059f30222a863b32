#include "polsarkit/queries.hpp"

#include <cmath>
#include <stdexcept>

#include "polsarkit/rng.hpp"
#include "polsarkit/version.hpp"

namespace polsar {

namespace {

// Fourier feature width. Wide enough that embedding coordinates
// decorrelate despite the 12-dim input bottleneck; part of the format.
constexpr double kEmbedOmega = 8.0;

// Fixed projections shared by every embedding; part of the format.
const std::vector<double>& embed_projection() {
  static const std::vector<double> proj = [] {
    Rng rng = Rng(kQuerySeed).derive(1);
    std::vector<double> a(static_cast<std::size_t>(kEmbedDim) * 12);
    const double scale = kEmbedOmega / std::sqrt(12.0);
    for (double& v : a) v = scale * rng.next_gaussian();
    return a;
  }();
  return proj;
}

const std::vector<double>& query_projection() {
  static const std::vector<double> proj = [] {
    Rng rng = Rng(kQuerySeed).derive(2);
    std::vector<double> a(static_cast<std::size_t>(kQueryDim) * kEmbedDim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kEmbedDim));
    for (double& v : a) v = scale * rng.next_gaussian();
    return a;
  }();
  return proj;
}

}  // namespace

std::vector<PairSample> sample_pairs(const ScatteringBasis& basis, int m,
                                     std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample pair count must be >= 1");
  std::vector<PairSample> out;
  out.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  for (int i = 0; i < m; ++i) {
    PairSample p;
    double norm_sq = 0.0;
    for (auto& y : p.y) {
      y = rng.next_circular();
      norm_sq += std::norm(y);
    }
    const double inv = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
    for (auto& y : p.y) y *= inv;
    if (inv == 0.0) p.y[0] = Cpx(1.0, 0.0);
    for (int r = 0; r < 3; ++r) {
      Cpx acc = 0.0;
      for (int c = 0; c < 3; ++c) acc += basis.matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * p.y[static_cast<std::size_t>(c)];
      p.x[static_cast<std::size_t>(r)] = acc;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> embed_pair(const PairSample& pair) {
  std::array<double, 12> u{};
  for (int i = 0; i < 3; ++i) {
    u[static_cast<std::size_t>(2 * i)] = pair.y[static_cast<std::size_t>(i)].real();
    u[static_cast<std::size_t>(2 * i + 1)] = pair.y[static_cast<std::size_t>(i)].imag();
    u[static_cast<std::size_t>(6 + 2 * i)] = pair.x[static_cast<std::size_t>(i)].real();
    u[static_cast<std::size_t>(6 + 2 * i + 1)] = pair.x[static_cast<std::size_t>(i)].imag();
  }
  const auto& proj = embed_projection();
  std::vector<double> out(kEmbedDim);
  for (int r = 0; r < kEmbedDim; ++r) {
    double acc = 0.0;
    const double* row = proj.data() + static_cast<std::size_t>(r) * 12;
    for (int c = 0; c < 12; ++c) acc += row[c] * u[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = std::sin(acc);
  }
  return out;
}

ScatteringQuery init_query(const ScatteringBasis& basis, int m, std::uint64_t seed) {
  ScatteringQuery q;
  q.kind = basis.kind;
  q.seed = seed;
  q.m = m;
  q.vec768.assign(kEmbedDim, 0.0);
  const auto pairs = sample_pairs(basis, m, seed);
  for (const auto& pair : pairs) {
    const auto e = embed_pair(pair);
    for (int i = 0; i < kEmbedDim; ++i) q.vec768[static_cast<std::size_t>(i)] += e[static_cast<std::size_t>(i)];
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (double& v : q.vec768) v *= inv_m;

  const auto& proj = query_projection();
  q.vec256.assign(kQueryDim, 0.0);
  for (int r = 0; r < kQueryDim; ++r) {
    double acc = 0.0;
    const double* row = proj.data() + static_cast<std::size_t>(r) * kEmbedDim;
    for (int c = 0; c < kEmbedDim; ++c) acc += row[c] * q.vec768[static_cast<std::size_t>(c)];
    q.vec256[static_cast<std::size_t>(r)] = acc;
  }
  double norm_sq = 0.0;
  for (double v : q.vec256) norm_sq += v * v;
  if (!(norm_sq > 0.0)) {
    throw std::runtime_error("degenerate query embedding (zero projection)");
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : q.vec256) v *= inv;
  return q;
}

std::vector<ScatteringQuery> shipped_queries(std::uint64_t seed, int m) {
  std::vector<ScatteringQuery> out;
  out.reserve(kBasisCount);
  for (int i = 0; i < kBasisCount; ++i) {
    const auto kind = static_cast<BasisKind>(i);
    out.push_back(init_query(basis_matrix(kind), m,
                             Rng::mix(seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

IndependenceReport independence_report(const std::vector<ScatteringQuery>& queries) {
  const int n = static_cast<int>(queries.size());
  if (n < 2) throw std::invalid_argument("independence report needs >= 2 queries");
  IndependenceReport rep;
  rep.n = n;
  rep.cosines.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double dot = 0.0, ni = 0.0, nj = 0.0;
      const auto& a = queries[static_cast<std::size_t>(i)].vec256;
      const auto& b = queries[static_cast<std::size_t>(j)].vec256;
      for (int k = 0; k < kQueryDim; ++k) {
        dot += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
        ni += a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
        nj += b[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
      }
      const double cos_ij = dot / std::sqrt(ni * nj);
      rep.cosines[static_cast<std::size_t>(i) * n + j] = cos_ij;
      if (i != j) rep.max_off_diag = std::max(rep.max_off_diag, std::abs(cos_ij));
    }
  }
  return rep;
}

}  // namespace polsar
