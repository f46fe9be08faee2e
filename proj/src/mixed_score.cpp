#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dcmm/cluster.hpp"
#include "dcmm/estimator.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

constexpr double kAffineTol = 1e-10;

bool affinely_independent(const Eigen::MatrixXd& vertices) {
  const Eigen::Index K = vertices.rows();
  Eigen::MatrixXd m(K, K);
  m.col(0).setOnes();
  m.rightCols(K - 1) = vertices;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s.minCoeff() > kAffineTol * std::max(1.0, s.maxCoeff());
}

// Successive projection on rows of `y`; returns the selected row indices.
std::vector<Eigen::Index> successive_projection(Eigen::MatrixXd y, int K) {
  const Eigen::Index m = y.rows(), d = y.cols();
  std::vector<Eigen::Index> picked;
  for (int t = 0; t < K; ++t) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) s += y(i, c) * y(i, c);
      if (s > best_norm) {
        best_norm = s;
        best = i;
      }
    }
    picked.push_back(best);
    if (best_norm <= 0.0) break;
    const double inv = 1.0 / std::sqrt(best_norm);
    Eigen::VectorXd u(d);
    for (Eigen::Index c = 0; c < d; ++c) u[c] = y(best, c) * inv;
    for (Eigen::Index i = 0; i < m; ++i) {
      double h = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) h += y(i, c) * u[c];
      for (Eigen::Index c = 0; c < d; ++c) y(i, c) -= h * u[c];
    }
  }
  return picked;
}

// One Lloyd step: each vertex moves to the mean of the rows that are nearest
// to it and lie within `radius`.
Eigen::MatrixXd lloyd_refine(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& vertices) {
  const Eigen::Index K = vertices.rows();
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = a + 1; b < K; ++b) sep = std::min(sep, (vertices.row(a) - vertices.row(b)).norm());
  const double radius = 0.25 * sep;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, vertices.cols());
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < K; ++a) {
      const double d = (rows.row(i) - vertices.row(a)).norm();
      if (d < best_d) {
        best_d = d;
        best = a;
      }
    }
    if (best_d <= radius) {
      sums.row(best) += rows.row(i);
      ++counts[static_cast<std::size_t>(best)];
    }
  }
  Eigen::MatrixXd out = vertices;
  for (Eigen::Index a = 0; a < K; ++a)
    if (counts[static_cast<std::size_t>(a)] > 0)
      out.row(a) = sums.row(a) / static_cast<double>(counts[static_cast<std::size_t>(a)]);
  return out;
}

// Lexicographic order of vertices after flipping each coordinate to the sign
// of its column's third moment; invariant under eigenvector sign flips.
Eigen::MatrixXd canonical_order(const Eigen::MatrixXd& ratios, const Eigen::MatrixXd& vertices) {
  const Eigen::Index K = vertices.rows(), d = vertices.cols();
  std::vector<double> sign(static_cast<std::size_t>(d), 1.0);
  for (Eigen::Index c = 0; c < d; ++c) {
    double m3 = 0.0;
    for (Eigen::Index i = 0; i < ratios.rows(); ++i) m3 += ratios(i, c) * ratios(i, c) * ratios(i, c);
    if (m3 < 0.0) sign[static_cast<std::size_t>(c)] = -1.0;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const double va = sign[static_cast<std::size_t>(c)] * vertices(a, c);
      const double vb = sign[static_cast<std::size_t>(c)] * vertices(b, c);
      if (va != vb) return va < vb;
    }
    return false;
  });
  Eigen::MatrixXd out(K, d);
  for (Eigen::Index a = 0; a < K; ++a) out.row(a) = vertices.row(order[static_cast<std::size_t>(a)]);
  return out;
}

}  // namespace

SpectralEmbedding score_embedding(const EigenPairs& pairs, const EmbeddingOptions& options) {
  const auto K = static_cast<int>(pairs.values.size());
  if (K < 2 || pairs.vectors.cols() != K) throw EstimationError("score_embedding needs K >= 2 eigenpairs");
  if (!(options.drop_quantile >= 0.0 && options.drop_quantile <= 1.0))
    throw std::invalid_argument("drop_quantile must lie in [0, 1]");
  const Index n = pairs.vectors.rows();

  SpectralEmbedding emb;
  emb.eigenvalues = pairs.values;
  emb.xi1 = pairs.vectors.col(0);
  const double total = emb.xi1.sum();
  if (total < 0.0 || (total == 0.0 && emb.xi1.maxCoeff() < -emb.xi1.minCoeff())) emb.xi1 = -emb.xi1;

  std::vector<double> mags(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::fabs(emb.xi1[i]);
  const auto qpos = static_cast<std::size_t>(std::floor(options.drop_quantile * static_cast<double>(n - 1)));
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(qpos), mags.end());
  const double threshold = std::max(1e-12, options.safety_factor * mags[qpos]);

  for (Index i = 0; i < n; ++i) (std::fabs(emb.xi1[i]) < threshold ? emb.dropped : emb.retained).push_back(i);
  if (emb.retained.empty()) throw EstimationError("every node was dropped for a vanishing first eigenvector entry");

  emb.ratios.resize(static_cast<Eigen::Index>(emb.retained.size()), K - 1);
  for (std::size_t r = 0; r < emb.retained.size(); ++r) {
    const Index i = emb.retained[r];
    for (int k = 1; k < K; ++k) emb.ratios(static_cast<Eigen::Index>(r), k - 1) = pairs.vectors(i, k) / emb.xi1[i];
  }
  return emb;
}

Eigen::MatrixXd barycentric_weights(const Eigen::MatrixXd& ratios, const Eigen::MatrixXd& vertices) {
  const Eigen::Index K = vertices.rows();
  if (vertices.cols() != K - 1 || ratios.cols() != K - 1) throw std::invalid_argument("barycentric: dimension mismatch");
  Eigen::MatrixXd m(K, K);
  m.row(0).setOnes();
  m.bottomRows(K - 1) = vertices.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw EstimationError("singular barycentric system");
  Eigen::MatrixXd rhs(K, ratios.rows());
  rhs.row(0).setOnes();
  rhs.bottomRows(K - 1) = ratios.transpose();
  return lu.solve(rhs).transpose();
}

SimplexVertices hunt_vertices(const SpectralEmbedding& embedding, int K, std::uint64_t seed) {
  const Eigen::MatrixXd& r = embedding.ratios;
  if (K < 2 || r.cols() != K - 1) throw std::invalid_argument("hunt_vertices: ratio dimension must be K-1");
  if (r.rows() < K) throw EstimationError("hunt_vertices: fewer retained rows than vertices");

  SimplexVertices out;
  Eigen::MatrixXd lifted(r.rows(), K);
  lifted.col(0).setOnes();
  lifted.rightCols(K - 1) = r;
  const auto picked = successive_projection(lifted, K);
  Eigen::MatrixXd v(K, K - 1);
  bool ok = static_cast<int>(picked.size()) == K;
  if (ok) {
    for (int a = 0; a < K; ++a) v.row(a) = r.row(picked[static_cast<std::size_t>(a)]);
    ok = affinely_independent(v);
  }
  if (ok) {
    v = lloyd_refine(r, v);
    ok = affinely_independent(v);
  }
  if (!ok) {
    std::mt19937_64 rng = make_engine(SampleSeed{seed, 0}, 0x7E27E2ULL);
    v = kmeans(r, K, rng).centers;
    out.used_kmeans_fallback = true;
    if (!affinely_independent(v)) throw EstimationError("vertex hunting produced an affinely dependent vertex set");
  }
  out.points = canonical_order(r, v);
  const Eigen::MatrixXd w = barycentric_weights(r, out.points);
  out.max_negative_coordinate = std::min(0.0, w.minCoeff());
  return out;
}

MembershipEstimate estimate_memberships(const SpectralEmbedding& embedding, const SimplexVertices& vertices,
                                        const Eigen::VectorXd& eigenvalues) {
  const int K = static_cast<int>(vertices.points.rows());
  if (eigenvalues.size() != K) throw std::invalid_argument("estimate_memberships: need K eigenvalues");
  const Eigen::MatrixXd w = barycentric_weights(embedding.ratios, vertices.points);

  MembershipEstimate est;
  est.vertex_scales.resize(K);
  for (int k = 0; k < K; ++k) {
    double bracket = eigenvalues[0];
    for (int m = 1; m < K; ++m) bracket += eigenvalues[m] * vertices.points(k, m - 1) * vertices.points(k, m - 1);
    // Noise can push the bracket non-positive far from the population regime.
    bracket = std::max(bracket, 1e-12 * std::fabs(eigenvalues[0]));
    est.vertex_scales[k] = 1.0 / std::sqrt(bracket);
  }

  const Index n = embedding.n();
  Eigen::MatrixXd pi = Eigen::MatrixXd::Constant(n, K, 1.0 / K);
  est.flagged.assign(static_cast<std::size_t>(n), false);
  for (Index i : embedding.dropped) est.flagged[static_cast<std::size_t>(i)] = true;
  est.dropped_count = static_cast<Index>(embedding.dropped.size());

  for (std::size_t r = 0; r < embedding.retained.size(); ++r) {
    const Index i = embedding.retained[r];
    Eigen::RowVectorXd row(K);
    for (int k = 0; k < K; ++k)
      row[k] = std::max(0.0, w(static_cast<Eigen::Index>(r), k)) / est.vertex_scales[k];
    const double s = row.sum();
    if (s > 0.0) {
      row /= s;
    } else {
      row.setConstant(1.0 / K);
    }
    pi.row(i) = row;
  }
  est.max_negative_coordinate = std::min(0.0, w.size() ? w.minCoeff() : 0.0);
  est.pi_hat = MembershipMatrix(std::move(pi));
  return est;
}

MixedScoreResult mixed_score(const SparseGraph& graph, int K, const MixedScoreOptions& options) {
  if (K < 2) throw std::invalid_argument("mixed_score needs K >= 2");
  MixedScoreResult out;
  out.eigen = leading_eigenpairs(graph, K, options.eigen);
  const SpectralEmbedding emb = score_embedding(out.eigen, options.embedding);
  out.vertices = hunt_vertices(emb, K, options.seed);
  out.estimate = estimate_memberships(emb, out.vertices, out.eigen.values);
  return out;
}

}  // namespace dcmm
