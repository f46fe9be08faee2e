#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dcmm/estimator.hpp"
#include "dcmm/kernels.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Indices of the k entries of largest magnitude, largest first. Ties keep
// the larger signed value first.
std::vector<Eigen::Index> top_by_magnitude(const Eigen::VectorXd& values, int k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double fa = std::fabs(values[a]), fb = std::fabs(values[b]);
    if (fa != fb) return fa > fb;
    return values[a] > values[b];
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Eigen::VectorXd residual_norms(const SparseGraph& g, const Eigen::VectorXd& values, const Eigen::MatrixXd& vecs) {
  Eigen::VectorXd res(values.size());
  Eigen::VectorXd av(g.n());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    Eigen::VectorXd v = vecs.col(k);
    g.multiply(view(v), view(av));
    res[k] = (av - values[k] * v).norm();
  }
  return res;
}

// Deterministic generic vector, orthogonalized against the first `m` columns.
Eigen::VectorXd fresh_direction(const Eigen::MatrixXd& q, Eigen::Index m, std::uint64_t salt) {
  const Eigen::Index n = q.rows();
  const auto& kern = kernels::active();
  Eigen::VectorXd v(n);
  const SampleSeed key{0x1A2C05ULL, salt};
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 2.0 * counter_uniform(key, static_cast<std::uint64_t>(i), 0) - 1.0;
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index c = 0; c < m; ++c) {
      const double h = kern.dot(q.col(c).data(), v.data(), static_cast<std::size_t>(n));
      kern.axpy(-h, q.col(c).data(), v.data(), static_cast<std::size_t>(n));
    }
  return v;
}

EigenPairs dense_pairs(const SparseGraph& g, int K) {
  const Index n = g.n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", Eigen::VectorXd());
  const auto sel = top_by_magnitude(es.eigenvalues(), K);
  EigenPairs out;
  out.values.resize(K);
  out.vectors.resize(n, K);
  for (int k = 0; k < K; ++k) {
    out.values[k] = es.eigenvalues()[sel[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = es.eigenvectors().col(sel[static_cast<std::size_t>(k)]);
  }
  out.method_used = EigenMethod::dense;
  return out;
}

EigenPairs lanczos_pairs(const SparseGraph& g, int K, const EigenOptions& opt, double norm_a) {
  const Index n = g.n();
  const auto& kern = kernels::active();
  const auto un = static_cast<std::size_t>(n);
  const Eigen::Index m_max = std::min<Eigen::Index>(n, std::max(opt.max_basis, K + 1));
  const double accept = opt.tol * norm_a;

  Eigen::MatrixXd q(n, std::min<Eigen::Index>(m_max, 64));
  std::vector<double> alpha, beta;
  Eigen::VectorXd w(n);
  Eigen::VectorXd last_residuals = Eigen::VectorXd::Constant(K, std::numeric_limits<double>::infinity());

  {
    Eigen::VectorXd v0 = fresh_direction(q, 0, 0);
    q.col(0) = v0 / v0.norm();
  }
  std::uint64_t restarts = 0;
  for (Eigen::Index j = 0; j < m_max; ++j) {
    g.multiply(view(q.col(j).eval()), view(w));
    const double a = kern.dot(q.col(j).data(), w.data(), un);
    alpha.push_back(a);
    kern.axpy(-a, q.col(j).data(), w.data(), un);
    if (j > 0) kern.axpy(-beta.back(), q.col(j - 1).data(), w.data(), un);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c <= j; ++c) {
        const double h = kern.dot(q.col(c).data(), w.data(), un);
        kern.axpy(-h, q.col(c).data(), w.data(), un);
      }
    double b = w.norm();
    const bool last = j + 1 == m_max;
    Eigen::VectorXd next;
    if (!last) {
      if (b <= 1e-12 * std::max(1.0, norm_a)) {
        // Invariant subspace: continue from a new direction; T decouples.
        b = 0.0;
        next = fresh_direction(q, j + 1, ++restarts);
        next /= next.norm();
      } else {
        next = w / b;
      }
    }
    beta.push_back(b);

    const Eigen::Index m = j + 1;
    const bool check = m >= std::min<Eigen::Index>(n, 2 * K + 10) && (m % 8 == 0 || last || b == 0.0);
    if (check && m >= K) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto sel = top_by_magnitude(tri.eigenvalues(), K);
      bool estimated_ok = true;
      for (int k = 0; k < K; ++k) {
        const double est = std::fabs(b * tri.eigenvectors()(m - 1, sel[static_cast<std::size_t>(k)]));
        if (est > accept) estimated_ok = false;
      }
      if (estimated_ok || last) {
        EigenPairs out;
        out.values.resize(K);
        Eigen::MatrixXd s(m, K);
        for (int k = 0; k < K; ++k) {
          out.values[k] = tri.eigenvalues()[sel[static_cast<std::size_t>(k)]];
          s.col(k) = tri.eigenvectors().col(sel[static_cast<std::size_t>(k)]);
        }
        out.vectors = q.leftCols(m) * s;
        out.residuals = residual_norms(g, out.values, out.vectors);
        out.iterations = static_cast<int>(m);
        out.method_used = EigenMethod::lanczos;
        last_residuals = out.residuals;
        if ((out.residuals.array() <= accept).all()) return out;
      }
    }
    if (!last) {
      if (q.cols() <= j + 1) q.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(m_max, 2 * q.cols()));
      q.col(j + 1) = next;
    }
  }
  std::ostringstream os;
  os << "Lanczos did not converge within " << m_max << " steps; residuals:";
  for (Eigen::Index k = 0; k < last_residuals.size(); ++k) os << ' ' << last_residuals[k];
  throw ConvergenceError(os.str(), last_residuals);
}

}  // namespace

double estimate_operator_norm(const SparseGraph& graph, int iterations) {
  const Index n = graph.n();
  if (n == 0 || graph.edge_count() == 0) return 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd y(n);
  double est = 0.0;
  for (int it = 0; it < std::max(1, iterations); ++it) {
    graph.multiply(view(x), view(y));
    const double norm = y.norm();
    if (norm == 0.0) break;
    est = std::max(est, norm);
    x = y / norm;
  }
  return est;
}

EigenPairs leading_eigenpairs(const SparseGraph& graph, int K, const EigenOptions& options) {
  const Index n = graph.n();
  if (n == 0) throw std::invalid_argument("leading_eigenpairs: empty graph");
  if (K < 1 || K >= n) throw std::invalid_argument("leading_eigenpairs: need 1 <= K < n");
  const double norm_a = estimate_operator_norm(graph, options.norm_iterations);

  EigenPairs out;
  if (norm_a == 0.0) {
    out.values = Eigen::VectorXd::Zero(K);
    out.vectors = Eigen::MatrixXd::Identity(n, K);
    out.method_used = EigenMethod::dense;
  } else {
    if (options.method == EigenMethod::dense) {
      out = dense_pairs(graph, K);
    } else if (options.method == EigenMethod::lanczos || n > options.dense_cutoff) {
      out = lanczos_pairs(graph, K, options, norm_a);
    } else {
      try {
        out = lanczos_pairs(graph, K, options, norm_a);
      } catch (const ConvergenceError&) {
        out = dense_pairs(graph, K);
      }
    }
  }
  out.operator_norm = norm_a;
  out.residuals = residual_norms(graph, out.values, out.vectors);
  if (!((out.residuals.array() <= options.tol * std::max(norm_a, 1.0)).all()))
    throw ConvergenceError("eigenpair residuals exceed tolerance", out.residuals);
  return out;
}

}  // namespace dcmm
