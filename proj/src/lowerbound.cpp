#include "dcmm/lowerbound.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "dcmm/loss.hpp"
#include "dcmm/parallel.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

constexpr std::uint64_t kPackingPurpose = 0xC0DE5EEDULL;

Index min_code_distance(Index n0) { return (n0 + 7) / 8; }

Index l1_distance(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
  Index d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

Eigen::MatrixXd complement(const MixingMatrix& p) {
  return Eigen::MatrixXd::Ones(p.K(), p.K()) - p.matrix();
}

double bernoulli_term(double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; }

double pair_kl(double p, double q, KLMode mode) {
  if (p == q) return 0.0;
  if (q <= 0.0 || q >= 1.0) {
    std::ostringstream os;
    os << "KL divergence is infinite: reference probability " << q << " against " << p;
    throw InfiniteKLError(os.str());
  }
  double v = bernoulli_term(p, q);
  if (mode == KLMode::exact) v += bernoulli_term(1.0 - p, 1.0 - q);
  return v;
}

double omega_entry(const HypothesisFamily& f, int ell, Index i) {
  if (ell < 0 || ell > f.J()) throw std::out_of_range("hypothesis index out of range");
  if (i < 0 || i >= f.n0) throw std::out_of_range("node is not among the perturbed nodes");
  return f.code.omegas[static_cast<std::size_t>(ell)][static_cast<std::size_t>(i)];
}

}  // namespace

CodeFamily build_code_family(Index n0, int J_cap, std::uint64_t seed) {
  if (n0 < 16) throw std::invalid_argument("code family needs n0 >= 16");
  if (J_cap < 2) throw std::invalid_argument("J_cap must be >= 2");
  const int target = J_cap / 2;
  const Index dmin = min_code_distance(n0);
  const long long budget = 200LL * J_cap;

  std::mt19937_64 rng = make_engine(SampleSeed{seed, 0}, kPackingPurpose);
  std::vector<std::vector<std::int8_t>> base;
  const std::vector<std::int8_t> zero(static_cast<std::size_t>(n0), 0);
  std::vector<std::int8_t> word(static_cast<std::size_t>(n0));
  for (long long attempt = 0; attempt < budget && static_cast<int>(base.size()) < target; ++attempt) {
    std::uint64_t bits = 0;
    for (Index i = 0; i < n0; ++i) {
      if (i % 64 == 0) bits = rng();
      word[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(bits & 1U);
      bits >>= 1;
    }
    if (l1_distance(word, zero) < dmin) continue;
    bool far = true;
    for (const auto& w : base)
      if (l1_distance(word, w) < dmin) {
        far = false;
        break;
      }
    if (far) base.push_back(word);
  }
  if (static_cast<int>(base.size()) < std::min(2, target)) {
    std::ostringstream os;
    os << "packing found " << base.size() << " base words for n0 = " << n0 << " within " << budget
       << " attempts; increase n0 or lower J_cap";
    throw PackingError(os.str());
  }

  CodeFamily code;
  code.n0 = n0;
  code.J = 2 * static_cast<int>(base.size());
  code.omegas.reserve(static_cast<std::size_t>(code.J + 1));
  code.omegas.push_back(zero);
  for (const auto& w : base) {
    code.omegas.push_back(w);
    std::vector<std::int8_t> neg(w.size());
    std::transform(w.begin(), w.end(), neg.begin(), [](std::int8_t x) { return static_cast<std::int8_t>(-x); });
    code.omegas.push_back(std::move(neg));
  }
  if (!check_code_family(code).ok) throw std::logic_error("code family failed its own invariants");
  return code;
}

CodeFamilyCheck check_code_family(const CodeFamily& code) {
  CodeFamilyCheck r;
  const std::size_t m = code.omegas.size();
  r.min_distance = std::numeric_limits<Index>::max();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) r.min_distance = std::min(r.min_distance, l1_distance(code.omegas[a], code.omegas[b]));
  if (m < 2) r.min_distance = 0;
  for (Index i = 0; i < code.n0; ++i) {
    Index s = 0;
    for (const auto& w : code.omegas) s += w[static_cast<std::size_t>(i)];
    r.max_abs_column_sum = std::max(r.max_abs_column_sum, std::abs(s));
  }
  r.ok = m >= 2 && 8 * r.min_distance >= code.n0 && r.max_abs_column_sum == 0;
  return r;
}

Eigen::VectorXd find_eta(const MixingMatrix& p) {
  const int K = p.K();
  Eigen::MatrixXd m(2, K);
  m.row(0).setOnes();
  m.row(1) = (complement(p) * Eigen::VectorXd::Ones(K)).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > 1e-12 * std::max(1.0, s[0])) ++rank;
  if (rank >= K) throw ConstructionError("constraints on eta are independent for K = 2; use the K = 2 construction");
  Eigen::VectorXd eta = svd.matrixV().col(rank);
  eta.normalize();
  for (int k = 0; k < K; ++k)
    if (std::fabs(eta[k]) > 1e-12) {
      if (eta[k] < 0.0) eta = -eta;
      break;
    }
  return eta;
}

ModelParams HypothesisFamily::params(int ell) const {
  if (ell < 0 || ell > J()) throw std::out_of_range("hypothesis index out of range");
  return ModelParams(theta, pis[static_cast<std::size_t>(ell)], p);
}

MembershipMatrix HypothesisFamily::pi_original_order(int ell) const {
  if (ell < 0 || ell > J()) throw std::out_of_range("hypothesis index out of range");
  const Eigen::MatrixXd& src = pis[static_cast<std::size_t>(ell)].matrix();
  Eigen::MatrixXd out(src.rows(), src.cols());
  for (Index r = 0; r < src.rows(); ++r) out.row(order[static_cast<std::size_t>(r)]) = src.row(r);
  return MembershipMatrix(std::move(out));
}

HypothesisFamily build_hypotheses(const DegreeVector& theta, const MixingMatrix& p, double c, double c0,
                                  int J_cap, std::uint64_t seed) {
  const int K = p.K();
  const Index n = theta.size();
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw std::invalid_argument("c0 must be positive");
  const ThetaClassReport tc = check_theta_class(theta, K, c);
  if (!tc.member) throw std::invalid_argument("theta is outside the degree class for this (K, c)");

  HypothesisFamily f;
  f.K = K;
  f.c = c;
  f.c0 = c0;
  f.p = p;
  f.order.resize(static_cast<std::size_t>(n));
  std::iota(f.order.begin(), f.order.end(), Index{0});
  std::stable_sort(f.order.begin(), f.order.end(), [&](Index x, Index y) { return theta[x] > theta[y]; });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) sorted[static_cast<std::size_t>(r)] = theta[f.order[static_cast<std::size_t>(r)]];
  f.theta = DegreeVector(std::move(sorted));

  f.n1 = static_cast<Index>(std::floor(c * static_cast<double>(n) + 1e-9));
  f.n0 = n - K * f.n1;
  if (f.n1 < 1) throw std::invalid_argument("c * n < 1 leaves no pure nodes");
  if (f.n0 < 16) throw std::invalid_argument("n - K floor(c n) must be >= 16");
  f.delta_n = c0 / std::sqrt(static_cast<double>(n) * f.theta.mean());

  if (K == 2) {
    f.a = 1.0 - p(0, 1);
    if (!(f.a > 0.0 && f.a <= 1.0)) throw std::invalid_argument("K = 2 needs P = [[1, 1-a], [1-a, 1]] with a in (0, 1]");
    f.eta = Eigen::Vector2d(0.5, -0.5);
  } else {
    f.eta = find_eta(p);
  }
  f.code = build_code_family(f.n0, J_cap, seed);

  const double radius_cap = 1.0 / std::log(static_cast<double>(n));
  const double eta_norm = f.eta.norm();
  f.pis.reserve(static_cast<std::size_t>(f.J() + 1));
  for (int ell = 0; ell <= f.J(); ++ell) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, K);
    const auto& w = f.code.omegas[static_cast<std::size_t>(ell)];
    for (Index i = 0; i < f.n0; ++i) {
      const double s = w[static_cast<std::size_t>(i)] * f.delta_n / std::sqrt(f.theta[i]);
      for (int k = 0; k < K; ++k) {
        const double v = 1.0 / K + s * f.eta[k];
        if (v < 0.0 || v > 1.0) {
          std::ostringstream os;
          os << "c0 = " << c0 << " pushes node " << i << " of hypothesis " << ell
             << " out of the simplex; use a smaller c0";
          throw ConstructionError(os.str());
        }
        m(i, k) = v;
      }
      if (std::fabs(s) * eta_norm > radius_cap) {
        std::ostringstream os;
        os << "c0 = " << c0 << " moves node " << i << " of hypothesis " << ell
           << " farther than 1/log(n) from the barycenter; use a smaller c0";
        throw ConstructionError(os.str());
      }
    }
    for (Index r = 0; r < K * f.n1; ++r) m(f.n0 + r, static_cast<Eigen::Index>(r / f.n1)) = 1.0;
    f.pis.emplace_back(std::move(m));
  }

  f.in_star_class = true;
  for (int ell = 0; ell <= f.J(); ++ell) {
    const PiClassReport r = check_pi_star_class(f.pis[static_cast<std::size_t>(ell)], f.theta, K, c);
    if (!r.member) {
      f.in_star_class = false;
      f.star_class_failure = "hypothesis " + std::to_string(ell) + ": " + r.failing_clause;
      break;
    }
  }
  return f;
}

HypothesisFamily build_hypotheses_auto(const DegreeVector& theta, const MixingMatrix& p, double c, double c0,
                                       int J_cap, std::uint64_t seed, int max_halvings) {
  for (int h = 0;; ++h) {
    try {
      return build_hypotheses(theta, p, c, c0, J_cap, seed);
    } catch (const ConstructionError&) {
      if (h >= max_halvings) throw;
      c0 *= 0.5;
    }
  }
}

double kl_between(const ModelParams& a, const ModelParams& b, KLMode mode) {
  if (a.n() != b.n()) throw std::invalid_argument("KL needs parameter sets of equal n");
  const Index n = a.n();
  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) total += pair_kl(a.edge_probability(i, j), b.edge_probability(i, j), mode);
  return total;
}

double lemma_bound(int J, double beta) {
  if (J < 2) throw std::invalid_argument("lemma bound needs J >= 2");
  const double sj = std::sqrt(static_cast<double>(J));
  return sj / (1.0 + sj) * (1.0 - 2.0 * beta - std::sqrt(2.0 * beta / std::log(static_cast<double>(J))));
}

CertificationReport certify(const HypothesisFamily& family, double C0, double beta_max, int workers) {
  const int J = family.J();
  if (J < 2) throw std::invalid_argument("certification needs J >= 2");
  const auto m = static_cast<std::size_t>(J + 1);
  const double n = static_cast<double>(family.n());
  const double tbar = family.theta.mean();

  CertificationReport r;
  r.J = J;
  r.C0 = C0;
  r.beta_max = beta_max;
  r.s_n = 1.0 / std::sqrt(n * tbar * tbar);

  // Row j holds the minima over k > j, reduced afterwards in index order.
  std::vector<double> min_w(m, std::numeric_limits<double>::infinity());
  std::vector<double> min_u(m, std::numeric_limits<double>::infinity());
  parallel_for(m, workers, [&](std::size_t j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      const LossReport lr = evaluate_loss(family.pis[j], family.pis[k], family.theta);
      min_w[j] = std::min(min_w[j], lr.weighted);
      min_u[j] = std::min(min_u[j], lr.lower_unweighted.value_or(lr.unweighted));
    }
  });
  r.min_pairwise_loss = *std::min_element(min_w.begin(), min_w.end() - 1);
  r.min_pairwise_loss_unweighted = *std::min_element(min_u.begin(), min_u.end() - 1);
  r.separation_constant = r.min_pairwise_loss / r.s_n;

  std::vector<double> kl_exact(m, 0.0), kl_leading(m, 0.0);
  const ModelParams base = family.params(0);
  parallel_for(m, workers, [&](std::size_t ell) {
    if (ell == 0) return;
    const ModelParams pl = family.params(static_cast<int>(ell));
    kl_exact[ell] = kl_between(pl, base, KLMode::exact);
    kl_leading[ell] = kl_between(pl, base, KLMode::leading_term);
  });
  for (std::size_t ell = 0; ell < m; ++ell) {
    r.avg_kl_exact += kl_exact[ell];
    r.avg_kl_leading += kl_leading[ell];
  }
  r.avg_kl_exact /= static_cast<double>(m);
  r.avg_kl_leading /= static_cast<double>(m);

  r.log_J = std::log(static_cast<double>(J));
  r.beta_effective = std::max(0.0, r.avg_kl_exact / r.log_J);
  r.passes_separation = r.min_pairwise_loss >= 2.0 * C0 * r.s_n;
  r.passes_kl = r.beta_effective < beta_max;
  r.lemma_bound = lemma_bound(J, r.beta_effective);
  return r;
}

KLDecomposition kl_decomposition(const HypothesisFamily& family, int ell) {
  if (ell < 0 || ell > family.J()) throw std::out_of_range("hypothesis index out of range");
  const ModelParams pl = family.params(ell);
  const ModelParams p0 = family.params(0);
  const Index n = family.n(), n0 = family.n0;
  KLDecomposition d;
  for (Index i = 0; i < n0; ++i) {
    for (Index j = i + 1; j < n0; ++j) d.I += pair_kl(pl.edge_probability(i, j), p0.edge_probability(i, j), KLMode::leading_term);
    for (Index j = n0; j < n; ++j) {
      const double p = pl.edge_probability(i, j), q = p0.edge_probability(i, j);
      d.II += pair_kl(p, q, KLMode::leading_term);
      d.II1 += p - q;
      d.II2 += (p - q) * (p - q) / q;
    }
  }
  return d;
}

KLDecompositionAverage kl_decomposition_average(const HypothesisFamily& family) {
  KLDecompositionAverage out;
  const int m = family.J() + 1;
  for (int ell = 0; ell < m; ++ell) {
    const KLDecomposition d = kl_decomposition(family, ell);
    out.mean.I += d.I;
    out.mean.II += d.II;
    out.mean.II1 += d.II1;
    out.mean.II2 += d.II2;
  }
  out.mean.I /= m;
  out.mean.II /= m;
  out.mean.II1 /= m;
  out.mean.II2 /= m;

  const int K = family.K;
  const Eigen::MatrixXd pc = complement(family.p);
  const double d2 = family.delta_n * family.delta_n;
  double sqrt_sum = 0.0, pure_sum = 0.0;
  for (Index i = 0; i < family.n0; ++i) sqrt_sum += std::sqrt(family.theta[i]);
  for (Index j = family.n0; j < family.n(); ++j) pure_sum += family.theta[j];
  out.I_bound = 2.0 * std::fabs(family.eta.dot(pc * family.eta)) * d2 * sqrt_sum * sqrt_sum;
  double worst = 0.0;
  for (int k = 0; k < K; ++k) {
    const double g = family.eta.dot(pc.col(k));
    const double b = pc.row(k).sum() / K;
    worst = std::max(worst, g * g / (1.0 - b));
  }
  out.II2_bound = static_cast<double>(family.n0) * d2 * pure_sum * worst;
  return out;
}

double delta_mixed(const HypothesisFamily& family, int ell, Index i, Index j) {
  const double wi = omega_entry(family, ell, i), wj = omega_entry(family, ell, j);
  const Eigen::MatrixXd pc = complement(family.p);
  const int K = family.K;
  const double a_check = pc.sum() / (K * K);
  const double quad = family.eta.dot(pc * family.eta);
  return -quad / (1.0 - a_check) * family.delta_n * family.delta_n * wi * wj /
         std::sqrt(family.theta[i] * family.theta[j]);
}

double delta_mixed_pure(const HypothesisFamily& family, int ell, Index i, int k) {
  if (k < 0 || k >= family.K) throw std::out_of_range("community index out of range");
  const double wi = omega_entry(family, ell, i);
  const Eigen::MatrixXd pc = complement(family.p);
  const double b = pc.row(k).sum() / family.K;
  return -family.eta.dot(pc.col(k)) / (1.0 - b) * family.delta_n * wi / std::sqrt(family.theta[i]);
}

}  // namespace dcmm
