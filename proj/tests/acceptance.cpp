// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dcmm/bench.hpp"
#include "dcmm/estimator.hpp"
#include "dcmm/loss.hpp"
#include "dcmm/lowerbound.hpp"
#include "dcmm/sampler.hpp"
#include "helpers.hpp"

using namespace dcmm;

namespace {

// Collects failed checks with a short reason; the first few are reported.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  std::string failures() const {
    std::ostringstream os;
    os << failures_.size() << "/" << total_ << " checks failed";
    for (std::size_t i = 0; i < failures_.size() && i < 3; ++i) os << "; " << failures_[i];
    return os.str();
  }
  std::size_t total() const { return total_; }

 private:
  std::size_t total_ = 0;
  std::vector<std::string> failures_;
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

DegreeVector constant_theta(Index n, double v) { return DegreeVector(std::vector<double>(static_cast<std::size_t>(n), v)); }

MixingMatrix two_community(double a) {
  Eigen::Matrix2d p;
  p << 1.0, 1.0 - a, 1.0 - a, 1.0;
  return MixingMatrix(p);
}

MixingMatrix three_community() {
  Eigen::Matrix3d p;
  p << 1.0, 0.2, 0.4, 0.2, 1.0, 0.6, 0.4, 0.6, 1.0;
  return MixingMatrix(p);
}

DegreeVector uniform_theta(Index n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (auto& x : t) x = u(rng);
  return DegreeVector(t);
}

MembershipMatrix random_pi(Index n, int K, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Eigen::MatrixXd pi(n, K);
  for (Index i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) pi(i, k) = g(rng);
    pi.row(i) /= pi.row(i).sum();
  }
  return MembershipMatrix(pi);
}

double naive_kl(const ModelParams& a, const ModelParams& b, bool exact) {
  const Eigen::MatrixXd oa = test::naive_omega(a), ob = test::naive_omega(b);
  double s = 0.0;
  for (Index i = 0; i < a.n(); ++i)
    for (Index j = i + 1; j < a.n(); ++j) {
      const double p = oa(i, j), q = ob(i, j);
      s += p * std::log(p / q);
      if (exact) s += (1 - p) * std::log((1 - p) / (1 - q));
    }
  return s;
}

// Largest deviation of the direct ratio Omega^(l)/Omega^(0) - 1 from the
// closed forms, over every mixed-mixed and mixed-pure pair and every l.
double worst_ratio_error(const HypothesisFamily& f) {
  const Eigen::MatrixXd o0 = assemble_omega(f.params(0));
  double worst = 0.0;
  for (int ell = 1; ell <= f.J(); ++ell) {
    const Eigen::MatrixXd ol = assemble_omega(f.params(ell));
    for (Index i = 0; i < f.n0; ++i) {
      for (Index j = 0; j < f.n0; ++j)
        if (i != j) worst = std::max(worst, std::fabs(ol(i, j) / o0(i, j) - 1.0 - delta_mixed(f, ell, i, j)));
      for (Index j = f.n0; j < f.n(); ++j) {
        const int k = static_cast<int>((j - f.n0) / f.n1);
        worst = std::max(worst, std::fabs(ol(i, j) / o0(i, j) - 1.0 - delta_mixed_pure(f, ell, i, k)));
      }
    }
  }
  return worst;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome finish(const Checks& c, const std::string& summary) {
  return {c.ok(), c.ok() ? summary + " (" + std::to_string(c.total()) + " checks)" : c.failures()};
}

// 1. K = 2 hypotheses reproduce the closed-form Omega; KL matches a naive oracle.
Outcome omega_closed_form() {
  Checks c;
  const HypothesisFamily f = build_hypotheses_auto(constant_theta(400, 0.5), two_community(0.5), 0.2, 0.1, 16, 7);
  double worst = 0.0;
  for (int ell = 0; ell <= f.J(); ++ell) {
    const Eigen::MatrixXd omega = assemble_omega(f.params(ell));
    const auto& w = f.code.omegas[static_cast<std::size_t>(ell)];
    std::vector<double> gamma(static_cast<std::size_t>(f.n()));
    for (Index i = 0; i < f.n(); ++i)
      gamma[static_cast<std::size_t>(i)] =
          i < f.n0 ? f.delta_n * w[static_cast<std::size_t>(i)] / std::sqrt(f.theta[i])
                   : (i < f.n0 + f.n1 ? 1.0 : -1.0);
    for (Index i = 0; i < f.n(); ++i)
      for (Index j = 0; j < f.n(); ++j) {
        if (i == j) continue;
        const double closed = f.theta[i] * f.theta[j] *
                              ((1 - f.a / 2) + (f.a / 2) * gamma[static_cast<std::size_t>(i)] *
                                                   gamma[static_cast<std::size_t>(j)]);
        worst = std::max(worst, std::fabs(closed - omega(i, j)));
      }
  }
  c.expect(worst < 1e-12, "Omega deviates from the closed form by " + num(worst));

  std::mt19937_64 rng(12);
  double worst_kl = 0.0;
  for (int t = 0; t < 50; ++t) {
    const ModelParams a = test::random_params(6, 2 + t % 3, rng);
    const ModelParams b(a.theta().scaled(0.9), test::random_params(6, a.K(), rng).pi(), a.p());
    worst_kl = std::max(worst_kl, std::fabs(kl_between(a, b, KLMode::exact) - naive_kl(a, b, true)));
    worst_kl = std::max(worst_kl, std::fabs(kl_between(a, b, KLMode::leading_term) - naive_kl(a, b, false)));
  }
  c.expect(worst_kl < 1e-12, "KL deviates from the naive loop by " + num(worst_kl));
  return finish(c, "max Omega error " + num(worst) + ", max KL error " + num(worst_kl));
}

// 2. Both lemma conditions hold with J_cap = 64.
Outcome certification() {
  Checks c;
  std::ostringstream summary;
  const HypothesisFamily f = build_hypotheses_auto(constant_theta(400, 0.5), two_community(0.5), 0.2, 0.1, 64, 11);
  c.expect(f.J() == 64, "J = " + std::to_string(f.J()));
  const CertificationReport r = certify(f, 0.0, kDefaultBetaMax, workers());
  const CertificationReport at = certify(f, r.separation_constant / 2, kDefaultBetaMax, workers());
  c.expect(r.separation_constant > 0.0, "separation constant " + num(r.separation_constant));
  c.expect(at.passes_separation, "separation fails at C0 = " + num(at.C0));
  c.expect(r.beta_effective < 0.125, "beta " + num(r.beta_effective));
  c.expect(at.passes_kl, "KL condition fails");
  c.expect(r.avg_kl_leading <= f.a * f.c0 * f.n0 * 1.1,
           "average KL " + num(r.avg_kl_leading) + " above a c0 n0 = " + num(f.a * f.c0 * f.n0));
  summary << "K=2 C0=" << num(r.separation_constant / 2) << " beta=" << num(r.beta_effective)
          << " avgKL=" << num(r.avg_kl_leading) << " <= " << num(f.a * f.c0 * f.n0);

  const HypothesisFamily h = build_hypotheses_auto(uniform_theta(600, 0.4, 1.0, 3), three_community(), 0.2, 0.1, 64, 5);
  const CertificationReport rh = certify(h, 0.0, kDefaultBetaMax, workers());
  c.expect(rh.separation_constant > 0.0, "K=3 separation constant " + num(rh.separation_constant));
  c.expect(rh.beta_effective < 0.125, "K=3 beta " + num(rh.beta_effective));
  summary << "; K=3 C0=" << num(rh.separation_constant / 2) << " beta=" << num(rh.beta_effective);
  return finish(c, summary.str());
}

// 3. KL block decomposition and the perturbation ratio formulas.
Outcome kl_blocks_and_ratios() {
  Checks c;
  const HypothesisFamily f2 = build_hypotheses_auto(constant_theta(400, 0.5), two_community(0.5), 0.2, 0.1, 16, 7);
  const HypothesisFamily f3 = build_hypotheses_auto(constant_theta(400, 0.6), three_community(), 0.2, 0.1, 8, 3);
  const HypothesisFamily f3h = build_hypotheses_auto(uniform_theta(400, 0.4, 1.0, 4), three_community(), 0.2, 0.1, 8, 9);
  double worst_ii1 = 0.0, worst_ratio = 0.0;
  for (const HypothesisFamily* f : {&f2, &f3, &f3h}) {
    const KLDecompositionAverage avg = kl_decomposition_average(*f);
    worst_ii1 = std::max(worst_ii1, std::fabs(avg.mean.II1));
    c.expect(avg.mean.I <= 1.1 * avg.I_bound, "I " + num(avg.mean.I) + " above bound " + num(avg.I_bound));
    c.expect(avg.mean.II2 <= 1.1 * avg.II2_bound, "II2 " + num(avg.mean.II2) + " above bound " + num(avg.II2_bound));
    worst_ratio = std::max(worst_ratio, worst_ratio_error(*f));
  }
  c.expect(worst_ii1 < 1e-10, "II1 = " + num(worst_ii1));
  c.expect(worst_ratio < 1e-12, "ratio error " + num(worst_ratio));

  // K = 2: both ratios reduce to a/(2-a) times the perturbation products.
  const double r = f2.a / (2.0 - f2.a);
  double worst_k2 = 0.0;
  for (int ell = 1; ell <= f2.J(); ++ell)
    for (Index i = 0; i < f2.n0; ++i) {
      const int wi = f2.code.omegas[static_cast<std::size_t>(ell)][static_cast<std::size_t>(i)];
      for (Index j = 0; j < f2.n0; ++j) {
        if (i == j) continue;
        const int wj = f2.code.omegas[static_cast<std::size_t>(ell)][static_cast<std::size_t>(j)];
        const double d = r * f2.delta_n * f2.delta_n / std::sqrt(f2.theta[i] * f2.theta[j]) * wi * wj;
        worst_k2 = std::max(worst_k2, std::fabs(delta_mixed(f2, ell, i, j) - d));
      }
      for (int k = 0; k < 2; ++k) {
        const double d = (k == 0 ? 1.0 : -1.0) * r * f2.delta_n / std::sqrt(f2.theta[i]) * wi;
        worst_k2 = std::max(worst_k2, std::fabs(delta_mixed_pure(f2, ell, i, k) - d));
      }
    }
  c.expect(worst_k2 < 1e-15, "K=2 reduced form error " + num(worst_k2));
  return finish(c, "|II1| " + num(worst_ii1) + ", ratio error " + num(worst_ratio));
}

// 4. General K: eta constraints, untouched pure block, rows in the simplex near the barycenter.
Outcome general_k() {
  Checks c;
  std::mt19937_64 rng(21);
  double worst_eta = 0.0;
  for (int t = 0; t < 10; ++t) {
    const MixingMatrix p = test::random_params(4, 3, rng).p();
    const Eigen::VectorXd eta = find_eta(p);
    const Eigen::MatrixXd pc = Eigen::MatrixXd::Ones(3, 3) - p.matrix();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    worst_eta = std::max({worst_eta, std::fabs(eta.norm() - 1.0), std::fabs(eta.dot(ones)),
                          std::fabs(eta.dot(pc * ones))});

    const HypothesisFamily f = build_hypotheses_auto(constant_theta(400, 0.6), p, 0.2, 0.1, 8, 30 + t);
    const double radius = 1.0 / std::log(static_cast<double>(f.n()));
    const Eigen::MatrixXd o0 = assemble_omega(f.params(0));
    const Index pure = f.n() - f.n0;
    for (int ell = 0; ell <= f.J(); ++ell) {
      const MembershipMatrix& pi = f.pis[static_cast<std::size_t>(ell)];
      for (Index i = 0; i < f.n(); ++i) {
        c.expect(pi.row(i).minCoeff() >= 0.0, "negative membership");
        c.expect(std::fabs(pi.row(i).sum() - 1.0) < 1e-12, "row does not sum to one");
      }
      for (Index i = 0; i < f.n0; ++i)
        c.expect((pi.row(i).array() - 1.0 / 3.0).matrix().norm() <= radius, "row leaves the 1/log n ball");
      if (ell > 0)
        c.expect(assemble_omega(f.params(ell)).bottomRightCorner(pure, pure) == o0.bottomRightCorner(pure, pure),
                 "pure-pure block moved");
    }
  }
  c.expect(worst_eta < 1e-10, "eta residual " + num(worst_eta));
  return finish(c, "10 random P, eta residual " + num(worst_eta));
}

// 5. Code families: pairwise l1 distance >= n0/8 and zero column sums.
Outcome code_families() {
  Checks c;
  std::ostringstream summary;
  for (Index n0 : {64, 256})
    for (int cap : {16, 64}) {
      const CodeFamily code = build_code_family(n0, cap, static_cast<std::uint64_t>(n0 + cap));
      const CodeFamilyCheck chk = check_code_family(code);
      const std::string tag = "n0=" + std::to_string(n0) + " J=" + std::to_string(cap);
      c.expect(code.J == cap, tag + ": J = " + std::to_string(code.J));
      c.expect(chk.ok && chk.max_abs_column_sum == 0 && 8 * chk.min_distance >= n0, tag + ": invariants fail");
      Index dmin = n0 * 2;
      for (std::size_t a = 0; a < code.omegas.size(); ++a)
        for (std::size_t b = a + 1; b < code.omegas.size(); ++b) {
          Index d = 0;
          for (Index i = 0; i < n0; ++i)
            d += std::abs(code.omegas[a][static_cast<std::size_t>(i)] - code.omegas[b][static_cast<std::size_t>(i)]);
          dmin = std::min(dmin, d);
        }
      c.expect(dmin == chk.min_distance, tag + ": independent distance disagrees");
      summary << tag << " dmin=" << dmin << " ";
    }
  return finish(c, summary.str());
}

// 6. Loss definitions: worked examples, sandwich inequality, constant-theta identity.
Outcome losses() {
  Checks c;
  auto rows = [](std::vector<std::vector<double>> r) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r[0].size()));
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t k = 0; k < r[i].size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[i][k];
    return MembershipMatrix(m);
  };
  const double h = loss_unweighted(rows({{0.9, 0.1}, {0, 1}, {0.5, 0.5}}), rows({{1, 0}, {0, 1}, {0.5, 0.5}}));
  c.expect(std::fabs(h - 0.2 / 3.0) < 1e-14, "three-node example gives " + num(h));
  const DegreeVector th2(std::vector<double>{1.0, 4.0});
  const double l = loss_weighted(rows({{0.5, 0.5}, {0, 1}}), rows({{1, 0}, {0, 1}}), th2);
  c.expect(std::fabs(l - 0.316228) < 1e-6, "weighted example gives " + num(l));
  const auto [lo2, hi2] = loss_equivalence_bounds(th2);
  c.expect(std::fabs(lo2 - std::sqrt(0.4)) < 1e-15 && std::fabs(hi2 - std::sqrt(1.6)) < 1e-15, "equivalence bounds");

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int K = 2 + t % 4;
    const Index n = 3 + t % 40;
    const MembershipMatrix a = random_pi(n, K, rng), b = random_pi(n, K, rng);
    std::vector<double> tv(static_cast<std::size_t>(n));
    for (auto& x : tv) x = u(rng);
    const DegreeVector theta(tv);
    const auto [lo, hi] = loss_equivalence_bounds(theta);
    const LossReport r = evaluate_loss(a, b, theta);
    c.expect(lo * r.unweighted <= r.weighted * (1 + 1e-12) && r.weighted <= hi * r.unweighted * (1 + 1e-12),
             "sandwich violated at instance " + std::to_string(t));
    const DegreeVector flat(std::vector<double>(static_cast<std::size_t>(n), tv[0]));
    c.expect(loss_weighted(a, b, flat) == loss_unweighted(a, b), "constant theta: L != H at " + std::to_string(t));
  }
  return finish(c, "examples, 1000 sandwich instances, constant-theta identity");
}

// 7. Sampler: empirical frequencies inside the 4-sigma binomial band; determinism.
Outcome sampler() {
  Checks c;
  std::mt19937_64 rng(2);
  const ModelParams params = test::random_params(50, 2, rng);
  const int samples = 10000;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(50, 50);
  for (int s = 0; s < samples; ++s) {
    const SparseGraph g = sample_graph(params, SampleSeed{777, static_cast<std::uint64_t>(s)});
    for (const auto& [i, j] : g.edges()) counts(i, j) += 1.0;
  }
  int inside = 0, pairs = 0;
  for (Index i = 0; i < 50; ++i)
    for (Index j = i + 1; j < 50; ++j) {
      const double p = params.edge_probability(i, j);
      ++pairs;
      if (std::fabs(counts(i, j) / samples - p) <= 4.0 * std::sqrt(p * (1.0 - p) / samples)) ++inside;
    }
  c.expect(inside >= 0.99 * pairs, std::to_string(inside) + "/" + std::to_string(pairs) + " pairs in band");
  c.expect(sample_graph(params, SampleSeed{5, 1}) == sample_graph(params, SampleSeed{5, 1}), "same seed differs");
  c.expect(!(sample_graph(params, SampleSeed{5, 1}) == sample_graph(params, SampleSeed{5, 2})), "streams coincide");
  return finish(c, std::to_string(inside) + "/" + std::to_string(pairs) + " pairs inside the band");
}

ModelParams planted_params(Index n, double theta, const Eigen::MatrixXd& p, double mixed_fraction) {
  return ModelParams(constant_theta(n, theta), planted_memberships(n, static_cast<int>(p.rows()), mixed_fraction),
                     MixingMatrix(p));
}

MembershipMatrix from_pairs(const EigenPairs& pairs, int K) {
  const SpectralEmbedding emb = score_embedding(pairs);
  return estimate_memberships(emb, hunt_vertices(emb, K, 0), pairs.values).pi_hat;
}

// 8. Mixed-SCORE accuracy plus sign and label invariance.
Outcome estimator_accuracy() {
  Checks c;
  const ModelParams params = planted_params(2000, 0.5, Eigen::MatrixXd::Identity(2, 2), 0.4);
  const int seeds = 20;
  double mean_h = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const SparseGraph g = sample_graph(params, SampleSeed{static_cast<std::uint64_t>(500 + s), 0});
    MixedScoreOptions opt;
    opt.seed = static_cast<std::uint64_t>(s);
    mean_h += loss_unweighted(mixed_score(g, 2, opt).estimate.pi_hat, params.pi()) / seeds;
  }
  c.expect(mean_h < 0.05, "mean H " + num(mean_h));

  const SparseGraph g = sample_graph(params, SampleSeed{42, 0});
  const EigenPairs ep = leading_eigenpairs(g, 2);
  const MembershipMatrix base = from_pairs(ep, 2);
  for (int mask = 1; mask < 4; ++mask) {
    EigenPairs flipped = ep;
    for (int k = 0; k < 2; ++k)
      if (mask & (1 << k)) flipped.vectors.col(k) *= -1.0;
    c.expect(from_pairs(flipped, 2).matrix() == base.matrix(), "sign flip changed the estimate");
  }

  // Relabeling the truth leaves the graph and the aligned losses unchanged.
  Eigen::MatrixXd p3(3, 3);
  p3 << 1.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.0;
  const ModelParams t3 = planted_params(900, 0.6, p3, 0.2);
  const std::vector<int> sigma{2, 0, 1};
  Eigen::MatrixXd pi2(900, 3), q(3, 3);
  for (int k = 0; k < 3; ++k) {
    pi2.col(sigma[k]) = t3.pi().matrix().col(k);
    for (int l = 0; l < 3; ++l) q(sigma[k], sigma[l]) = p3(k, l);
  }
  const ModelParams relabeled(t3.theta(), MembershipMatrix(pi2), MixingMatrix(q));
  const SparseGraph g1 = sample_graph(t3, SampleSeed{8, 0});
  c.expect(g1 == sample_graph(relabeled, SampleSeed{8, 0}), "relabeled model samples a different graph");
  const MembershipMatrix hat = mixed_score(g1, 3).estimate.pi_hat;
  const LossReport r1 = evaluate_loss(hat, t3.pi(), t3.theta());
  const LossReport r2 = evaluate_loss(hat, relabeled.pi(), relabeled.theta());
  c.expect(r1.weighted == r2.weighted && r1.unweighted == r2.unweighted, "relabeling changed the loss");
  for (int k = 0; k < 3; ++k)
    c.expect(r2.permutation[static_cast<std::size_t>(sigma[k])] == r1.permutation[static_cast<std::size_t>(k)],
             "alignment does not follow the relabeling");
  return finish(c, "mean H over 20 seeds " + num(mean_h));
}

// 9. Empirical rate: slope of log mean L against log(n theta_bar^2).
Outcome empirical_rate() {
  Checks c;
  SweepConfig cfg;
  cfg.trials = 30;
  cfg.seed = 2024;
  for (Index n : {500, 1000, 2000, 4000}) {
    SweepCell cell;
    cell.n = n;
    cell.theta = theta_profile::Constant{0.5};
    Eigen::MatrixXd p(2, 2);
    p << 1.0, 0.2, 0.2, 1.0;
    cell.P = p;
    cell.mixed_fraction = 0.4;
    cfg.cells.push_back(cell);
  }
  const SweepResult r = run_sweep(cfg, workers());
  c.expect(r.all_valid(), "a cell is invalid");
  c.expect(r.fit.has_value(), "no slope fit");
  if (!r.fit) return finish(c, "");
  c.expect(r.fit->slope >= -0.65 && r.fit->slope <= -0.35, "slope " + num(r.fit->slope));
  std::ostringstream os;
  os << "slope " << num(r.fit->slope) << " +- " << num(r.fit->ci_halfwidth) << ", means";
  for (const auto& cell : r.cells) os << " " << num(cell.mean_weighted);
  return finish(c, os.str());
}

// 10. Constant theta: the separation is the same in L and in H.
Outcome constant_theta_separation() {
  Checks c;
  const HypothesisFamily f2 = build_hypotheses_auto(constant_theta(400, 0.5), two_community(0.5), 0.2, 0.1, 32, 13);
  const HypothesisFamily f3 = build_hypotheses_auto(constant_theta(600, 0.7), three_community(), 0.2, 0.1, 32, 14);
  double worst = 0.0;
  for (const HypothesisFamily* f : {&f2, &f3}) {
    const CertificationReport r = certify(*f, 0.0, kDefaultBetaMax, workers());
    worst = std::max(worst, std::fabs(r.min_pairwise_loss - r.min_pairwise_loss_unweighted));
    for (std::size_t a = 0; a < f->pis.size(); ++a)
      for (std::size_t b = a + 1; b < f->pis.size(); ++b)
        worst = std::max(worst, std::fabs(loss_weighted(f->pis[a], f->pis[b], f->theta) -
                                          loss_unweighted(f->pis[a], f->pis[b])));
  }
  c.expect(worst < 1e-12, "L and H separations differ by " + num(worst));
  return finish(c, "max |L - H| " + num(worst));
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "K=2 Omega closed form and KL oracle", 5, omega_closed_form},
      {2, "separation and KL conditions at J_cap=64", 30, certification},
      {3, "KL blocks and perturbation ratios", 30, kl_blocks_and_ratios},
      {4, "general-K hypotheses", 5, general_k},
      {5, "code families", 10, code_families},
      {6, "loss definitions", 5, losses},
      {7, "sampler frequencies and determinism", 60, sampler},
      {8, "Mixed-SCORE accuracy and invariances", 120, estimator_accuracy},
      {9, "empirical rate slope", 900, empirical_rate},
      {10, "constant-theta separation in L equals H", 30, constant_theta_separation},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && secs > cr.budget_seconds) {
      out.pass = false;
      out.detail += "; over the " + num(cr.budget_seconds) + " s budget";
    }
    if (!out.pass) ++failed;
    std::printf("criterion %2d %s [%.2fs] %s: %s\n", cr.id, out.pass ? "PASS" : "FAIL", secs, cr.name,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
