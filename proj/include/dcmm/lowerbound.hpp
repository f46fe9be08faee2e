#pragma once

// Packing construction for the minimax lower bound and numerical
// certification of the two conditions of the Tsybakov-style lemma:
//   (i)  L(Pi^(j), Pi^(k)) >= 2 C0 s_n for all j != k, s_n = (n theta_bar^2)^(-1/2)
//   (ii) (J+1)^-1 sum_l KL(P_l, P_0) <= beta log J, beta < 1/8
// Hypotheses: theta sorted descending, the first n0 nodes sit at the
// barycenter perturbed along eta by omega_i delta_n / sqrt(theta_i), the
// remaining K * n1 nodes are pure.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcmm/model.hpp"

namespace dcmm {

// A construction parameter (c0, c, n) does not admit a valid family.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The greedy packing found too few base words.
class PackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// KL divergence is infinite: a reference probability in {0, 1} differs from
// the compared one.
class InfiniteKLError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Words omega^(0..J) in {-1,0,1}^n0 with omega^(0) = 0 and
// omega^(2l-1) = +w_l, omega^(2l) = -w_l for greedy binary base words w_l.
struct CodeFamily {
  Index n0 = 0;
  int J = 0;
  std::vector<std::vector<std::int8_t>> omegas;  // J + 1 words

  int base_words() const { return J / 2; }
};

struct CodeFamilyCheck {
  Index min_distance = 0;        // over distinct pairs
  Index max_abs_column_sum = 0;  // over coordinates
  bool ok = false;               // min_distance >= n0/8 and all column sums 0
};

inline constexpr int kDefaultJCap = 256;

// Greedy random packing of {0,1}^n0 at l1 distance >= n0/8 (from each other
// and from 0), J_cap/2 base words within 200 * J_cap draws. Verified by an
// exhaustive pairwise check before return.
CodeFamily build_code_family(Index n0, int J_cap, std::uint64_t seed);

// O(J^2 n0) brute-force check of the packing invariants.
CodeFamilyCheck check_code_family(const CodeFamily& code);

// Unit vector with eta' 1 = 0 and eta' (11' - P) 1 = 0, from the SVD null
// space of the 2 x K constraint matrix. Sign fixed so the first entry of
// magnitude > 1e-12 is positive.
Eigen::VectorXd find_eta(const MixingMatrix& p);

struct HypothesisFamily {
  DegreeVector theta = DegreeVector({1.0});  // sorted descending
  std::vector<Index> order;                  // order[r] = original index of sorted node r
  MixingMatrix p = MixingMatrix(Eigen::MatrixXd::Identity(2, 2));
  int K = 2;
  double c = 0.0;
  double c0 = 0.0;
  double delta_n = 0.0;  // c0 (n theta_bar)^(-1/2)
  Index n0 = 0;
  Index n1 = 0;
  double a = 0.0;        // 1 - P12 (K = 2 only)
  Eigen::VectorXd eta;   // (1/2, -1/2) for K = 2, unit null vector otherwise
  CodeFamily code;
  std::vector<MembershipMatrix> pis;  // in sorted node order
  bool in_star_class = false;         // every Pi^(l) passes check_pi_star_class
  std::string star_class_failure;     // first failing clause otherwise

  Index n() const { return theta.size(); }
  int J() const { return code.J; }
  ModelParams params(int ell) const;
  // Pi^(ell) with rows permuted back to the caller's node order.
  MembershipMatrix pi_original_order(int ell) const;
};

// Requires theta in the degree class for (K, c) (std::invalid_argument
// otherwise) and n0 = n - K floor(c n) >= 16. Throws ConstructionError
// if some row leaves the simplex or the 1/log(n) ball around the
// barycenter; a smaller c0 fixes both.
HypothesisFamily build_hypotheses(const DegreeVector& theta, const MixingMatrix& p, double c, double c0,
                                  int J_cap, std::uint64_t seed);

// Halves c0 until build_hypotheses succeeds (at most `max_halvings` times).
HypothesisFamily build_hypotheses_auto(const DegreeVector& theta, const MixingMatrix& p, double c, double c0,
                                       int J_cap, std::uint64_t seed, int max_halvings = 40);

enum class KLMode { exact, leading_term };

// Sum over i < j of the Bernoulli KL(p_a || p_b) (exact) or of
// p_a log(p_a / p_b) only (leading_term).
double kl_between(const ModelParams& a, const ModelParams& b, KLMode mode);

struct CertificationReport {
  int J = 0;
  double s_n = 0.0;
  double min_pairwise_loss = 0.0;            // weighted, aligned
  double separation_constant = 0.0;          // min_pairwise_loss / s_n
  double min_pairwise_loss_unweighted = 0.0; // aligned
  double avg_kl_exact = 0.0;
  double avg_kl_leading = 0.0;
  double log_J = 0.0;
  double beta_effective = 0.0;  // avg_kl_exact / log J
  double C0 = 0.0;
  double beta_max = 0.0;
  bool passes_separation = false;  // min_pairwise_loss >= 2 C0 s_n
  bool passes_kl = false;          // beta_effective < beta_max
  double lemma_bound = 0.0;        // at beta = beta_effective
};

inline constexpr double kDefaultBetaMax = 0.125;

CertificationReport certify(const HypothesisFamily& family, double C0, double beta_max = kDefaultBetaMax,
                            int workers = 1);

// (sqrt(J)/(1+sqrt(J))) (1 - 2 beta - sqrt(2 beta / log J))
double lemma_bound(int J, double beta);

// Leading-term KL of family member ell against member 0, split by node block.
struct KLDecomposition {
  double I = 0.0;    // both endpoints among the first n0 nodes
  double II = 0.0;   // one endpoint mixed, the other pure
  double II1 = 0.0;  // sum over mixed-pure pairs of Omega0 * Dt   (= Omega_l - Omega0)
  double II2 = 0.0;  // sum over mixed-pure pairs of Omega0 * Dt^2
};

KLDecomposition kl_decomposition(const HypothesisFamily& family, int ell);

struct KLDecompositionAverage {
  KLDecomposition mean;  // averaged over ell = 0..J
  double I_bound = 0.0;  // 2 |eta' Pc eta| delta^2 (sum_{i<=n0} sqrt(theta_i))^2
  double II2_bound = 0.0; // n0 delta^2 (sum_{j>n0} theta_j) max_k (eta' Pc e_k)^2 / (1 - b_k)
};

KLDecompositionAverage kl_decomposition_average(const HypothesisFamily& family);

// Closed-form relative perturbations Omega^(l)_ij / Omega^(0)_ij - 1:
// mixed-mixed pairs (i, j < n0) and mixed-pure pairs (i < n0, j pure in
// community k), in sorted node indices.
double delta_mixed(const HypothesisFamily& family, int ell, Index i, Index j);
double delta_mixed_pure(const HypothesisFamily& family, int ell, Index i, int k);

}  // namespace dcmm
