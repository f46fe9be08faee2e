#pragma once

// Average l1 membership errors:
//   H(Pi_hat, Pi) = n^-1 sum_i ||pi_hat_i - pi_i||_1
//   L(Pi_hat, Pi) = n^-1 sum_i (theta_i / theta_bar)^(1/2) ||pi_hat_i - pi_i||_1
// Community labels are exchangeable, so the aligned versions minimize over
// column permutations of Pi_hat.

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "dcmm/model.hpp"

namespace dcmm {

struct LossReport {
  double unweighted = 0.0;
  double weighted = 0.0;
  // Column k of Pi is matched with column permutation[k] of Pi_hat.
  std::vector<int> permutation;
  // Set when another permutation gives a smaller unweighted loss; the value
  // is that smaller loss.
  std::optional<double> lower_unweighted;
  std::optional<Eigen::VectorXd> per_node;
};

// Permutations are enumerated exhaustively up to this K; Hungarian assignment beyond.
inline constexpr int kExhaustiveAlignmentMaxK = 8;

double loss_unweighted(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, bool align = true);
double loss_weighted(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, const DegreeVector& theta,
                     bool align = true);

// Both losses under the permutation minimizing the weighted loss.
LossReport evaluate_loss(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, const DegreeVector& theta,
                         bool per_node = false);

// (min_i (theta_i/theta_bar)^(1/2), max_i (theta_i/theta_bar)^(1/2)):
// lower * H <= L <= upper * H under a shared permutation.
std::pair<double, double> loss_equivalence_bounds(const DegreeVector& theta);

// K x K cost(k, l) = sum_i w_i |pi(i, k) - pi_hat(i, l)|.
Eigen::MatrixXd column_costs(const MembershipMatrix& pi_hat, const MembershipMatrix& pi,
                             const std::vector<double>& weights);

// Permutation minimizing sum_k cost(k, perm[k]). Exhaustive (first minimum
// in lexicographic order) up to kExhaustiveAlignmentMaxK, Hungarian beyond.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace dcmm
