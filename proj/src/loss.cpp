#include "dcmm/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dcmm/kernels.hpp"

namespace dcmm {
namespace {

void check_dims(const MembershipMatrix& a, const MembershipMatrix& b) {
  if (a.n() != b.n() || a.K() != b.K()) throw std::invalid_argument("membership matrices differ in shape");
}

std::vector<double> degree_weights(const DegreeVector& theta, Index n) {
  if (theta.size() != n) throw std::invalid_argument("theta length does not match n");
  std::vector<double> w(static_cast<std::size_t>(n));
  const double bar = theta.mean();
  for (Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = std::sqrt(theta[i] / bar);
  return w;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& perm) {
  double s = 0.0;
  for (std::size_t k = 0; k < perm.size(); ++k) s += cost(static_cast<Eigen::Index>(k), perm[k]);
  return s;
}

// Hungarian algorithm (shortest augmenting path, potentials), O(K^3).
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int K = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(K + 1, 0.0), v(K + 1, 0.0);
  std::vector<int> p(K + 1, 0), way(K + 1, 0);
  for (int i = 1; i <= K; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(K + 1, inf);
    std::vector<char> used(K + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= K; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= K; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> perm(K);
  for (int j = 1; j <= K; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

double aligned_or_identity(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, const std::vector<double>& w,
                           bool align) {
  const Eigen::MatrixXd cost = column_costs(pi_hat, pi, w);
  std::vector<int> perm(static_cast<std::size_t>(pi.K()));
  std::iota(perm.begin(), perm.end(), 0);
  if (align) perm = min_cost_assignment(cost);
  return assignment_cost(cost, perm) / static_cast<double>(pi.n());
}

}  // namespace

Eigen::MatrixXd column_costs(const MembershipMatrix& pi_hat, const MembershipMatrix& pi,
                             const std::vector<double>& weights) {
  check_dims(pi_hat, pi);
  const auto n = static_cast<std::size_t>(pi.n());
  if (weights.size() != n) throw std::invalid_argument("weight vector has wrong length");
  const auto& kern = kernels::active();
  const int K = pi.K();
  Eigen::MatrixXd cost(K, K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l)
      cost(k, l) = kern.weighted_l1(weights.data(), pi.column_data(k), pi_hat.column_data(l), n);
  return cost;
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int K = static_cast<int>(cost.rows());
  if (cost.cols() != K) throw std::invalid_argument("cost matrix must be square");
  if (K > kExhaustiveAlignmentMaxK) return hungarian(cost);
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = assignment_cost(cost, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double c = assignment_cost(cost, perm);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  }
  return best;
}

double loss_unweighted(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, bool align) {
  check_dims(pi_hat, pi);
  return aligned_or_identity(pi_hat, pi, std::vector<double>(static_cast<std::size_t>(pi.n()), 1.0), align);
}

double loss_weighted(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, const DegreeVector& theta,
                     bool align) {
  check_dims(pi_hat, pi);
  return aligned_or_identity(pi_hat, pi, degree_weights(theta, pi.n()), align);
}

LossReport evaluate_loss(const MembershipMatrix& pi_hat, const MembershipMatrix& pi, const DegreeVector& theta,
                         bool per_node) {
  check_dims(pi_hat, pi);
  const Index n = pi.n();
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd wcost = column_costs(pi_hat, pi, degree_weights(theta, n));
  const Eigen::MatrixXd ucost = column_costs(pi_hat, pi, std::vector<double>(static_cast<std::size_t>(n), 1.0));

  LossReport r;
  r.permutation = min_cost_assignment(wcost);
  r.weighted = assignment_cost(wcost, r.permutation) / nd;
  r.unweighted = assignment_cost(ucost, r.permutation) / nd;
  const double best_u = assignment_cost(ucost, min_cost_assignment(ucost)) / nd;
  if (best_u < r.unweighted) r.lower_unweighted = best_u;

  if (per_node) {
    Eigen::VectorXd e(n);
    for (Index i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < pi.K(); ++k) s += std::fabs(pi_hat(i, r.permutation[static_cast<std::size_t>(k)]) - pi(i, k));
      e[i] = s;
    }
    r.per_node = std::move(e);
  }
  return r;
}

std::pair<double, double> loss_equivalence_bounds(const DegreeVector& theta) {
  return {std::sqrt(theta.min() / theta.mean()), std::sqrt(theta.max() / theta.mean())};
}

}  // namespace dcmm
