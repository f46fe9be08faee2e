#pragma once

#include <Eigen/Dense>

#include <random>

#include "dcmm/model.hpp"

namespace dcmm::test {

// theta in [0.2, 1], off-diagonal P in [0, 0.6], random PMF rows (the first
// K rows pure when requested).
inline ModelParams random_params(Index n, int K, std::mt19937_64& rng, bool ensure_pure = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (auto& t : theta) t = 0.2 + 0.8 * u(rng);
  for (;;) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(K, K);
    for (int a = 0; a < K; ++a)
      for (int b = a + 1; b < K; ++b) p(a, b) = p(b, a) = 0.6 * u(rng);
    Eigen::MatrixXd pi(n, K);
    for (Index i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) pi(i, k) = u(rng) + 1e-3;
      pi.row(i) /= pi.row(i).sum();
    }
    if (ensure_pure)
      for (int k = 0; k < K && k < n; ++k) {
        pi.row(k).setZero();
        pi(k, k) = 1.0;
      }
    try {
      return ModelParams(DegreeVector(theta), MembershipMatrix(pi), MixingMatrix(p));
    } catch (const ModelError&) {
      // singular draw of P; try again
    }
  }
}

// Omega(i, j) = sum_k sum_l theta_i pi(i,k) P(k,l) pi(j,l) theta_j, one scalar at a time.
inline Eigen::MatrixXd naive_omega(const ModelParams& params) {
  const Index n = params.n();
  const int K = params.K();
  Eigen::MatrixXd out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) s += params.pi()(i, k) * params.p()(k, l) * params.pi()(j, l);
      out(i, j) = params.theta()[i] * params.theta()[j] * s;
    }
  return out;
}

}  // namespace dcmm::test
