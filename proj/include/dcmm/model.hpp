#pragma once

// DCMM parameters: degree heterogeneity theta, membership matrix Pi and the
// K x K mixing matrix P. Edge (i, j) is Bernoulli with probability
// theta_i * theta_j * pi_i' P pi_j; Omega = Theta Pi P Pi' Theta.
//
// Node indices are 0-based throughout the library; only the on-disk edge
// list is 1-based.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcmm {

using Index = std::ptrdiff_t;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Symmetric, nonnegative, unit diagonal, non-singular.
class MixingMatrix {
 public:
  static constexpr double kSingularTol = 1e-10;

  explicit MixingMatrix(Eigen::MatrixXd p, double singular_tol = kSingularTol);

  int K() const { return static_cast<int>(p_.rows()); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  double operator()(int k, int l) const { return p_(k, l); }
  double smallest_singular_value() const { return sigma_min_; }

 private:
  Eigen::MatrixXd p_;
  double sigma_min_ = 0.0;
};

// Strictly positive degree parameters with cached summary statistics.
class DegreeVector {
 public:
  explicit DegreeVector(std::vector<double> theta);

  Index size() const { return static_cast<Index>(theta_.size()); }
  double operator[](Index i) const { return theta_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return theta_; }

  double mean() const { return mean_; }
  double max() const { return sorted_.back(); }
  double min() const { return sorted_.front(); }
  double squared_norm() const { return squared_norm_; }
  // k-th smallest entry, k in 1..n.
  double order_statistic(Index k) const;
  std::span<const double> sorted() const { return sorted_; }

  DegreeVector scaled(double s) const;

 private:
  std::vector<double> theta_;
  std::vector<double> sorted_;
  double mean_ = 0.0;
  double squared_norm_ = 0.0;
};

// n x K matrix whose rows are PMFs. Stored column-major so each community's
// column is contiguous.
class MembershipMatrix {
 public:
  static constexpr double kRowSumTol = 1e-12;
  static constexpr double kPureTol = 1e-9;

  explicit MembershipMatrix(Eigen::MatrixXd rows);

  Index n() const { return rows_.rows(); }
  int K() const { return static_cast<int>(rows_.cols()); }
  const Eigen::MatrixXd& matrix() const { return rows_; }
  double operator()(Index i, int k) const { return rows_(i, k); }
  auto row(Index i) const { return rows_.row(i); }
  const double* column_data(int k) const { return rows_.col(k).data(); }

  // Community of a pure row (max entry >= 1 - kPureTol), if any.
  std::optional<int> pure_label(Index i) const;

  // Uniform rows, or all nodes pure in community 0..K-1 round robin.
  static MembershipMatrix uniform(Index n, int K);

 private:
  Eigen::MatrixXd rows_;
};

class ModelParams {
 public:
  // Validates dimensions and rejects any pair whose edge probability
  // exceeds 1.
  ModelParams(DegreeVector theta, MembershipMatrix pi, MixingMatrix p);

  Index n() const { return theta_.size(); }
  int K() const { return p_.K(); }
  const DegreeVector& theta() const { return theta_; }
  const MembershipMatrix& pi() const { return pi_; }
  const MixingMatrix& p() const { return p_; }

  // theta_i theta_j pi_i' P pi_j for i != j, 0 on the diagonal. Bitwise
  // symmetric in (i, j).
  double edge_probability(Index i, Index j) const;

  // theta_i^2 pi_i' P pi_i (the diagonal of Omega, never an edge).
  double omega_diagonal(Index i) const;

  // Lazy row access: out[j] = edge_probability(i, j).
  void row_probabilities(Index i, std::span<double> out) const;

 private:
  double unchecked_probability(Index lo, Index hi) const;

  DegreeVector theta_;
  MembershipMatrix pi_;
  MixingMatrix p_;
  Eigen::MatrixXd pi_p_;  // Pi * P, n x K
};

inline constexpr Index kDenseOmegaCap = 20000;

// Dense Omega including its diagonal. Throws ModelError above `cap` nodes;
// use ModelParams::row_probabilities instead.
Eigen::MatrixXd assemble_omega(const ModelParams& params, Index cap = kDenseOmegaCap);

struct ThetaClassReport {
  bool member = false;
  double threshold = 0.0;          // log(n) / sqrt(n)
  Index order_index = 0;           // ceil(c K n), 1-based
  double mean_margin = 0.0;        // theta_bar - threshold
  double order_stat_margin = 0.0;  // theta_(ceil(cKn)) - threshold
};

// Degree class: theta_bar >= log(n)/sqrt(n) and theta_(ceil(cKn)) >= log(n)/sqrt(n).
ThetaClassReport check_theta_class(const DegreeVector& theta, int K, double c);

struct PiClassReport {
  bool member = false;
  std::string failing_clause;  // empty when member
  std::vector<Index> pure_counts;
  std::vector<double> pure_mass_fraction;  // sum_{N_k} theta^2 / ||theta||^2
  Index mixed_count = 0;
  int clusters = 0;  // L accepted for the mixed-node partition (0 if M is empty)
  Eigen::MatrixXd cluster_centers;
  double max_cluster_radius = 0.0;
};

struct PiClassOptions {
  std::uint64_t seed = 0x5eed;
  int restarts = 10;
};

// Membership class with up to L0 clusters of mixed nodes. The partition is
// searched by k-means over mixed rows for L = 1..L0. Distances are Euclidean.
PiClassReport check_pi_class(const MembershipMatrix& pi, const DegreeVector& theta, int K,
                             double c, int L0, const PiClassOptions& options = {});

// Subclass used by the packing construction: pure-node clauses plus every
// mixed row within 1/log(n) of the barycenter (1/K) 1_K.
PiClassReport check_pi_star_class(const MembershipMatrix& pi, const DegreeVector& theta, int K,
                                  double c);

}  // namespace dcmm
