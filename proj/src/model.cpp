#include "dcmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dcmm/cluster.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

// Slack for the probability <= 1 check; pi_i' P pi_j accumulates a few ulps.
constexpr double kProbSlack = 1e-12;

std::string fmt_index(const char* what, Index i) {
  std::ostringstream os;
  os << what << " " << i;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// MixingMatrix

MixingMatrix::MixingMatrix(Eigen::MatrixXd p, double singular_tol) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) throw ModelError("mixing matrix must be square");
  if (p_.rows() < 2) throw ModelError("mixing matrix needs K >= 2");
  if (!p_.allFinite()) throw ModelError("mixing matrix has non-finite entries");
  const Eigen::Index K = p_.rows();
  for (Eigen::Index k = 0; k < K; ++k) {
    if (p_(k, k) != 1.0) throw ModelError("mixing matrix must have unit diagonal");
    for (Eigen::Index l = 0; l < K; ++l) {
      if (p_(k, l) < 0.0) throw ModelError("mixing matrix entries must be nonnegative");
      if (std::fabs(p_(k, l) - p_(l, k)) > 1e-12) throw ModelError("mixing matrix must be symmetric");
    }
  }
  p_ = 0.5 * (p_ + p_.transpose()).eval();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p_);
  sigma_min_ = svd.singularValues().minCoeff();
  if (!(sigma_min_ > singular_tol)) throw ModelError("mixing matrix is singular");
}

// ---------------------------------------------------------------------------
// DegreeVector

DegreeVector::DegreeVector(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw ModelError("degree vector is empty");
  for (std::size_t i = 0; i < theta_.size(); ++i)
    if (!(theta_[i] > 0.0) || !std::isfinite(theta_[i]))
      throw ModelError(fmt_index("degree parameter must be positive and finite at node", static_cast<Index>(i)));
  sorted_ = theta_;
  std::sort(sorted_.begin(), sorted_.end());
  if (sorted_.front() == sorted_.back()) {
    mean_ = sorted_.front();  // exact for constant vectors
  } else {
    mean_ = std::accumulate(theta_.begin(), theta_.end(), 0.0) / static_cast<double>(theta_.size());
  }
  squared_norm_ = 0.0;
  for (double t : theta_) squared_norm_ += t * t;
}

double DegreeVector::order_statistic(Index k) const {
  if (k < 1 || k > size()) throw std::out_of_range("order statistic index out of range");
  return sorted_[static_cast<std::size_t>(k - 1)];
}

DegreeVector DegreeVector::scaled(double s) const {
  std::vector<double> out(theta_);
  for (double& t : out) t *= s;
  return DegreeVector(std::move(out));
}

// ---------------------------------------------------------------------------
// MembershipMatrix

MembershipMatrix::MembershipMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) throw ModelError("membership matrix is empty");
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < rows_.cols(); ++k) {
      const double v = rows_(i, k);
      if (!(v >= 0.0 && v <= 1.0)) throw ModelError(fmt_index("membership entry outside [0,1] in row", i));
      s += v;
    }
    if (std::fabs(s - 1.0) > kRowSumTol) throw ModelError(fmt_index("membership row does not sum to 1:", i));
  }
}

std::optional<int> MembershipMatrix::pure_label(Index i) const {
  Eigen::Index k = 0;
  const double m = rows_.row(i).maxCoeff(&k);
  if (m >= 1.0 - kPureTol) return static_cast<int>(k);
  return std::nullopt;
}

MembershipMatrix MembershipMatrix::uniform(Index n, int K) {
  return MembershipMatrix(Eigen::MatrixXd::Constant(n, K, 1.0 / K));
}

// ---------------------------------------------------------------------------
// ModelParams

ModelParams::ModelParams(DegreeVector theta, MembershipMatrix pi, MixingMatrix p)
    : theta_(std::move(theta)), pi_(std::move(pi)), p_(std::move(p)) {
  if (pi_.n() != theta_.size()) throw ModelError("theta and Pi disagree on n");
  if (pi_.K() != p_.K()) throw ModelError("Pi and P disagree on K");
  pi_p_ = pi_.matrix() * p_.matrix();

  const double crude = theta_.max() * theta_.max() * p_.matrix().maxCoeff();
  if (crude <= 1.0) return;
  const Index n = this->n();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double v = unchecked_probability(i, j);
      if (v > 1.0 + kProbSlack) {
        std::ostringstream os;
        os << "edge probability " << v << " > 1 for pair (" << i << ", " << j << ")";
        throw ModelError(os.str());
      }
    }
}

double ModelParams::unchecked_probability(Index lo, Index hi) const {
  double q = 0.0;
  for (int k = 0; k < K(); ++k) q += pi_p_(lo, k) * pi_(hi, k);
  return (theta_[lo] * theta_[hi]) * q;
}

double ModelParams::edge_probability(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n() || j >= n()) throw std::out_of_range("node index out of range");
  if (i == j) return 0.0;
  const double v = i < j ? unchecked_probability(i, j) : unchecked_probability(j, i);
  return std::min(v, 1.0);
}

double ModelParams::omega_diagonal(Index i) const {
  if (i < 0 || i >= n()) throw std::out_of_range("node index out of range");
  return unchecked_probability(i, i);
}

void ModelParams::row_probabilities(Index i, std::span<double> out) const {
  if (static_cast<Index>(out.size()) != n()) throw std::invalid_argument("row buffer has wrong length");
  for (Index j = 0; j < n(); ++j) out[static_cast<std::size_t>(j)] = edge_probability(i, j);
}

Eigen::MatrixXd assemble_omega(const ModelParams& params, Index cap) {
  const Index n = params.n();
  if (n > cap) {
    std::ostringstream os;
    os << "n = " << n << " exceeds the dense Omega cap of " << cap
       << "; use ModelParams::row_probabilities for lazy row access";
    throw ModelError(os.str());
  }
  Eigen::MatrixXd omega(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double v = params.edge_probability(i, j);
      omega(i, j) = v;
      omega(j, i) = v;
    }
    omega(j, j) = params.omega_diagonal(j);
  }
  return omega;
}

// ---------------------------------------------------------------------------
// Class predicates

ThetaClassReport check_theta_class(const DegreeVector& theta, int K, double c) {
  if (K < 2) throw std::invalid_argument("K must be >= 2");
  if (!(c > 0.0 && c < 1.0 / K)) throw std::invalid_argument("c must lie in (0, 1/K)");
  const Index n = theta.size();
  const double nd = static_cast<double>(n);
  ThetaClassReport r;
  r.threshold = std::log(nd) / std::sqrt(nd);
  const double pos = c * K * nd;
  r.order_index = std::clamp<Index>(static_cast<Index>(std::ceil(pos - 1e-9 * std::max(1.0, pos))), 1, n);
  r.mean_margin = theta.mean() - r.threshold;
  r.order_stat_margin = theta.order_statistic(r.order_index) - r.threshold;
  r.member = r.mean_margin >= 0.0 && r.order_stat_margin >= 0.0;
  return r;
}

namespace {

// Pure-node count and mass clauses shared by both membership classes.
// Returns the mixed-node indices, or nullopt after filling the failing clause.
std::optional<std::vector<Index>> pure_clauses(const MembershipMatrix& pi, const DegreeVector& theta,
                                               int K, double c, PiClassReport& r) {
  if (pi.n() != theta.size()) throw std::invalid_argument("Pi and theta disagree on n");
  if (pi.K() != K) throw std::invalid_argument("Pi does not have K columns");
  const Index n = pi.n();
  r.pure_counts.assign(static_cast<std::size_t>(K), 0);
  std::vector<double> mass(static_cast<std::size_t>(K), 0.0);
  std::vector<Index> mixed;
  for (Index i = 0; i < n; ++i) {
    if (auto k = pi.pure_label(i)) {
      ++r.pure_counts[static_cast<std::size_t>(*k)];
      mass[static_cast<std::size_t>(*k)] += theta[i] * theta[i];
    } else {
      mixed.push_back(i);
    }
  }
  r.mixed_count = static_cast<Index>(mixed.size());
  r.pure_mass_fraction.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k)
    r.pure_mass_fraction[static_cast<std::size_t>(k)] = mass[static_cast<std::size_t>(k)] / theta.squared_norm();

  const double cn = c * static_cast<double>(n);
  for (int k = 0; k < K; ++k) {
    if (static_cast<double>(r.pure_counts[static_cast<std::size_t>(k)]) + 1e-9 * std::max(1.0, cn) < cn) {
      r.failing_clause = "pure-node count: |N_" + std::to_string(k + 1) + "| = " +
                         std::to_string(r.pure_counts[static_cast<std::size_t>(k)]) + " < c n";
      return std::nullopt;
    }
  }
  for (int k = 0; k < K; ++k) {
    if (r.pure_mass_fraction[static_cast<std::size_t>(k)] < c * (1.0 - 1e-12)) {
      r.failing_clause = "pure-node mass: sum of theta^2 over N_" + std::to_string(k + 1) + " < c ||theta||^2";
      return std::nullopt;
    }
  }
  return mixed;
}

}  // namespace

PiClassReport check_pi_class(const MembershipMatrix& pi, const DegreeVector& theta, int K, double c,
                             int L0, const PiClassOptions& options) {
  if (L0 < 1) throw std::invalid_argument("L0 must be >= 1");
  PiClassReport r;
  auto mixed = pure_clauses(pi, theta, K, c, r);
  if (!mixed) return r;
  if (mixed->empty()) {
    r.member = true;
    return r;
  }

  const Index n = pi.n();
  const double logn = std::log(static_cast<double>(n));
  const double m = static_cast<double>(mixed->size());
  if (c * m < std::pow(logn, 3) / (theta.mean() * theta.mean())) {
    r.failing_clause = "mixed-node size: c|M| < log^3(n) / theta_bar^2";
    return r;
  }

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(mixed->size()), K);
  for (std::size_t t = 0; t < mixed->size(); ++t) rows.row(static_cast<Eigen::Index>(t)) = pi.row((*mixed)[t]);

  const double radius_cap = 1.0 / logn;
  std::mt19937_64 rng = make_engine(SampleSeed{options.seed, 0}, 0xC1A55);
  std::string last_reason;
  for (int L = 1; L <= L0 && L <= static_cast<int>(mixed->size()); ++L) {
    KMeansResult km = kmeans(rows, L, rng, options.restarts);
    std::vector<Index> sizes(static_cast<std::size_t>(L), 0);
    std::vector<double> radius(static_cast<std::size_t>(L), 0.0);
    for (Eigen::Index t = 0; t < rows.rows(); ++t) {
      const int l = km.labels[static_cast<std::size_t>(t)];
      ++sizes[static_cast<std::size_t>(l)];
      radius[static_cast<std::size_t>(l)] =
          std::max(radius[static_cast<std::size_t>(l)], (rows.row(t) - km.centers.row(l)).norm());
    }
    bool ok = true;
    for (int a = 0; a < L && ok; ++a)
      for (int b = a + 1; b < L && ok; ++b)
        if ((km.centers.row(a) - km.centers.row(b)).norm() < c) {
          ok = false;
          last_reason = "cluster centers closer than c";
        }
    for (int a = 0; a < L && ok; ++a)
      for (int k = 0; k < K && ok; ++k) {
        Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(K);
        e[k] = 1.0;
        if ((km.centers.row(a) - e).norm() < c) {
          ok = false;
          last_reason = "cluster center within c of a pure vertex";
        }
      }
    for (int a = 0; a < L && ok; ++a) {
      if (static_cast<double>(sizes[static_cast<std::size_t>(a)]) < c * m) {
        ok = false;
        last_reason = "cluster smaller than c|M|";
      } else if (radius[static_cast<std::size_t>(a)] > radius_cap) {
        ok = false;
        last_reason = "cluster radius exceeds 1/log(n)";
      }
    }
    if (ok) {
      r.member = true;
      r.clusters = L;
      r.cluster_centers = km.centers;
      r.max_cluster_radius = *std::max_element(radius.begin(), radius.end());
      return r;
    }
  }
  r.failing_clause = "mixed-node partition: no L <= L0 satisfies all clauses (last: " + last_reason + ")";
  return r;
}

PiClassReport check_pi_star_class(const MembershipMatrix& pi, const DegreeVector& theta, int K, double c) {
  PiClassReport r;
  auto mixed = pure_clauses(pi, theta, K, c, r);
  if (!mixed) return r;
  const double cap = 1.0 / std::log(static_cast<double>(pi.n()));
  const Eigen::RowVectorXd bary = Eigen::RowVectorXd::Constant(K, 1.0 / K);
  for (Index i : *mixed) {
    const double d = (pi.row(i) - bary).norm();
    r.max_cluster_radius = std::max(r.max_cluster_radius, d);
    if (d > cap * (1.0 + 1e-12)) {
      r.failing_clause = fmt_index("mixed-node radius: row farther than 1/log(n) from the barycenter at node", i);
      return r;
    }
  }
  r.clusters = mixed->empty() ? 0 : 1;
  if (!mixed->empty()) r.cluster_centers = bary;
  r.member = true;
  return r;
}

}  // namespace dcmm
