#pragma once

// Mixed-SCORE: leading eigenvectors of A, entrywise ratios against the first
// eigenvector, simplex vertex hunting in ratio space, barycentric
// coordinates, and de-normalization back to memberships.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dcmm/model.hpp"
#include "dcmm/sampler.hpp"

namespace dcmm {

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const Eigen::VectorXd& residuals() const { return residuals_; }

 private:
  Eigen::VectorXd residuals_;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EigenMethod { automatic, lanczos, dense };

struct EigenOptions {
  double tol = 1e-10;        // residual bound relative to ||A||
  int max_basis = 600;       // Krylov basis cap
  Index dense_cutoff = 2000; // automatic: dense retry when Lanczos fails and n <= cutoff
  EigenMethod method = EigenMethod::automatic;
  int norm_iterations = 100; // power iterations for the ||A|| estimate
};

struct EigenPairs {
  Eigen::VectorXd values;     // sorted by |lambda| descending
  Eigen::MatrixXd vectors;    // n x K, orthonormal columns
  Eigen::VectorXd residuals;  // ||A v - lambda v||
  double operator_norm = 0.0; // power-iteration estimate of ||A||
  EigenMethod method_used = EigenMethod::automatic;
  int iterations = 0;         // Lanczos steps (0 for dense)
};

// ||A|| by power iteration on A.
double estimate_operator_norm(const SparseGraph& graph, int iterations = 100);

// K eigenpairs of largest |lambda|. Throws ConvergenceError if the residual
// contract ||A v - lambda v|| <= tol ||A|| is not met within max_basis steps.
EigenPairs leading_eigenpairs(const SparseGraph& graph, int K, const EigenOptions& options = {});

struct SpectralEmbedding {
  Eigen::VectorXd xi1;             // sign-fixed: sum of entries > 0
  Eigen::MatrixXd ratios;          // retained x (K-1): xi_{k+1}(i) / xi_1(i)
  std::vector<Index> retained;     // row r of `ratios` is node retained[r]
  std::vector<Index> dropped;
  Eigen::VectorXd eigenvalues;     // as passed in
  Index n() const { return xi1.size(); }
  int K() const { return static_cast<int>(eigenvalues.size()); }
};

struct EmbeddingOptions {
  double drop_quantile = 0.01;  // quantile of |xi_1| used by the drop rule
  double safety_factor = 0.1;   // drop when |xi_1(i)| < max(1e-12, safety * quantile)
};

SpectralEmbedding score_embedding(const EigenPairs& pairs, const EmbeddingOptions& options = {});

struct SimplexVertices {
  Eigen::MatrixXd points;                 // K x (K-1)
  double max_negative_coordinate = 0.0;   // most negative barycentric weight over retained rows
  bool used_kmeans_fallback = false;
};

// Successive projection on the lifted rows [1, R_i], refined by one Lloyd
// step over the points nearest each vertex within a quarter of the closest
// vertex separation. Vertices are ordered lexicographically in a
// sign-canonical frame so eigenvector sign flips do not reorder them.
SimplexVertices hunt_vertices(const SpectralEmbedding& embedding, int K, std::uint64_t seed);

// Barycentric weights of each ratio row with respect to the vertices (rows of
// the result are the weights, K columns; they sum to 1).
Eigen::MatrixXd barycentric_weights(const Eigen::MatrixXd& ratios, const Eigen::MatrixXd& vertices);

struct MembershipEstimate {
  MembershipMatrix pi_hat = MembershipMatrix::uniform(1, 2);
  std::vector<bool> flagged;           // dropped nodes (uniform rows)
  Eigen::VectorXd vertex_scales;       // b_1(k), first-eigenvector scale per vertex
  double max_negative_coordinate = 0.0;
  Index dropped_count = 0;
};

MembershipEstimate estimate_memberships(const SpectralEmbedding& embedding, const SimplexVertices& vertices,
                                        const Eigen::VectorXd& eigenvalues);

struct MixedScoreOptions {
  EigenOptions eigen;
  EmbeddingOptions embedding;
  std::uint64_t seed = 0;
};

struct MixedScoreResult {
  MembershipEstimate estimate;
  EigenPairs eigen;
  SimplexVertices vertices;
};

MixedScoreResult mixed_score(const SparseGraph& graph, int K, const MixedScoreOptions& options = {});

}  // namespace dcmm
