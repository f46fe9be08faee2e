#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace dcmm {

struct KMeansResult {
  Eigen::MatrixXd centers;  // k x d
  std::vector<int> labels;  // one per input row
  double inertia = 0.0;     // sum of squared distances to assigned centers
};

// Lloyd's algorithm with k-means++ seeding; best of `restarts` runs by
// inertia. Rows of `points` are observations. Deterministic given `rng`.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng,
                    int restarts = 10, int max_iter = 200);

}  // namespace dcmm
