#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "dcmm/model.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {

// Undirected simple graph in CSR form. Immutable once built.
class SparseGraph {
 public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (i, j) with i < j

  SparseGraph() = default;

  // Throws std::invalid_argument on self-loops, duplicates or out-of-range
  // endpoints. Edge orientation is normalized to i < j.
  static SparseGraph from_edges(Index n, std::vector<Edge> edges);

  Index n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  Index degree(Index i) const { return static_cast<Index>(row_ptr_[i + 1] - row_ptr_[i]); }
  std::span<const std::uint32_t> neighbors(Index i) const {
    return {cols_.data() + row_ptr_[i], static_cast<std::size_t>(degree(i))};
  }
  // Sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  const std::vector<std::uint64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& cols() const { return cols_; }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;

  friend bool operator==(const SparseGraph& a, const SparseGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
};

inline constexpr Index kSamplerNodeCap = 30000;

// Independent Bernoulli(edge_probability(i, j)) coin for every pair i < j,
// keyed by (seed, i, j).
SparseGraph sample_graph(const ModelParams& params, const SampleSeed& seed,
                         Index node_cap = kSamplerNodeCap);

namespace theta_profile {
struct Constant {
  double value = 1.0;
};
// theta = floor * U^(-1/alpha), truncated at `cap`.
struct Pareto {
  double alpha = 2.0;
  double floor = 0.05;
  double cap = std::numeric_limits<double>::infinity();
};
// floor(frac * n) entries at `low` (positions chosen by the seed), the rest at `high`.
struct TwoLevel {
  double frac = 0.5;
  double low = 0.1;
  double high = 0.9;
};
}  // namespace theta_profile

using ThetaProfile = std::variant<theta_profile::Constant, theta_profile::Pareto, theta_profile::TwoLevel>;

// Optionally rescaled so the mean equals `target_mean`.
DegreeVector generate_theta(Index n, const ThetaProfile& profile, const SampleSeed& seed,
                            std::optional<double> target_mean = std::nullopt);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// "n <n>" header, then "i j" per edge, 1-based, i < j, sorted.
void write_edge_list(const SparseGraph& graph, std::ostream& out);
void write_edge_list(const SparseGraph& graph, const std::filesystem::path& path);
SparseGraph read_edge_list(std::istream& in);
SparseGraph read_edge_list(const std::filesystem::path& path);

}  // namespace dcmm
