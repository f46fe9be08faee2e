#include "dcmm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "dcmm/kernels.hpp"

namespace dcmm {

// ---------------------------------------------------------------------------
// SparseGraph

SparseGraph SparseGraph::from_edges(Index n, std::vector<Edge> edges) {
  if (n < 0 || n > static_cast<Index>(std::numeric_limits<std::int32_t>::max()))
    throw std::invalid_argument("graph size out of range");
  for (auto& e : edges) {
    if (e.first == e.second) throw std::invalid_argument("self-loop at node " + std::to_string(e.first));
    if (static_cast<Index>(std::max(e.first, e.second)) >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  if (!std::is_sorted(edges.begin(), edges.end())) std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");

  SparseGraph g;
  g.n_ = n;
  g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [a, b] : edges) {
    ++g.row_ptr_[a + 1];
    ++g.row_ptr_[b + 1];
  }
  std::partial_sum(g.row_ptr_.begin(), g.row_ptr_.end(), g.row_ptr_.begin());
  g.cols_.resize(2 * edges.size());
  std::vector<std::uint64_t> fill(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
  // Lexicographic edge order leaves every row's neighbor list sorted.
  for (const auto& [a, b] : edges) g.cols_[fill[b]++] = a;
  for (const auto& [a, b] : edges) g.cols_[fill[a]++] = b;
  for (Index i = 0; i < n; ++i)
    std::sort(g.cols_.begin() + static_cast<std::ptrdiff_t>(g.row_ptr_[i]),
              g.cols_.begin() + static_cast<std::ptrdiff_t>(g.row_ptr_[i + 1]));
  g.edges_ = std::move(edges);
  return g;
}

void SparseGraph::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != n_ || static_cast<Index>(y.size()) != n_)
    throw std::invalid_argument("matvec dimension mismatch");
  kernels::active().adjacency_matvec(row_ptr_.data(), cols_.data(), static_cast<std::size_t>(n_), x.data(),
                                     y.data());
}

// ---------------------------------------------------------------------------
// Sampling

SparseGraph sample_graph(const ModelParams& params, const SampleSeed& seed, Index node_cap) {
  const Index n = params.n();
  if (n > node_cap)
    throw ModelError("n = " + std::to_string(n) + " exceeds the exact sampler cap of " + std::to_string(node_cap));
  std::vector<SparseGraph::Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double p = params.edge_probability(i, j);
      if (p > 0.0 && counter_uniform(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) < p)
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  return SparseGraph::from_edges(n, std::move(edges));
}

namespace {

struct ProfileDraw {
  Index n;
  const SampleSeed& seed;

  std::vector<double> operator()(const theta_profile::Constant& p) const {
    if (!(p.value > 0.0)) throw ModelError("constant profile needs a positive value");
    return std::vector<double>(static_cast<std::size_t>(n), p.value);
  }

  std::vector<double> operator()(const theta_profile::Pareto& p) const {
    if (!(p.alpha > 0.0) || !(p.floor > 0.0) || !(p.cap > 0.0))
      throw ModelError("pareto profile needs positive alpha, floor and cap");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      // 1 - U lies in (0, 1], so the power is finite.
      const double u = 1.0 - counter_uniform(seed, static_cast<std::uint64_t>(i), 0x9a7e70ULL);
      out[static_cast<std::size_t>(i)] = std::min(p.cap, p.floor * std::pow(u, -1.0 / p.alpha));
    }
    return out;
  }

  std::vector<double> operator()(const theta_profile::TwoLevel& p) const {
    if (!(p.frac >= 0.0 && p.frac <= 1.0) || !(p.low > 0.0) || !(p.high > 0.0))
      throw ModelError("two-level profile needs frac in [0,1] and positive levels");
    const auto lows = static_cast<Index>(std::floor(p.frac * static_cast<double>(n)));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng = make_engine(seed, 0x2E7E1ULL);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> out(static_cast<std::size_t>(n), p.high);
    for (Index t = 0; t < lows; ++t) out[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = p.low;
    return out;
  }
};

}  // namespace

DegreeVector generate_theta(Index n, const ThetaProfile& profile, const SampleSeed& seed,
                            std::optional<double> target_mean) {
  if (n < 1) throw ModelError("generate_theta needs n >= 1");
  std::vector<double> theta = std::visit(ProfileDraw{n, seed}, profile);
  if (target_mean) {
    if (!(*target_mean > 0.0)) throw ModelError("target mean must be positive");
    const DegreeVector raw(theta);
    const double s = *target_mean / raw.mean();
    for (double& t : theta) t *= s;
    if (raw.min() == raw.max()) std::fill(theta.begin(), theta.end(), *target_mean);
  }
  return DegreeVector(std::move(theta));
}

// ---------------------------------------------------------------------------
// Edge-list I/O

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void write_edge_list(const SparseGraph& graph, std::ostream& out) {
  out << "n " << graph.n() << '\n';
  for (const auto& [a, b] : graph.edges()) out << (a + 1) << ' ' << (b + 1) << '\n';
}

void write_edge_list(const SparseGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_edge_list(graph, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

bool parse_int(std::istringstream& is, long long& v) {
  is >> v;
  return static_cast<bool>(is);
}

bool at_end(std::istringstream& is) {
  is >> std::ws;
  return is.eof();
}

}  // namespace

SparseGraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long long n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag != "n" || !parse_int(is, n) || n < 0 || !at_end(is))
      throw ParseError(lineno, "expected header 'n <nodes>'");
    break;
  }
  if (n < 0) throw ParseError(lineno, "missing header 'n <nodes>'");

  std::vector<SparseGraph::Edge> edges;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream is(line);
    long long a = 0, b = 0;
    if (!parse_int(is, a) || !parse_int(is, b) || !at_end(is)) throw ParseError(lineno, "malformed edge line");
    if (a < 1 || b < 1 || a > n || b > n) throw ParseError(lineno, "node index out of range");
    if (a == b) throw ParseError(lineno, "self-loop");
    if (a > b) std::swap(a, b);
    edges.emplace_back(static_cast<std::uint32_t>(a - 1), static_cast<std::uint32_t>(b - 1));
    lines.push_back(lineno);
  }

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return edges[x] < edges[y]; });
  for (std::size_t t = 1; t < order.size(); ++t)
    if (edges[order[t]] == edges[order[t - 1]])
      throw ParseError(std::max(lines[order[t]], lines[order[t - 1]]), "duplicate edge");
  return SparseGraph::from_edges(static_cast<Index>(n), std::move(edges));
}

SparseGraph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_edge_list(in);
}

}  // namespace dcmm
