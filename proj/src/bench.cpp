#include "dcmm/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dcmm/json_io.hpp"
#include "dcmm/loss.hpp"
#include "dcmm/parallel.hpp"
#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

constexpr std::uint64_t kThetaPurpose = 0x7E7A;
constexpr std::uint64_t kTrialPurpose = 0x7121A1;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Json cell_to_json(const SweepCell& c) {
  Json j{{"n", c.n}, {"theta", theta_profile_to_json(c.theta)}, {"P", matrix_to_json(c.P)},
         {"mixed_fraction", c.mixed_fraction}};
  if (c.target_mean) j["target_mean"] = *c.target_mean;
  if (c.mixed_row) j["mixed_row"] = std::vector<double>(c.mixed_row->data(), c.mixed_row->data() + c.mixed_row->size());
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

SweepCell cell_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("cell must be an object");
  SweepCell c;
  if (!j.contains("n") || !j.at("n").is_number_integer()) throw FormatError("cell needs an integer \"n\"");
  c.n = j.at("n").get<Index>();
  if (!j.contains("theta")) throw FormatError("cell needs \"theta\"");
  c.theta = theta_profile_from_json(j.at("theta"));
  if (!j.contains("P")) throw FormatError("cell needs \"P\"");
  c.P = matrix_from_json(j.at("P"), "P");
  if (j.contains("target_mean")) c.target_mean = j.at("target_mean").get<double>();
  if (j.contains("mixed_fraction")) c.mixed_fraction = j.at("mixed_fraction").get<double>();
  if (j.contains("mixed_row")) {
    const auto v = j.at("mixed_row").get<std::vector<double>>();
    c.mixed_row = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::vector<Json> values_or(const Json& grid, const char* key, Json fallback) {
  if (!grid.contains(key)) return {std::move(fallback)};
  const Json& v = grid.at(key);
  if (!v.is_array() || v.empty()) throw FormatError(std::string("grid \"") + key + "\" must be a non-empty array");
  return {v.begin(), v.end()};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(line, "bad number \"" + s + "\"");
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(line, "bad integer \"" + s + "\"");
  return v;
}

struct PreparedCell {
  SweepCell sc;
  SampleSeed root;
  std::optional<ModelParams> params;
  CellSummary summary;
};

}  // namespace

SweepConfig sweep_config_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("sweep config must be an object");
  SweepConfig cfg;
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("c")) cfg.c = j.at("c").get<double>();
  if (j.contains("scope_ratio")) cfg.scope_ratio = j.at("scope_ratio").get<double>();
  if (j.contains("oracle_estimator")) cfg.oracle_estimator = j.at("oracle_estimator").get<bool>();
  if (j.contains("estimator")) {
    const Json& e = j.at("estimator");
    auto& o = cfg.estimator;
    if (e.contains("tol")) o.eigen.tol = e.at("tol").get<double>();
    if (e.contains("max_basis")) o.eigen.max_basis = e.at("max_basis").get<int>();
    if (e.contains("dense_cutoff")) o.eigen.dense_cutoff = e.at("dense_cutoff").get<Index>();
    if (e.contains("method")) {
      const auto m = e.at("method").get<std::string>();
      if (m == "auto") o.eigen.method = EigenMethod::automatic;
      else if (m == "lanczos") o.eigen.method = EigenMethod::lanczos;
      else if (m == "dense") o.eigen.method = EigenMethod::dense;
      else throw FormatError("estimator method must be auto, lanczos or dense");
    }
    if (e.contains("drop_quantile")) o.embedding.drop_quantile = e.at("drop_quantile").get<double>();
    if (e.contains("safety_factor")) o.embedding.safety_factor = e.at("safety_factor").get<double>();
  }
  if (j.contains("cells")) {
    if (!j.at("cells").is_array()) throw FormatError("\"cells\" must be an array");
    for (const auto& c : j.at("cells")) cfg.cells.push_back(cell_from_json(c));
  }
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    if (!g.is_object()) throw FormatError("\"grid\" must be an object");
    if (!g.contains("n") || !g.contains("theta") || !g.contains("P"))
      throw FormatError("grid needs \"n\", \"theta\" and \"P\"");
    for (const auto& n : values_or(g, "n", nullptr))
      for (const auto& th : values_or(g, "theta", nullptr))
        for (const auto& p : values_or(g, "P", nullptr))
          for (const auto& mf : values_or(g, "mixed_fraction", 0.0)) {
            Json cell{{"n", n}, {"theta", th}, {"P", p}, {"mixed_fraction", mf}};
            if (g.contains("target_mean")) cell["target_mean"] = g.at("target_mean");
            if (g.contains("mixed_row")) cell["mixed_row"] = g.at("mixed_row");
            cfg.cells.push_back(cell_from_json(cell));
          }
  }
  if (cfg.cells.empty()) throw FormatError("sweep config has no cells");
  if (cfg.trials < 1) throw FormatError("trials must be >= 1");
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return sweep_config_from_json(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

MembershipMatrix planted_memberships(Index n, int K, double mixed_fraction,
                                     const std::optional<Eigen::VectorXd>& mixed_row) {
  if (n < 1 || K < 2) throw std::invalid_argument("planted memberships need n >= 1 and K >= 2");
  if (!(mixed_fraction >= 0.0 && mixed_fraction <= 1.0)) throw std::invalid_argument("mixed_fraction must lie in [0, 1]");
  const auto mixed = static_cast<Index>(std::llround(mixed_fraction * static_cast<double>(n)));
  const Index pure = n - mixed;
  Eigen::RowVectorXd mrow = Eigen::RowVectorXd::Constant(K, 1.0 / K);
  if (mixed_row) {
    if (mixed_row->size() != K) throw std::invalid_argument("mixed_row must have K entries");
    mrow = mixed_row->transpose();
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, K);
  for (Index i = 0; i < pure; ++i) m(i, static_cast<Eigen::Index>(i % K)) = 1.0;
  for (Index i = pure; i < n; ++i) m.row(i) = mrow;
  return MembershipMatrix(std::move(m));
}

std::uint64_t cell_key(const SweepCell& cell, std::uint64_t duplicate_ordinal) {
  return mix64(fnv1a(cell_to_json(cell).dump()) ^ mix64(duplicate_ordinal + 0x9e3779b97f4a7c15ULL));
}

std::string describe_profile(const ThetaProfile& profile) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, theta_profile::Constant>) {
          return "constant:value=" + fmt(p.value);
        } else if constexpr (std::is_same_v<T, theta_profile::Pareto>) {
          std::string s = "pareto:alpha=" + fmt(p.alpha) + ";floor=" + fmt(p.floor);
          if (std::isfinite(p.cap)) s += ";cap=" + fmt(p.cap);
          return s;
        } else {
          return "two-level:frac=" + fmt(p.frac) + ";low=" + fmt(p.low) + ";high=" + fmt(p.high);
        }
      },
      profile);
}

bool SweepResult::all_valid() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellSummary& c) { return c.valid; });
}

SweepResult run_sweep(const SweepConfig& config, int workers) {
  if (config.cells.empty()) throw std::invalid_argument("sweep has no cells");
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");

  std::vector<PreparedCell> cells;
  std::map<std::string, std::uint64_t> seen;
  for (std::size_t ci = 0; ci < config.cells.size(); ++ci) {
    const SweepCell& sc = config.cells[ci];
    PreparedCell pc{sc, {}, std::nullopt, {}};
    const std::uint64_t ordinal = seen[cell_to_json(sc).dump()]++;
    pc.root = SampleSeed{config.seed, cell_key(sc, ordinal)};
    try {
      const int K = sc.K();
      DegreeVector theta = generate_theta(sc.n, sc.theta, SampleSeed{counter_hash(pc.root, kThetaPurpose, 0), 0},
                                          sc.target_mean);
      MixingMatrix p(sc.P);
      MembershipMatrix pi = planted_memberships(sc.n, K, sc.mixed_fraction, sc.mixed_row);
      const double c = config.c > 0.0 ? config.c : 0.4 / K;
      pc.summary.in_theta_class = check_theta_class(theta, K, c).member;
      pc.summary.in_scope = theta.max() <= config.scope_ratio * theta.min();
      pc.params.emplace(std::move(theta), std::move(pi), std::move(p));
    } catch (const std::exception& e) {
      throw std::invalid_argument("cell " + std::to_string(ci) + ": " + e.what());
    }
    const auto& prm = *pc.params;
    auto& s = pc.summary;
    s.cell = ci;
    s.n = sc.n;
    s.K = sc.K();
    s.theta_profile = describe_profile(sc.theta);
    s.theta_bar = prm.theta().mean();
    s.n_theta_bar_sq = static_cast<double>(sc.n) * s.theta_bar * s.theta_bar;
    s.mixed_fraction = sc.mixed_fraction;
    s.trials = config.trials;
    cells.push_back(std::move(pc));
  }

  const auto trials = static_cast<std::size_t>(config.trials);
  SweepResult result;
  result.trials.resize(cells.size() * trials);
  parallel_for(result.trials.size(), workers, [&](std::size_t job) {
    const std::size_t ci = job / trials;
    const PreparedCell& pc = cells[ci];
    const ModelParams& prm = *pc.params;
    TrialRow& row = result.trials[job];
    row.cell = ci;
    row.n = pc.summary.n;
    row.theta_bar = pc.summary.theta_bar;
    row.n_theta_bar_sq = pc.summary.n_theta_bar_sq;
    row.K = pc.summary.K;
    row.trial = static_cast<int>(job % trials);
    row.seed = counter_hash(pc.root, kTrialPurpose, static_cast<std::uint64_t>(row.trial));
    try {
      LossReport lr;
      if (config.oracle_estimator) {
        lr = evaluate_loss(prm.pi(), prm.pi(), prm.theta());
      } else {
        const SparseGraph g = sample_graph(prm, SampleSeed{row.seed, 0});
        MixedScoreOptions opts = config.estimator;
        opts.seed = row.seed;
        const MixedScoreResult est = mixed_score(g, row.K, opts);
        lr = evaluate_loss(est.estimate.pi_hat, prm.pi(), prm.theta());
      }
      row.loss_weighted = lr.weighted;
      row.loss_unweighted = lr.unweighted;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.loss_weighted = std::numeric_limits<double>::quiet_NaN();
      row.loss_unweighted = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::vector<std::pair<double, double>> points;
  for (auto& pc : cells) {
    CellSummary s = pc.summary;
    std::vector<double> w, u;
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialRow& row = result.trials[s.cell * trials + t];
      if (row.failed) {
        ++s.failures;
        continue;
      }
      w.push_back(row.loss_weighted);
      u.push_back(row.loss_unweighted);
    }
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
      const double m = static_cast<double>(v.size());
      mean = se = 0.0;
      if (v.empty()) {
        mean = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      for (double x : v) mean += x;
      mean /= m;
      if (v.size() < 2) return;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / (m - 1.0) / m);
    };
    mean_se(w, s.mean_weighted, s.stderr_weighted);
    mean_se(u, s.mean_unweighted, s.stderr_unweighted);
    s.valid = !w.empty() && static_cast<double>(s.failures) <= kMaxFailureShare * static_cast<double>(s.trials);
    if (s.valid && s.in_scope && s.mean_weighted > 0.0) points.emplace_back(s.n_theta_bar_sq, s.mean_weighted);
    result.cells.push_back(std::move(s));
  }

  std::set<double> xs;
  for (const auto& p : points) xs.insert(p.first);
  if (xs.size() >= 3) result.fit = fit_loglog_slope(points);
  return result;
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  std::set<double> xs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw std::invalid_argument("log-log fit needs positive finite values");
    xs.insert(x);
  }
  if (xs.size() < 3) throw std::invalid_argument("log-log fit needs at least 3 distinct x values");
  const double m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  SlopeFit f;
  f.points = points.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - (f.intercept + f.slope * std::log(x));
    ssr += r * r;
  }
  f.ci_halfwidth = 2.0 * std::sqrt(ssr / (m - 2.0) / sxx);
  return f;
}

void write_trials_csv(const SweepResult& result, std::ostream& out) {
  out << kTrialsCsvHeader << '\n';
  for (const auto& r : result.trials)
    out << r.n << ',' << fmt(r.theta_bar) << ',' << fmt(r.n_theta_bar_sq) << ',' << r.K << ',' << r.trial << ','
        << r.seed << ',' << fmt(r.loss_weighted) << ',' << fmt(r.loss_unweighted) << ',' << (r.failed ? 1 : 0) << '\n';
}

void write_summary_csv(const SweepResult& result, std::ostream& out) {
  out << kSummaryCsvHeader << '\n';
  std::string fit_cols = ",,";
  if (result.fit) fit_cols = fmt(result.fit->slope) + ',' + fmt(result.fit->ci_halfwidth) + ',' + fmt(result.fit->intercept);
  for (const auto& c : result.cells)
    out << c.cell << ',' << c.n << ',' << c.K << ',' << c.theta_profile << ',' << fmt(c.theta_bar) << ','
        << fmt(c.n_theta_bar_sq) << ',' << fmt(c.mixed_fraction) << ',' << c.trials << ',' << c.failures << ','
        << fmt(c.mean_weighted) << ',' << fmt(c.stderr_weighted) << ',' << fmt(c.mean_unweighted) << ','
        << fmt(c.stderr_unweighted) << ',' << (c.valid ? 1 : 0) << ',' << (c.in_theta_class ? 1 : 0) << ','
        << (c.in_scope ? 1 : 0) << ',' << fit_cols << '\n';
}

void emit_csv(const SweepResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write(dir / "trials.csv", [&](std::ostream& o) { write_trials_csv(result, o); });
  write(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(result, o); });
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("CSV has no column \"" + name + "\"");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError(lineno, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                   std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw ParseError(lineno, "CSV has no header");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_csv(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<TrialRow> parse_trials(const CsvTable& t) {
  const std::size_t cn = t.column("n"), ctb = t.column("theta_bar"), cx = t.column("n_theta_bar_sq"),
                    ck = t.column("K"), ct = t.column("trial"), cs = t.column("seed"),
                    cw = t.column("loss_weighted"), cu = t.column("loss_unweighted"), cf = t.column("failed");
  std::vector<TrialRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const std::size_t line = r + 2;
    TrialRow row;
    row.n = static_cast<Index>(parse_u64(f[cn], line));
    row.theta_bar = parse_double(f[ctb], line);
    row.n_theta_bar_sq = parse_double(f[cx], line);
    row.K = static_cast<int>(parse_u64(f[ck], line));
    row.trial = static_cast<int>(parse_u64(f[ct], line));
    row.seed = parse_u64(f[cs], line);
    row.loss_weighted = parse_double(f[cw], line);
    row.loss_unweighted = parse_double(f[cu], line);
    row.failed = parse_u64(f[cf], line) != 0;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace dcmm
