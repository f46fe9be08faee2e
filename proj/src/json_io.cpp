#include "dcmm/json_io.hpp"

#include <fstream>
#include <sstream>

namespace dcmm {
namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw FormatError(what + " must be a number");
  return j.get<double>();
}

Index integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw FormatError(what + " must be an integer");
  return j.get<Index>();
}

std::vector<double> vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what + " entry"));
  return out;
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json vector_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw FormatError(what + " must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw FormatError(what + " rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = vector_from_json(j[i], what + " row");
    if (row.size() != cols) throw FormatError(what + " is ragged at row " + std::to_string(i));
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return m;
}

Json as_json(const ModelParams& params) {
  return Json{{"n", params.n()},
              {"K", params.K()},
              {"P", matrix_to_json(params.p().matrix())},
              {"theta", std::vector<double>(params.theta().values().begin(), params.theta().values().end())},
              {"Pi", matrix_to_json(params.pi().matrix())}};
}

ModelParams model_params_from_json(const Json& j) {
  const Index n = integer(require(j, "n"), "n");
  const Index K = integer(require(j, "K"), "K");
  MixingMatrix p(matrix_from_json(require(j, "P"), "P"));
  DegreeVector theta(vector_from_json(require(j, "theta"), "theta"));
  MembershipMatrix pi(matrix_from_json(require(j, "Pi"), "Pi"));
  if (theta.size() != n) throw FormatError("theta length differs from n");
  if (pi.n() != n) throw FormatError("Pi row count differs from n");
  if (p.K() != K) throw FormatError("P dimension differs from K");
  return ModelParams(std::move(theta), std::move(pi), std::move(p));
}

Json membership_to_json(const MembershipMatrix& pi) {
  return Json{{"n", pi.n()}, {"K", pi.K()}, {"Pi", matrix_to_json(pi.matrix())}};
}

MembershipMatrix membership_from_json(const Json& j) {
  if (j.is_array()) return MembershipMatrix(matrix_from_json(j, "Pi"));
  MembershipMatrix pi(matrix_from_json(require(j, "Pi"), "Pi"));
  if (j.contains("n") && integer(j.at("n"), "n") != pi.n()) throw FormatError("Pi row count differs from n");
  if (j.contains("K") && integer(j.at("K"), "K") != pi.K()) throw FormatError("Pi column count differs from K");
  return pi;
}

Json theta_to_json(const DegreeVector& theta) {
  return Json{{"n", theta.size()}, {"theta", std::vector<double>(theta.values().begin(), theta.values().end())}};
}

DegreeVector theta_from_json(const Json& j) {
  if (j.is_array()) return DegreeVector(vector_from_json(j, "theta"));
  return DegreeVector(vector_from_json(require(j, "theta"), "theta"));
}

Json theta_profile_to_json(const ThetaProfile& profile) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, theta_profile::Constant>) {
          return Json{{"profile", "constant"}, {"value", p.value}};
        } else if constexpr (std::is_same_v<T, theta_profile::Pareto>) {
          Json j{{"profile", "pareto"}, {"alpha", p.alpha}, {"floor", p.floor}};
          if (std::isfinite(p.cap)) j["cap"] = p.cap;
          return j;
        } else {
          return Json{{"profile", "two-level"}, {"frac", p.frac}, {"low", p.low}, {"high", p.high}};
        }
      },
      profile);
}

ThetaProfile theta_profile_from_json(const Json& j) {
  const Json& kind = require(j, "profile");
  if (!kind.is_string()) throw FormatError("profile must be a string");
  const auto name = kind.get<std::string>();
  if (name == "constant") return theta_profile::Constant{number(require(j, "value"), "value")};
  if (name == "pareto") {
    theta_profile::Pareto p{number(require(j, "alpha"), "alpha"), number(require(j, "floor"), "floor")};
    if (j.contains("cap")) p.cap = number(j.at("cap"), "cap");
    return p;
  }
  if (name == "two-level")
    return theta_profile::TwoLevel{number(require(j, "frac"), "frac"), number(require(j, "low"), "low"),
                                   number(require(j, "high"), "high")};
  throw FormatError("unknown theta profile \"" + name + "\"");
}

ThetaProfile parse_theta_profile(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw FormatError("theta profile must look like name:values, got \"" + text + "\"");
  const std::string name = text.substr(0, colon);
  std::vector<double> v;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw FormatError("bad number \"" + item + "\" in theta profile");
    v.push_back(x);
  }
  if (name == "constant" && v.size() == 1) return theta_profile::Constant{v[0]};
  if (name == "pareto" && (v.size() == 2 || v.size() == 3)) {
    theta_profile::Pareto p{v[0], v[1]};
    if (v.size() == 3) p.cap = v[2];
    return p;
  }
  if (name == "two-level" && v.size() == 3) return theta_profile::TwoLevel{v[0], v[1], v[2]};
  throw FormatError("unrecognized theta profile \"" + text + "\"");
}

Json as_json(const LossReport& r) {
  Json j{{"unweighted", r.unweighted},
         {"weighted", r.weighted},
         {"permutation", r.permutation},
         {"lower_unweighted", optional_json(r.lower_unweighted)}};
  if (r.per_node) j["per_node"] = vector_json(*r.per_node);
  return j;
}

Json as_json(const ThetaClassReport& r) {
  return Json{{"member", r.member},
              {"threshold", r.threshold},
              {"order_index", r.order_index},
              {"mean_margin", r.mean_margin},
              {"order_stat_margin", r.order_stat_margin}};
}

Json as_json(const PiClassReport& r) {
  return Json{{"member", r.member},
              {"failing_clause", r.failing_clause},
              {"pure_counts", r.pure_counts},
              {"pure_mass_fraction", r.pure_mass_fraction},
              {"mixed_count", r.mixed_count},
              {"clusters", r.clusters},
              {"cluster_centers", r.cluster_centers.size() ? matrix_to_json(r.cluster_centers) : Json::array()},
              {"max_cluster_radius", r.max_cluster_radius}};
}

Json as_json(const CertificationReport& r) {
  return Json{{"J", r.J},
              {"s_n", r.s_n},
              {"min_pairwise_loss", r.min_pairwise_loss},
              {"separation_constant", r.separation_constant},
              {"min_pairwise_loss_unweighted", r.min_pairwise_loss_unweighted},
              {"avg_kl_exact", r.avg_kl_exact},
              {"avg_kl_leading", r.avg_kl_leading},
              {"log_J", r.log_J},
              {"beta_effective", r.beta_effective},
              {"C0", r.C0},
              {"beta_max", r.beta_max},
              {"passes_separation", r.passes_separation},
              {"passes_kl", r.passes_kl},
              {"lemma_bound", r.lemma_bound}};
}

Json as_json(const CodeFamilyCheck& c) {
  return Json{{"min_distance", c.min_distance}, {"max_abs_column_sum", c.max_abs_column_sum}, {"ok", c.ok}};
}

Json as_json(const KLDecompositionAverage& a) {
  return Json{{"I", a.mean.I},       {"II", a.mean.II},           {"II1", a.mean.II1},
              {"II2", a.mean.II2},   {"I_bound", a.I_bound},      {"II2_bound", a.II2_bound}};
}

Json as_json(const HypothesisFamily& f, bool include_members) {
  Json j{{"n", f.n()},
         {"K", f.K},
         {"c", f.c},
         {"c0", f.c0},
         {"delta_n", f.delta_n},
         {"n0", f.n0},
         {"n1", f.n1},
         {"J", f.J()},
         {"eta", vector_json(f.eta)},
         {"P", matrix_to_json(f.p.matrix())},
         {"in_star_class", f.in_star_class},
         {"star_class_failure", f.star_class_failure},
         {"order", f.order}};
  if (f.K == 2) j["a"] = f.a;
  if (include_members) {
    Json pis = Json::array(), omegas = Json::array();
    for (int ell = 0; ell <= f.J(); ++ell) {
      pis.push_back(matrix_to_json(f.pi_original_order(ell).matrix()));
      const auto& w = f.code.omegas[static_cast<std::size_t>(ell)];
      omegas.push_back(std::vector<int>(w.begin(), w.end()));
    }
    j["Pi"] = std::move(pis);
    j["omega"] = std::move(omegas);
  }
  return j;
}

Json estimate_diagnostics(const MixedScoreResult& r) {
  const char* method = r.eigen.method_used == EigenMethod::dense ? "dense" : "lanczos";
  return Json{{"dropped_count", r.estimate.dropped_count},
              {"max_negative_barycentric", r.estimate.max_negative_coordinate},
              {"eigenvalues", vector_json(r.eigen.values)},
              {"eigen_residuals", vector_json(r.eigen.residuals)},
              {"operator_norm", r.eigen.operator_norm},
              {"eigen_method", method},
              {"lanczos_steps", r.eigen.iterations},
              {"vertex_scales", vector_json(r.estimate.vertex_scales)},
              {"vertices", matrix_to_json(r.vertices.points)},
              {"kmeans_fallback", r.vertices.used_kmeans_fallback}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dcmm
