#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "dcmm/bench.hpp"
#include "dcmm/estimator.hpp"
#include "dcmm/json_io.hpp"
#include "dcmm/loss.hpp"
#include "dcmm/lowerbound.hpp"
#include "dcmm/sampler.hpp"

namespace fs = std::filesystem;
using namespace dcmm;

namespace {

// Exit codes: 0 success, 1 a checked condition failed, 2 usage or input error.
constexpr int kConditionFailed = 1;

Json json_argument(const std::string& value) {
  const auto first = value.find_first_not_of(" \t\n");
  if (first != std::string::npos && (value[first] == '[' || value[first] == '{')) {
    try {
      return Json::parse(value);
    } catch (const Json::exception& e) {
      throw FormatError(std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(value);
}

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

int cmd_generate(const std::string& params_path, std::uint64_t seed, std::uint64_t stream, const std::string& out) {
  const ModelParams params = model_params_from_json(read_json_file(params_path));
  const SparseGraph g = sample_graph(params, SampleSeed{seed, stream});
  if (out.empty() || out == "-") {
    write_edge_list(g, std::cout);
  } else {
    write_edge_list(g, fs::path(out));
  }
  std::cerr << "sampled " << g.edge_count() << " edges on " << g.n() << " nodes\n";
  return 0;
}

struct EstimateArgs {
  std::string graph, out, diagnostics;
  int K = 2;
  std::uint64_t seed = 0;
  Index dense_cutoff = EigenOptions{}.dense_cutoff;
  double tol = EigenOptions{}.tol;
};

int cmd_estimate(const EstimateArgs& a) {
  const SparseGraph g = read_edge_list(fs::path(a.graph));
  MixedScoreOptions opts;
  opts.seed = a.seed;
  opts.eigen.dense_cutoff = a.dense_cutoff;
  opts.eigen.tol = a.tol;
  const MixedScoreResult r = mixed_score(g, a.K, opts);
  emit(membership_to_json(r.estimate.pi_hat), a.out);

  Json diag = estimate_diagnostics(r);
  Json dropped = Json::array();
  for (std::size_t i = 0; i < r.estimate.flagged.size(); ++i)
    if (r.estimate.flagged[i]) dropped.push_back(i + 1);
  diag["dropped_nodes"] = std::move(dropped);  // 1-based, as in the edge list
  std::string sidecar = a.diagnostics;
  if (sidecar.empty()) sidecar = (a.out.empty() || a.out == "-") ? "estimate.diagnostics.json" : a.out + ".diagnostics.json";
  write_json_file(sidecar, diag);
  return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& est_path, const std::string& theta_path,
                 bool per_node, const std::string& out) {
  const Json truth = read_json_file(truth_path);
  const MembershipMatrix pi = membership_from_json(truth);
  const MembershipMatrix pi_hat = membership_from_json(read_json_file(est_path));
  const DegreeVector theta = theta_path.empty() ? theta_from_json(truth) : theta_from_json(read_json_file(theta_path));
  emit(as_json(evaluate_loss(pi_hat, pi, theta, per_node)), out);
  return 0;
}

struct PackingArgs {
  Index n = 400;
  int K = 2;
  std::string P;
  std::string profile = "constant:0.5";
  std::optional<double> target_mean;
  double c = 0.2;
  double c0 = 0.1;
  int J_cap = kDefaultJCap;
  std::uint64_t seed = 0;
  std::optional<double> C0;
  double beta = kDefaultBetaMax;
  bool no_halving = false;
  bool decomposition = false;
  int workers = 1;
  std::string out, dump;
};

int cmd_packing_verify(const PackingArgs& a) {
  const MixingMatrix p(matrix_from_json(json_argument(a.P), "P"));
  if (p.K() != a.K) throw std::invalid_argument("--P is not K x K");
  const DegreeVector theta = generate_theta(a.n, parse_theta_profile(a.profile), SampleSeed{a.seed, 1}, a.target_mean);
  const HypothesisFamily f = a.no_halving ? build_hypotheses(theta, p, a.c, a.c0, a.J_cap, a.seed)
                                          : build_hypotheses_auto(theta, p, a.c, a.c0, a.J_cap, a.seed);
  CertificationReport cert = certify(f, a.C0.value_or(0.0), a.beta, a.workers);
  if (!a.C0) {
    // Largest C0 the family certifies.
    cert.C0 = cert.separation_constant / 2.0;
    cert.passes_separation = cert.separation_constant > 0.0;
  }
  Json report{{"certification", as_json(cert)},
              {"family", as_json(f, false)},
              {"theta_class", as_json(check_theta_class(theta, a.K, a.c))},
              {"code_family", as_json(check_code_family(f.code))}};
  if (a.decomposition) report["kl_decomposition"] = as_json(kl_decomposition_average(f));
  emit(report, a.out);
  if (!a.dump.empty()) write_json_file(a.dump, as_json(f, true));
  return cert.passes_separation && cert.passes_kl ? 0 : kConditionFailed;
}

int cmd_rate_sweep(const std::string& config_path, const std::string& out_dir, int workers) {
  const SweepConfig cfg = load_sweep_config(config_path);
  const SweepResult r = run_sweep(cfg, workers);
  emit_csv(r, out_dir);
  for (const auto& c : r.cells) {
    std::cout << "cell " << c.cell << "  n=" << c.n << "  K=" << c.K << "  n*theta_bar^2=" << c.n_theta_bar_sq
              << "  mean L=" << c.mean_weighted << " (se " << c.stderr_weighted << ")  failures=" << c.failures << '/'
              << c.trials << (c.valid ? "" : "  INVALID") << (c.in_scope ? "" : "  [outside theta_max <= C theta_min]")
              << '\n';
  }
  if (r.fit)
    std::cout << "slope " << r.fit->slope << " +/- " << r.fit->ci_halfwidth << " over " << r.fit->points << " cells\n";
  else
    std::cout << "slope not fitted (fewer than 3 distinct n*theta_bar^2 values among valid cells)\n";
  for (const auto& t : r.trials)
    if (t.failed) std::cerr << "cell " << t.cell << " trial " << t.trial << " failed: " << t.error << '\n';
  return r.all_valid() ? 0 : kConditionFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree-corrected mixed membership networks: sampling, Mixed-SCORE estimation, losses, "
               "lower-bound certification and rate sweeps"};
  app.require_subcommand(1);

  std::string params_path, gen_out;
  std::uint64_t gen_seed = 0, gen_stream = 0;
  auto* gen = app.add_subcommand("generate", "Sample an adjacency matrix from a parameter file");
  gen->add_option("--params", params_path, "ModelParams JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "64-bit seed")->required();
  gen->add_option("--stream", gen_stream, "stream id");
  gen->add_option("--out", gen_out, "edge-list output ('-' for stdout)")->required();

  EstimateArgs est;
  auto* estc = app.add_subcommand("estimate", "Estimate memberships with Mixed-SCORE");
  estc->add_option("--graph", est.graph, "edge list")->required()->check(CLI::ExistingFile);
  estc->add_option("--K", est.K, "number of communities")->required()->check(CLI::Range(2, 1 << 20));
  estc->add_option("--seed", est.seed, "seed for the vertex-hunting fallback");
  estc->add_option("--out", est.out, "membership JSON output ('-' for stdout)")->required();
  estc->add_option("--diagnostics", est.diagnostics, "diagnostics sidecar (default <out>.diagnostics.json)");
  estc->add_option("--dense-cutoff", est.dense_cutoff, "dense retry after a Lanczos failure for n <= cutoff");
  estc->add_option("--tol", est.tol, "eigen residual tolerance relative to ||A||");

  std::string truth, estimate, theta_path, eval_out;
  bool per_node = false;
  auto* eval = app.add_subcommand("evaluate", "Aligned weighted and unweighted l1 losses");
  eval->add_option("--truth", truth, "true memberships (membership or parameter JSON)")->required()->check(CLI::ExistingFile);
  eval->add_option("--estimate", estimate, "estimated memberships")->required()->check(CLI::ExistingFile);
  eval->add_option("--theta", theta_path, "degree vector JSON (default: theta of --truth)")->check(CLI::ExistingFile);
  eval->add_flag("--per-node", per_node, "include aligned per-node errors");
  eval->add_option("--out", eval_out, "report path (default stdout)");

  PackingArgs pk;
  auto* pack = app.add_subcommand("packing-verify", "Build the packing family and certify both lemma conditions");
  pack->add_option("--n", pk.n, "number of nodes")->required();
  pack->add_option("--K", pk.K, "number of communities")->required()->check(CLI::Range(2, 1 << 20));
  pack->add_option("--P", pk.P, "mixing matrix: JSON file or inline [[...]]")->required();
  pack->add_option("--theta-profile", pk.profile, "constant:v | pareto:alpha,floor[,cap] | two-level:frac,low,high");
  pack->add_option("--target-mean", pk.target_mean, "rescale theta to this mean");
  pack->add_option("--c", pk.c, "pure-node fraction per community, in (0, 1/K)");
  pack->add_option("--c0", pk.c0, "perturbation constant (halved until the family is valid)");
  pack->add_option("--J-cap", pk.J_cap, "cap on the number of hypotheses")->check(CLI::Range(2, 1 << 20));
  pack->add_option("--seed", pk.seed, "seed for theta and the code family");
  pack->add_option("--C0", pk.C0, "separation constant to certify (default: the largest certified)");
  pack->add_option("--beta", pk.beta, "KL budget, certified when beta_effective < beta");
  pack->add_flag("--no-halving", pk.no_halving, "fail instead of halving c0");
  pack->add_flag("--decomposition", pk.decomposition, "add the averaged KL block decomposition");
  pack->add_option("--workers", pk.workers, "threads");
  pack->add_option("--out", pk.out, "report path (default stdout)");
  pack->add_option("--dump", pk.dump, "write every hypothesis and code word to this JSON file");

  std::string config_path, out_dir;
  int workers = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  auto* sweep = app.add_subcommand("rate-sweep", "Monte-Carlo sweep and log-log slope fit");
  sweep->add_option("--config", config_path, "sweep config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out-dir", out_dir, "directory for trials.csv and summary.csv")->required();
  sweep->add_option("--workers", workers, "threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(params_path, gen_seed, gen_stream, gen_out);
    if (*estc) return cmd_estimate(est);
    if (*eval) return cmd_evaluate(truth, estimate, theta_path, per_node, eval_out);
    if (*pack) return cmd_packing_verify(pk);
    if (*sweep) return cmd_rate_sweep(config_path, out_dir, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
