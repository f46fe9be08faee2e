#pragma once

// Monte-Carlo rate sweeps: per cell, build DCMM parameters, then per trial
// sample a graph, run Mixed-SCORE and score it against the truth. Cell means
// of the weighted loss are regressed on n theta_bar^2 in log-log scale.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dcmm/estimator.hpp"
#include "dcmm/model.hpp"
#include "dcmm/sampler.hpp"

namespace dcmm {

struct SweepCell {
  Index n = 0;
  ThetaProfile theta = theta_profile::Constant{0.5};
  std::optional<double> target_mean;
  Eigen::MatrixXd P;               // K x K
  double mixed_fraction = 0.0;     // share of nodes placed at `mixed_row`
  std::optional<Eigen::VectorXd> mixed_row;  // default: barycenter
  std::optional<std::uint64_t> seed;         // optional per-cell salt

  int K() const { return static_cast<int>(P.rows()); }
};

struct SweepConfig {
  std::vector<SweepCell> cells;
  int trials = 1;
  std::uint64_t seed = 0;
  double c = 0.0;              // degree-class constant; 0 selects 0.4 / K per cell
  double scope_ratio = 10.0;   // cells with theta_max > scope_ratio * theta_min are tagged out of scope
  bool oracle_estimator = false;
  MixedScoreOptions estimator;
};

// Reads the JSON config (see README). Cells come from an explicit "cells"
// array followed by the cartesian product described by "grid".
SweepConfig sweep_config_from_json(const std::string& text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

// Pure nodes first, balanced round robin over communities, then
// round(mixed_fraction * n) mixed nodes.
MembershipMatrix planted_memberships(Index n, int K, double mixed_fraction,
                                     const std::optional<Eigen::VectorXd>& mixed_row = std::nullopt);

// Stable 64-bit key of a cell's content; identical cells are told apart by
// their duplicate ordinal.
std::uint64_t cell_key(const SweepCell& cell, std::uint64_t duplicate_ordinal);

std::string describe_profile(const ThetaProfile& profile);

struct TrialRow {
  std::size_t cell = 0;
  Index n = 0;
  double theta_bar = 0.0;
  double n_theta_bar_sq = 0.0;
  int K = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double loss_weighted = 0.0;
  double loss_unweighted = 0.0;
  bool failed = false;
  std::string error;  // not emitted to CSV
};

struct CellSummary {
  std::size_t cell = 0;
  Index n = 0;
  int K = 0;
  std::string theta_profile;
  double theta_bar = 0.0;
  double n_theta_bar_sq = 0.0;
  double mixed_fraction = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_weighted = 0.0;
  double stderr_weighted = 0.0;
  double mean_unweighted = 0.0;
  double stderr_unweighted = 0.0;
  bool valid = false;           // failures <= 20% of trials and at least one success
  bool in_theta_class = false;
  bool in_scope = false;        // theta_max <= scope_ratio * theta_min
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_halfwidth = 0.0;  // 2 x standard error of the slope
  std::size_t points = 0;
};

struct SweepResult {
  std::vector<TrialRow> trials;  // sorted by (cell, trial)
  std::vector<CellSummary> cells;
  std::optional<SlopeFit> fit;   // over valid in-scope cells with positive mean loss

  bool all_valid() const;
};

inline constexpr double kMaxFailureShare = 0.2;

SweepResult run_sweep(const SweepConfig& config, int workers = 1);

// OLS of log y on log x. Requires >= 3 distinct x and positive values.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

inline constexpr const char* kTrialsCsvHeader =
    "n,theta_bar,n_theta_bar_sq,K,trial,seed,loss_weighted,loss_unweighted,failed";
inline constexpr const char* kSummaryCsvHeader =
    "cell,n,K,theta_profile,theta_bar,n_theta_bar_sq,mixed_fraction,trials,failures,"
    "mean_loss_weighted,stderr_loss_weighted,mean_loss_unweighted,stderr_loss_unweighted,"
    "valid,theta_class,in_scope,slope,slope_ci_halfwidth,intercept";

// Writes trials.csv and summary.csv into `dir` (created if missing).
void emit_csv(const SweepResult& result, const std::filesystem::path& dir);
void write_trials_csv(const SweepResult& result, std::ostream& out);
void write_summary_csv(const SweepResult& result, std::ostream& out);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
std::vector<TrialRow> parse_trials(const CsvTable& table);

}  // namespace dcmm
