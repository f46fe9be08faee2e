#pragma once

// JSON documents for parameters, memberships, degree vectors and reports.
// Every reader re-validates through the domain constructors.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "dcmm/estimator.hpp"
#include "dcmm/loss.hpp"
#include "dcmm/lowerbound.hpp"
#include "dcmm/model.hpp"
#include "dcmm/sampler.hpp"

namespace dcmm {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what);

// {"n", "K", "P", "theta", "Pi"}
Json as_json(const ModelParams& params);
ModelParams model_params_from_json(const Json& j);

// {"n", "K", "Pi"}; the reader also takes a bare array of rows or any
// object carrying "Pi" (such as a parameter file).
Json membership_to_json(const MembershipMatrix& pi);
MembershipMatrix membership_from_json(const Json& j);

// {"n", "theta"}; the reader also takes a bare array or any object carrying "theta".
Json theta_to_json(const DegreeVector& theta);
DegreeVector theta_from_json(const Json& j);

// {"profile": "constant", "value"} | {"profile": "pareto", "alpha", "floor"[, "cap"]}
// | {"profile": "two-level", "frac", "low", "high"}
Json theta_profile_to_json(const ThetaProfile& profile);
ThetaProfile theta_profile_from_json(const Json& j);
// Command-line form: "constant:0.5", "pareto:2,0.05[,cap]", "two-level:0.5,0.1,0.9".
ThetaProfile parse_theta_profile(const std::string& text);

Json as_json(const LossReport& report);
Json as_json(const ThetaClassReport& report);
Json as_json(const PiClassReport& report);
Json as_json(const CertificationReport& report);
Json as_json(const CodeFamilyCheck& check);
Json as_json(const KLDecompositionAverage& avg);
// Construction summary; `include_members` adds every Pi^(l) (original node order) and omega^(l).
Json as_json(const HypothesisFamily& family, bool include_members);
Json estimate_diagnostics(const MixedScoreResult& result);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace dcmm
