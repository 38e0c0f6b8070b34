#pragma once

#include <json.hpp>
#include <string>

#include "optdesign/admissibility.hpp"
#include "optdesign/certificate.hpp"
#include "optdesign/conditional_models.hpp"
#include "optdesign/solver.hpp"

namespace optdesign::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// A model file together with the candidate grid it describes.
struct LoadedModel {
  ModelSpec model;
  CandidateSet candidates;
  json source;
};

/// {"family": ..., "params": {...}, "space": {"bounds": [[lo, hi], ...], "steps": [...]}}
/// A null upper bound means +infinity; exponential-sum axes are then
/// truncated at "truncate" (default 3 / lambda_1).
LoadedModel model_from_json(const json& j);
LoadedModel load_model(const std::string& path);
json model_to_json(const ModelSpec& model, const std::vector<double>& steps);

Design design_from_json(const json& j);
Design load_design(const std::string& path);
json design_to_json(const Design& d);
json exact_design_to_json(const ExactDesign& d);

json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);

json solve_report_to_json(const SolveReport& r, const Criterion& c);
json certificate_to_json(const Certificate& cert);
json certify_report_to_json(const CertifyReport& r);
json polytope_to_json(const PolytopeReport& r);
json garza_to_json(const GarzaReport& r);
json verdict_to_json(const AdmissibilityVerdict& v);
json product_audit_to_json(const ProductAudit& a);
json decomposition_to_json(const SliceDecomposition& d, double recompose_error);

/// CSV with one row per candidate: coordinates followed by `value_name`.
std::string candidate_csv(const CandidateSet& candidates, const Vector& values, const std::string& value_name);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const json& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace optdesign::io
