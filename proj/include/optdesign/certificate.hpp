#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optdesign/criteria.hpp"
#include "optdesign/design.hpp"
#include "optdesign/kernels.hpp"
#include "optdesign/solver.hpp"

namespace optdesign {

/// Dual matrix N with its eigendecomposition N = Z diag(Lambda) Z^T
/// (eigenvalues descending). The normality inequality reads f^T N f <= bound.
struct Certificate {
  Matrix N;
  Matrix Z;
  Vector Lambda;
  double bound = 1.0;
  /// Remaining excess of max f^T N f over the bound when the E-criterion
  /// search on a multiple smallest eigenvalue did not reach it.
  double residual = 0.0;
  /// Dimension of the eigenspace the E certificate was optimized over.
  int eigenspace_dim = 1;
};

Certificate build_certificate(const Criterion& c, const Matrix& m, const FeatureMatrix& features);
Certificate build_certificate(const Criterion& c, const Matrix& m, const Regression& f,
                              const CandidateSet& candidates);

struct CertifyReport {
  bool optimal = false;
  double tol = 0.0;
  double trace_mn = 0.0;        // trace(M N)
  double phi_times_polar = 0.0; // phi(M) * polar(N)
  double max_violation = 0.0;   // max(0, max_x f^T N f - bound)
  std::optional<Point> violating_point;
  std::vector<double> support_sensitivities;
  double max_support_gap = 0.0;  // max |f^T N f - bound| over atoms
  /// The maximum on a truncated axis boundary is not slack.
  bool truncation_warning = false;
  std::vector<std::string> warnings;
  Certificate certificate;
  Vector candidate_sensitivities;
};

CertifyReport certify(const Design& design, const Regression& f, const CandidateSet& candidates,
                      const Criterion& c, double tol = 1e-5);

struct Hyperplane {
  Vector c;  // constraint vector P_Z(x*) shared by the active atoms
  std::vector<Point> active_support;
  std::vector<double> lengths;  // ||f(x*)|| per active atom
};

struct PolytopeReport {
  std::vector<Hyperplane> hyperplanes;
  /// P_Z(x) = (h_{Z,1}(x)^2, ..., h_{Z,k}(x)^2) per candidate, h_Z = Z^T f.
  std::vector<Vector> squared_coords;
  /// Support points partitioned by ||f(x)||.
  std::vector<std::vector<Point>> length_groups;
  double max_candidate_constraint = 0.0;  // max_x P_Z(x)^T Lambda
  double max_length_spread = 0.0;         // worst spread of ||f|| inside one hyperplane
};

PolytopeReport polytope_report(const Certificate& cert, const Design& design, const Regression& f,
                               const CandidateSet& candidates, double tol = 1e-5);

struct GarzaReport {
  Vector norm_values;  // ||f(x)||^2 per candidate
  int max_equal_group_size = 0;
  int saturation_bound = 0;
  bool injective = false;
  std::optional<std::string> monotone_axis_note;
};

/// Buckets ||f(x)||^2 over the candidates: consecutive sorted values belong to
/// one bucket while they stay within norm_tol of the bucket's first value.
GarzaReport garza_report(const Regression& f, const CandidateSet& candidates, double norm_tol = 1e-9);

struct SaturationCheck {
  bool holds = false;
  std::vector<double> margins;  // lambda_i - |a_i| / 2
};

SaturationCheck exp_saturation_check(const std::vector<double>& a, const std::vector<double>& lambda);

struct RescaleCheck {
  bool coincide = false;
  Design original;
  Design rescaled;
};

/// Solves the exponential-sum problem for the gradient f and for the
/// reparametrized regression g_l = (exp(-lambda_l x), c x exp(-lambda_l x))
/// and compares the optimal designs.
RescaleCheck rescale_invariance_check(const std::vector<double>& a, const std::vector<double>& lambda,
                                      double c, const CandidateSet& candidates,
                                      const Criterion& criterion = Criterion::D(),
                                      const SolverOptions& opts = {});

}  // namespace optdesign
