#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optdesign/conditional_models.hpp"
#include "optdesign/kernels.hpp"

namespace optdesign {

/// M2 >= M1 in the Loewner order with M2 != M1:
/// lambda_min(M2 - M1) >= -tol * scale and max |M2 - M1| > tol * scale,
/// scale = max(max|M1|, max|M2|).
bool dominates(const Matrix& m2, const Matrix& m1, double tol = 1e-9);
bool dominates(const Design& d2, const Design& d1, const Regression& f, double tol = 1e-9);

/// "admissible" is one-sided: no dominator was found within the budget.
enum class VerdictStatus { admissible, inadmissible, inconclusive };

std::string to_string(VerdictStatus s);

struct SliceEvidence {
  double t = 0.0;
  VerdictStatus status = VerdictStatus::admissible;
  std::optional<Design> dominator;
};

struct AdmissibilityVerdict {
  VerdictStatus status = VerdictStatus::admissible;
  std::optional<Design> dominator;
  std::vector<SliceEvidence> evidence;
  /// "penalized-ascent", "pair-sweep" or "slice-splice" for found dominators.
  std::string method;
  std::string note;

  bool admissible() const { return status == VerdictStatus::admissible; }
};

struct DominatorOptions {
  /// Ascent steps per penalty stage.
  int budget = 500;
  double tol = 1e-9;
  /// Pair sweep runs when k <= 2 and the pool has at most this many points.
  size_t exhaustive_limit = 200;
};

/// Searches a design whose information matrix dominates M(d1): penalized
/// supergradient ascent followed by barrier polishing, plus an exhaustive
/// sweep over two-point supports on small problems.
AdmissibilityVerdict find_dominator(const Design& d1, const CandidateSet& candidates, const Regression& f,
                                    const DominatorOptions& opts = {});

/// Runs find_dominator on every conditional design; a dominated slice is
/// spliced into the full design and the full dominance is re-verified.
AdmissibilityVerdict conditional_audit(const Design& design, const SliceMap& tmap, const ModelSpec& model,
                                       const CandidateSet& candidates, const DominatorOptions& opts = {});

struct FactorVerdict {
  int factor = 0;
  Design marginal;
  AdmissibilityVerdict verdict;
};

struct ProductAudit {
  std::vector<FactorVerdict> factors;
  /// p_1 * p_2, p_i the support size of the i-th marginal design unless overridden.
  int support_bound = 0;
  std::string note;
};

ProductAudit product_audit(const Design& design, const ModelSpec& model, const CandidateSet& candidates,
                           const DominatorOptions& opts = {},
                           std::optional<std::pair<int, int>> support_sizes = std::nullopt);

}  // namespace optdesign
