#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optdesign/linalg.hpp"

namespace optdesign {

/// A point of the design space, x = (x_1, ..., x_q).
using Point = Vector;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // may be +infinity
  bool bounded() const { return hi < std::numeric_limits<double>::infinity(); }
};

/// Axis-aligned box of predictor values. Unbounded upper ends are allowed but
/// must be truncated before discretization.
class DesignSpace {
 public:
  DesignSpace() = default;
  explicit DesignSpace(std::vector<Interval> bounds);

  int dimension() const { return static_cast<int>(bounds_.size()); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  const Interval& axis(int j) const { return bounds_.at(static_cast<size_t>(j)); }
  bool bounded() const;

  /// Per-axis flag: the upper end of this axis is an artificial truncation.
  bool truncated(int j) const { return truncated_.at(static_cast<size_t>(j)); }
  const std::optional<std::string>& truncation_note() const { return note_; }

  bool contains(const Point& x, double rel_tol = 1e-9) const;

  static DesignSpace unit_box(int q);

  friend DesignSpace truncate(const DesignSpace& space, int axis, double new_hi);

 private:
  std::vector<Interval> bounds_;
  std::vector<bool> truncated_;
  std::optional<std::string> note_;
};

/// Bounds the upper end of `axis` at `new_hi` and records a truncation note.
/// An already bounded axis is returned unchanged, with a note saying so.
DesignSpace truncate(const DesignSpace& space, int axis, double new_hi);

/// Finite grid over a bounded design space.
struct CandidateSet {
  DesignSpace space;
  std::vector<Point> points;
  std::vector<double> resolution;

  size_t size() const { return points.size(); }
  /// Smallest grid step; used as the default merge tolerance.
  double min_step() const;
};

/// Regular grid including both endpoints of every axis. Axis 0 varies slowest.
CandidateSet discretize(const DesignSpace& space, const std::vector<double>& steps);

/// Candidate set from an explicit point list (all points must lie in `space`).
CandidateSet make_candidates(const DesignSpace& space, std::vector<Point> points,
                             std::vector<double> resolution = {});

// ---------------------------------------------------------------------------
// Model families

struct Efficiency {
  enum class Kind { constant, exponential, linear };
  Kind kind = Kind::constant;
  double c0 = 1.0;
  double c1 = 0.0;

  /// constant: c0; exponential: c0 * exp(c1 x); linear: c0 + c1 x
  double operator()(double x) const;
  std::string describe() const;
};

namespace family {
struct Polynomial {
  int degree = 1;
};
struct WeightedPolynomial {
  int degree = 1;
  Efficiency efficiency{};
};
struct Linear2fNoIntercept {};
struct Interaction2f {};
/// eta(x) = sum_l a_l exp(-lambda_l x); gradient ordering (a_1, lambda_1, ..., a_L, lambda_L).
struct ExponentialSum {
  std::vector<double> a;
  std::vector<double> lambda;
};
/// eta = theta0 + exp(-theta1 x1) + exp(-theta2 x2)
struct ExpGrowth2f {
  std::array<double, 3> theta{1.0, 1.0, 1.0};
};
/// eta = theta0 exp(theta1 x1 + theta2 x2) on [0,b1] x [0,b2]
struct ExpProduct2f {
  std::array<double, 3> theta{1.0, 1.0, 1.0};
  std::array<double, 2> b{1.0, 1.0};
};
/// Gradient (1, x1, x1^3, -x2 exp(-theta3 x2)).
struct MixturePolyExp {
  double theta3 = 1.0;
};
}  // namespace family

using Family = std::variant<family::Polynomial, family::WeightedPolynomial,
                            family::Linear2fNoIntercept, family::Interaction2f,
                            family::ExponentialSum, family::ExpGrowth2f, family::ExpProduct2f,
                            family::MixturePolyExp>;

/// A regression model: the family, its parameters and its design space.
/// Linear families evaluate f(x); nonlinear families evaluate the parameter
/// gradient of the mean response at the stored parameter value.
class ModelSpec {
 public:
  ModelSpec(Family family, DesignSpace space);

  static ModelSpec polynomial(int degree, DesignSpace space = DesignSpace::unit_box(1));
  static ModelSpec weighted_polynomial(int degree, Efficiency efficiency,
                                       DesignSpace space = DesignSpace::unit_box(1));
  static ModelSpec linear_2f_no_intercept(DesignSpace space = DesignSpace::unit_box(2));
  static ModelSpec interaction_2f(DesignSpace space = DesignSpace::unit_box(2));
  /// Default space is [0, inf).
  static ModelSpec exponential_sum(std::vector<double> a, std::vector<double> lambda);
  static ModelSpec exponential_sum(std::vector<double> a, std::vector<double> lambda,
                                   DesignSpace space);
  static ModelSpec exp_growth_2f(std::array<double, 3> theta,
                                 DesignSpace space = DesignSpace::unit_box(2));
  static ModelSpec exp_product_2f(std::array<double, 3> theta, std::array<double, 2> b);
  static ModelSpec mixture_poly_exp(double theta3);
  static ModelSpec mixture_poly_exp(double theta3, DesignSpace space);

  const Family& family() const { return family_; }
  const DesignSpace& space() const { return space_; }
  /// Number of regression functions.
  int k() const { return k_; }
  /// Dimension of the predictor.
  int q() const { return space_.dimension(); }
  std::string family_name() const;

  /// f(x), checking that x is inside the design space.
  Vector eval_f(const Point& x) const;
  /// f(x) without the domain check (caller guarantees membership).
  Vector eval_f_unchecked(const Point& x) const;
  void eval_f_into(const Point& x, double* out) const;

  /// Efficiency function lambda(x) of the weighted polynomial family.
  double eval_efficiency(const Point& x) const;

  ModelSpec with_space(DesignSpace space) const;

 private:
  void validate();

  Family family_;
  DesignSpace space_;
  int k_ = 0;
};

/// Default truncation for unbounded exponential domains: 3 / lambda_1.
double default_exponential_truncation(const ModelSpec& model);

/// Type-erased regression vector x -> f(x) in R^k. Solver, certificate and
/// admissibility code run on this so that catalog models and the conditional
/// (marginal) models of a slice share one code path.
class Regression {
 public:
  using EvalFn = std::function<void(const Point&, double*)>;

  Regression(std::string name, int k, int q, EvalFn eval,
             std::optional<DesignSpace> space = std::nullopt);
  /// Implicit on purpose: every ModelSpec is a regression.
  Regression(const ModelSpec& model);  // NOLINT(google-explicit-constructor)

  const std::string& name() const { return name_; }
  int k() const { return k_; }
  int q() const { return q_; }
  const std::optional<DesignSpace>& space() const { return space_; }

  /// Domain-checked evaluation (when a space is attached).
  Vector operator()(const Point& x) const;
  void eval_into(const Point& x, double* out) const { eval_(x, out); }

 private:
  std::string name_;
  int k_;
  int q_;
  EvalFn eval_;
  std::optional<DesignSpace> space_;
};

}  // namespace optdesign
