#pragma once

#include <string>
#include <vector>

#include "optdesign/design.hpp"

namespace optdesign {

/// Scalar map t(x) that slices the design space.
struct SliceMap {
  enum class Kind { coordinate, linear };
  Kind kind = Kind::coordinate;
  int axis = 0;  // coordinate maps (0-based)
  Vector alpha;  // linear maps: t = alpha^T x
  double tol = 1e-9;

  static SliceMap coordinate(int axis, double tol = 1e-9);
  static SliceMap linear(Vector alpha, double tol = 1e-9);
  /// "coord:<axis>" or "linear:<a1>,<a2>,..."
  static SliceMap parse(const std::string& text);

  double operator()(const Point& x) const;
  std::string describe() const;
};

/// Reduced model on the slice {x : t(x) = t}: f(x) = C f_tilde(x) there.
/// f_tilde is evaluated on full design-space points.
struct ConditionalModel {
  Regression f_tilde;
  Matrix C;  // k x p_t, full column rank
  double t = 0.0;
  std::string slice_space;
};

/// Catalog lookup of the conditional model for (model, tmap) at value t.
/// Throws NoConditionalModelError for unregistered pairs.
ConditionalModel conditional_model(const ModelSpec& model, const SliceMap& tmap, double t);

/// Marginal regression of one factor of a two-factor product model, evaluated
/// on one-dimensional points of that factor.
Regression marginal_model(const ModelSpec& model, int factor);

struct Slice {
  double t = 0.0;
  double marginal_weight = 0.0;
  Design conditional_design;
  ConditionalModel model;
};

struct SliceDecomposition {
  std::vector<Slice> slices;  // ascending t
};

/// Groups atoms by t(x) (within tmap.tol) into marginal weights and
/// conditional designs.
SliceDecomposition decompose(const Design& design, const SliceMap& tmap, const ModelSpec& model);

/// max |M(design) - sum_t xi_t C(t) M_t(xi_{x|t}) C(t)^T|
double recompose_check(const Design& design, const SliceMap& tmap, const ModelSpec& model);

/// Projection of a design onto one axis (weights of equal coordinates summed).
Design marginal_design(const Design& design, int axis, double tol = 1e-9);

/// Product design with weights w_i v_j on points (x_i, y_j).
Design product_of_marginals(const Design& first, const Design& second);

}  // namespace optdesign
