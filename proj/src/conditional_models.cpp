#include "optdesign/conditional_models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "optdesign/errors.hpp"

namespace optdesign {

SliceMap SliceMap::coordinate(int axis, double tol) {
  if (axis < 0) throw ValidationError("slice map axis must be >= 0");
  SliceMap m;
  m.kind = Kind::coordinate;
  m.axis = axis;
  m.tol = tol;
  return m;
}

SliceMap SliceMap::linear(Vector alpha, double tol) {
  if (alpha.size() == 0 || (alpha.array() == 0.0).all()) {
    throw ValidationError("linear slice map needs a nonzero coefficient");
  }
  SliceMap m;
  m.kind = Kind::linear;
  m.alpha = std::move(alpha);
  m.tol = tol;
  return m;
}

SliceMap SliceMap::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("slice map must look like coord:<axis> or linear:<a1>,<a2>");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  try {
    if (kind == "coord") {
      size_t used = 0;
      const int axis = std::stoi(rest, &used);
      if (used != rest.size()) throw ValidationError("bad slice axis '" + rest + "'");
      return coordinate(axis);
    }
    if (kind == "linear") {
      std::vector<double> coef;
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) coef.push_back(std::stod(item));
      return linear(Eigen::Map<Vector>(coef.data(), static_cast<Eigen::Index>(coef.size())));
    }
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad slice map '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ValidationError("bad slice map '" + text + "'");
  }
  throw ValidationError("unknown slice map kind '" + kind + "'");
}

double SliceMap::operator()(const Point& x) const {
  if (kind == Kind::coordinate) {
    if (axis >= x.size()) throw ValidationError("slice map axis exceeds the point dimension");
    return x(axis);
  }
  if (alpha.size() != x.size()) throw ValidationError("slice map coefficients do not match the point dimension");
  return alpha.dot(x);
}

std::string SliceMap::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (kind == Kind::coordinate) {
    os << "coord:" << axis;
  } else {
    os << "linear:";
    for (Eigen::Index i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << alpha(i);
  }
  return os.str();
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void no_model(const ModelSpec& model, const SliceMap& tmap) {
  throw NoConditionalModelError("no conditional model registered for " + model.family_name() + " with slice map " +
                                tmap.describe());
}

std::string slice_text(const SliceMap& tmap, double t) {
  std::ostringstream os;
  os.precision(12);
  if (tmap.kind == SliceMap::Kind::coordinate) {
    os << "{x : x_" << tmap.axis << " = " << t << "}";
  } else {
    os << "{x : " << tmap.describe().substr(7) << " . x = " << t << "}";
  }
  return os.str();
}

/// One-dimensional regression lifted to full points through coordinate `axis`.
Regression on_axis(const Regression& r, int axis, int q) {
  return Regression(r.name(), r.k(), q, [r, axis](const Point& x, double* out) {
    Point y(1);
    y(0) = x(axis);
    r.eval_into(y, out);
  });
}

}  // namespace

Regression marginal_model(const ModelSpec& model, int factor) {
  if (model.q() != 2 || factor < 0 || factor > 1) {
    throw NoConditionalModelError("marginal models exist only for the two-factor product families");
  }
  const DesignSpace space({model.space().axis(factor)});
  return std::visit(
      overloaded{
          [&](const family::ExpGrowth2f& f) {
            const double th = f.theta[static_cast<size_t>(factor) + 1];
            return Regression("exp-growth-marginal", 2, 1,
                              [th](const Point& x, double* out) {
                                out[0] = 1.0;
                                out[1] = x(0) * std::exp(-th * x(0));
                              },
                              space);
          },
          [&](const family::Interaction2f&) {
            return Regression("interaction-marginal", 2, 1,
                              [](const Point& x, double* out) {
                                out[0] = 1.0;
                                out[1] = x(0);
                              },
                              space);
          },
          [&](const family::ExpProduct2f& f) {
            const double th = f.theta[static_cast<size_t>(factor) + 1];
            return Regression("exp-product-marginal", 2, 1,
                              [th](const Point& x, double* out) {
                                const double e = std::exp(th * x(0));
                                out[0] = e;
                                out[1] = x(0) * e;
                              },
                              space);
          },
          [&](const family::MixturePolyExp& f) {
            if (factor == 0) {
              return Regression("mixture-cubic-marginal", 3, 1,
                                [](const Point& x, double* out) {
                                  out[0] = 1.0;
                                  out[1] = x(0);
                                  out[2] = x(0) * x(0) * x(0);
                                },
                                space);
            }
            const double th = f.theta3;
            return Regression("mixture-exp-marginal", 2, 1,
                              [th](const Point& x, double* out) {
                                out[0] = 1.0;
                                out[1] = x(0) * std::exp(-th * x(0));
                              },
                              space);
          },
          [&](const auto&) -> Regression {
            throw NoConditionalModelError("no marginal model registered for " + model.family_name());
          },
      },
      model.family());
}

ConditionalModel conditional_model(const ModelSpec& model, const SliceMap& tmap, double t) {
  const int q = model.q();
  const int k = model.k();
  ConditionalModel cm{Regression("constant", 1, q, [](const Point&, double* out) { out[0] = 1.0; }), Matrix(), t,
                      slice_text(tmap, t)};

  if (tmap.kind == SliceMap::Kind::coordinate) {
    if (tmap.axis >= q) throw ValidationError("slice axis exceeds the design dimension");
    if (q == 1) {
      Point x(1);
      x(0) = t;
      cm.C = model.eval_f_unchecked(x);
      return cm;
    }
    const int other = 1 - tmap.axis;
    const int j = tmap.axis;
    std::visit(
        overloaded{
            [&](const family::ExpGrowth2f& f) {
              cm.f_tilde = on_axis(marginal_model(model, other), other, q);
              cm.C = Matrix::Zero(3, 2);
              cm.C(0, 0) = 1.0;
              cm.C(1 + j, 0) = -t * std::exp(-f.theta[static_cast<size_t>(j) + 1] * t);
              cm.C(1 + other, 1) = -1.0;
            },
            [&](const family::Interaction2f&) {
              cm.f_tilde = on_axis(marginal_model(model, other), other, q);
              // f = (1, x1, x2, x1 x2)
              cm.C = Matrix::Zero(4, 2);
              cm.C(0, 0) = 1.0;
              cm.C(1 + j, 0) = t;
              cm.C(1 + other, 1) = 1.0;
              cm.C(3, 1) = t;
            },
            [&](const family::ExpProduct2f& f) {
              cm.f_tilde = on_axis(marginal_model(model, other), other, q);
              const double e = std::exp(f.theta[static_cast<size_t>(j) + 1] * t);
              cm.C = Matrix::Zero(3, 2);
              cm.C(0, 0) = e;
              cm.C(1 + j, 0) = e * f.theta[0] * t;
              cm.C(1 + other, 1) = e * f.theta[0];
            },
            [&](const family::MixturePolyExp& f) {
              cm.f_tilde = on_axis(marginal_model(model, other), other, q);
              if (j == 0) {
                cm.C = Matrix::Zero(4, 2);
                cm.C(0, 0) = 1.0;
                cm.C(1, 0) = t;
                cm.C(2, 0) = t * t * t;
                cm.C(3, 1) = -1.0;
              } else {
                cm.C = Matrix::Zero(4, 3);
                cm.C.topRows(3).setIdentity();
                cm.C(3, 0) = -t * std::exp(-f.theta3 * t);
              }
            },
            [&](const family::Linear2fNoIntercept&) {
              // f = (x1, x2); the fixed coordinate becomes an intercept unless t = 0.
              if (t != 0.0) {
                cm.f_tilde = Regression("linear-slice", 2, q, [other](const Point& x, double* out) {
                  out[0] = 1.0;
                  out[1] = x(other);
                });
                cm.C = Matrix::Zero(2, 2);
                cm.C(j, 0) = t;
                cm.C(other, 1) = 1.0;
              } else {
                cm.f_tilde = Regression("linear-slice", 1, q, [other](const Point& x, double* out) { out[0] = x(other); });
                cm.C = Matrix::Zero(2, 1);
                cm.C(other, 0) = 1.0;
              }
            },
            [&](const auto&) { no_model(model, tmap); },
        },
        model.family());
    (void)k;
    return cm;
  }

  // Linear maps.
  if (tmap.alpha.size() != q) throw ValidationError("slice map coefficients do not match the design dimension");
  std::visit(
      overloaded{
          [&](const family::Interaction2f&) {
            const double a1 = tmap.alpha(0), a2 = tmap.alpha(1);
            if (a1 == 0.0 || a2 == 0.0) no_model(model, tmap);
            // x2 = (t - a1 x1) / a2
            cm.f_tilde = Regression("interaction-diagonal-slice", 3, q, [](const Point& x, double* out) {
              out[0] = 1.0;
              out[1] = x(0);
              out[2] = x(0) * x(0);
            });
            cm.C = Matrix::Zero(4, 3);
            cm.C(0, 0) = 1.0;
            cm.C(1, 1) = 1.0;
            cm.C(2, 0) = t / a2;
            cm.C(2, 1) = -a1 / a2;
            cm.C(3, 1) = t / a2;
            cm.C(3, 2) = -a1 / a2;
          },
          [&](const family::ExpProduct2f& f) {
            // Only maps proportional to (theta1, theta2): the exponential factor is constant on the slice.
            const double s = tmap.alpha(0) / f.theta[1];
            if (std::abs(tmap.alpha(1) - s * f.theta[2]) > 1e-12 * std::max(1.0, std::abs(tmap.alpha(1)))) {
              no_model(model, tmap);
            }
            cm.f_tilde = Regression("exp-product-level-slice", 3, q, [](const Point& x, double* out) {
              out[0] = 1.0;
              out[1] = x(0);
              out[2] = x(1);
            });
            const double e = std::exp(t / s);
            cm.C = Matrix::Zero(3, 3);
            cm.C(0, 0) = e;
            cm.C(1, 1) = e * f.theta[0];
            cm.C(2, 2) = e * f.theta[0];
          },
          [&](const auto&) { no_model(model, tmap); },
      },
      model.family());
  return cm;
}

SliceDecomposition decompose(const Design& design, const SliceMap& tmap, const ModelSpec& model) {
  if (design.empty()) throw EmptyDesignError("decompose: empty design");
  std::vector<std::pair<double, size_t>> order;
  for (size_t i = 0; i < design.size(); ++i) order.emplace_back(tmap(design.atoms()[i].x), i);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SliceDecomposition out;
  size_t start = 0;
  while (start < order.size()) {
    size_t end = start + 1;
    while (end < order.size() && order[end].first - order[start].first <= tmap.tol) ++end;
    double mass = 0.0;
    for (size_t i = start; i < end; ++i) mass += design.atoms()[order[i].second].w;
    std::vector<Atom> atoms;
    for (size_t i = start; i < end; ++i) {
      const Atom& a = design.atoms()[order[i].second];
      atoms.push_back({a.x, a.w / mass});
    }
    const double t = order[start].first;
    out.slices.push_back(Slice{t, mass, Design(std::move(atoms)), conditional_model(model, tmap, t)});
    start = end;
  }
  return out;
}

double recompose_check(const Design& design, const SliceMap& tmap, const ModelSpec& model) {
  const SliceDecomposition dec = decompose(design, tmap, model);
  Matrix sum = Matrix::Zero(model.k(), model.k());
  for (const auto& s : dec.slices) {
    const Matrix mt = info_matrix(s.conditional_design, s.model.f_tilde);
    sum += s.marginal_weight * s.model.C * mt * s.model.C.transpose();
  }
  return linalg::max_abs(info_matrix(design, model) - sum);
}

Design marginal_design(const Design& design, int axis, double tol) {
  std::vector<std::pair<double, double>> vals;
  for (const auto& a : design.atoms()) {
    if (axis < 0 || axis >= a.x.size()) throw ValidationError("marginal_design: axis out of range");
    vals.emplace_back(a.x(axis), a.w);
  }
  std::stable_sort(vals.begin(), vals.end());
  std::vector<Atom> atoms;
  double start = 0.0;
  for (const auto& [v, w] : vals) {
    if (atoms.empty() || v - start > tol) {
      Point p(1);
      p(0) = v;
      atoms.push_back({p, 0.0});
      start = v;
    }
    atoms.back().w += w;
  }
  return Design(std::move(atoms));
}

Design product_of_marginals(const Design& first, const Design& second) {
  std::vector<Atom> atoms;
  for (const auto& a : first.atoms()) {
    for (const auto& b : second.atoms()) {
      Point p(a.x.size() + b.x.size());
      p << a.x, b.x;
      atoms.push_back({p, a.w * b.w});
    }
  }
  return Design(std::move(atoms));
}

}  // namespace optdesign
