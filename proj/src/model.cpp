#include "optdesign/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// DesignSpace

DesignSpace::DesignSpace(std::vector<Interval> bounds)
    : bounds_(std::move(bounds)), truncated_(bounds_.size(), false) {
  if (bounds_.empty()) throw ValidationError("design space needs at least one axis");
  for (const auto& iv : bounds_) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !std::isfinite(iv.lo)) {
      throw ValidationError("design space bounds must be finite below");
    }
    if (iv.lo > iv.hi) throw ValidationError("design space axis has lo > hi");
  }
}

bool DesignSpace::bounded() const {
  return std::all_of(bounds_.begin(), bounds_.end(), [](const Interval& iv) { return iv.bounded(); });
}

bool DesignSpace::contains(const Point& x, double rel_tol) const {
  if (x.size() != dimension()) return false;
  for (int j = 0; j < dimension(); ++j) {
    const auto& iv = bounds_[static_cast<size_t>(j)];
    if (!std::isfinite(x(j))) return false;
    const double slack = rel_tol * std::max(1.0, std::abs(iv.lo));
    if (x(j) < iv.lo - slack) return false;
    if (iv.bounded() && x(j) > iv.hi + rel_tol * std::max(1.0, std::abs(iv.hi))) return false;
  }
  return true;
}

DesignSpace DesignSpace::unit_box(int q) {
  return DesignSpace(std::vector<Interval>(static_cast<size_t>(q), Interval{0.0, 1.0}));
}

DesignSpace truncate(const DesignSpace& space, int axis, double new_hi) {
  if (axis < 0 || axis >= space.dimension()) throw ValidationError("truncate: axis out of range");
  const Interval old = space.axis(axis);
  if (!std::isfinite(new_hi) || new_hi <= old.lo) {
    throw ValidationError("truncate: new upper bound must be finite and above the lower bound");
  }
  DesignSpace out = space;
  if (old.bounded()) {
    const std::string entry = "axis " + std::to_string(axis) + " already bounded at " + fmt_double(old.hi) +
                              "; truncation at " + fmt_double(new_hi) + " ignored";
    out.note_ = space.note_ ? *space.note_ + "; " + entry : entry;
    return out;
  }
  out.bounds_[static_cast<size_t>(axis)].hi = new_hi;
  out.truncated_[static_cast<size_t>(axis)] = true;
  std::string entry = "axis " + std::to_string(axis) + ": [" + fmt_double(old.lo) + ", inf) truncated at " +
                      fmt_double(new_hi);
  out.note_ = space.note_ ? *space.note_ + "; " + entry : entry;
  return out;
}

// ---------------------------------------------------------------------------
// Candidates

double CandidateSet::min_step() const {
  if (resolution.empty()) return 0.0;
  return *std::min_element(resolution.begin(), resolution.end());
}

CandidateSet discretize(const DesignSpace& space, const std::vector<double>& steps) {
  const int q = space.dimension();
  if (static_cast<int>(steps.size()) != q) {
    throw ValidationError("discretize: need one step per axis");
  }
  std::vector<std::vector<double>> axes(static_cast<size_t>(q));
  for (int j = 0; j < q; ++j) {
    const Interval& iv = space.axis(j);
    if (!iv.bounded()) {
      throw MustTruncateError("discretize: axis " + std::to_string(j) +
                              " is unbounded; truncate it first");
    }
    const double step = steps[static_cast<size_t>(j)];
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("discretize: steps must be positive");
    auto& ax = axes[static_cast<size_t>(j)];
    const double span = iv.hi - iv.lo;
    const auto count = static_cast<long>(std::floor(span / step + 1e-9));
    for (long i = 0; i <= count; ++i) ax.push_back(iv.lo + static_cast<double>(i) * step);
    // The last grid node is snapped onto hi; a non-divisible span adds hi as an extra node.
    if (std::abs(ax.back() - iv.hi) <= 1e-9 * step) {
      ax.back() = iv.hi;
    } else {
      ax.push_back(iv.hi);
    }
  }
  CandidateSet out{space, {}, steps};
  size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  out.points.reserve(total);
  std::vector<size_t> idx(static_cast<size_t>(q), 0);
  for (size_t n = 0; n < total; ++n) {
    Point x(q);
    for (int j = 0; j < q; ++j) x(j) = axes[static_cast<size_t>(j)][idx[static_cast<size_t>(j)]];
    out.points.push_back(std::move(x));
    for (int j = q - 1; j >= 0; --j) {
      if (++idx[static_cast<size_t>(j)] < axes[static_cast<size_t>(j)].size()) break;
      idx[static_cast<size_t>(j)] = 0;
    }
  }
  return out;
}

CandidateSet make_candidates(const DesignSpace& space, std::vector<Point> points,
                             std::vector<double> resolution) {
  if (points.empty()) throw ValidationError("candidate set must be nonempty");
  for (const auto& p : points) {
    if (!space.contains(p)) throw DomainError("candidate point outside the design space");
  }
  return CandidateSet{space, std::move(points), std::move(resolution)};
}

// ---------------------------------------------------------------------------
// Efficiency

double Efficiency::operator()(double x) const {
  switch (kind) {
    case Kind::constant: return c0;
    case Kind::exponential: return c0 * std::exp(c1 * x);
    case Kind::linear: return c0 + c1 * x;
  }
  return c0;
}

std::string Efficiency::describe() const {
  switch (kind) {
    case Kind::constant: return "constant(" + fmt_double(c0) + ")";
    case Kind::exponential: return fmt_double(c0) + "*exp(" + fmt_double(c1) + "x)";
    case Kind::linear: return fmt_double(c0) + "+" + fmt_double(c1) + "x";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec::ModelSpec(Family family, DesignSpace space) : family_(std::move(family)), space_(std::move(space)) {
  validate();
}

ModelSpec ModelSpec::polynomial(int degree, DesignSpace space) {
  return ModelSpec(family::Polynomial{degree}, std::move(space));
}
ModelSpec ModelSpec::weighted_polynomial(int degree, Efficiency efficiency, DesignSpace space) {
  return ModelSpec(family::WeightedPolynomial{degree, efficiency}, std::move(space));
}
ModelSpec ModelSpec::linear_2f_no_intercept(DesignSpace space) {
  return ModelSpec(family::Linear2fNoIntercept{}, std::move(space));
}
ModelSpec ModelSpec::interaction_2f(DesignSpace space) {
  return ModelSpec(family::Interaction2f{}, std::move(space));
}
ModelSpec ModelSpec::exponential_sum(std::vector<double> a, std::vector<double> lambda) {
  return exponential_sum(std::move(a), std::move(lambda), DesignSpace({Interval{0.0, kInf}}));
}
ModelSpec ModelSpec::exponential_sum(std::vector<double> a, std::vector<double> lambda,
                                     DesignSpace space) {
  return ModelSpec(family::ExponentialSum{std::move(a), std::move(lambda)}, std::move(space));
}
ModelSpec ModelSpec::exp_growth_2f(std::array<double, 3> theta, DesignSpace space) {
  return ModelSpec(family::ExpGrowth2f{theta}, std::move(space));
}
ModelSpec ModelSpec::exp_product_2f(std::array<double, 3> theta, std::array<double, 2> b) {
  return ModelSpec(family::ExpProduct2f{theta, b},
                   DesignSpace({Interval{0.0, b[0]}, Interval{0.0, b[1]}}));
}
ModelSpec ModelSpec::mixture_poly_exp(double theta3) {
  return mixture_poly_exp(theta3, DesignSpace({Interval{-1.0, 1.0}, Interval{0.0, 2.0}}));
}
ModelSpec ModelSpec::mixture_poly_exp(double theta3, DesignSpace space) {
  return ModelSpec(family::MixturePolyExp{theta3}, std::move(space));
}

ModelSpec ModelSpec::with_space(DesignSpace space) const { return ModelSpec(family_, std::move(space)); }

std::string ModelSpec::family_name() const {
  return std::visit(overloaded{
                        [](const family::Polynomial&) { return std::string("polynomial"); },
                        [](const family::WeightedPolynomial&) { return std::string("weighted-polynomial"); },
                        [](const family::Linear2fNoIntercept&) { return std::string("linear-2f-no-intercept"); },
                        [](const family::Interaction2f&) { return std::string("interaction-2f"); },
                        [](const family::ExponentialSum&) { return std::string("exponential-sum"); },
                        [](const family::ExpGrowth2f&) { return std::string("exp-growth-2f"); },
                        [](const family::ExpProduct2f&) { return std::string("exp-product-2f"); },
                        [](const family::MixturePolyExp&) { return std::string("mixture-poly-exp"); },
                    },
                    family_);
}

void ModelSpec::validate() {
  auto need_q = [&](int q) {
    if (space_.dimension() != q) {
      throw ValidationError(family_name() + ": design space must have dimension " + std::to_string(q));
    }
  };
  k_ = std::visit(
      overloaded{
          [&](const family::Polynomial& f) {
            need_q(1);
            if (f.degree < 0) throw ValidationError("polynomial: degree must be >= 0");
            return f.degree + 1;
          },
          [&](const family::WeightedPolynomial& f) {
            need_q(1);
            if (f.degree < 0) throw ValidationError("weighted-polynomial: degree must be >= 0");
            if (!std::isfinite(f.efficiency.c0) || !std::isfinite(f.efficiency.c1)) {
              throw ValidationError("weighted-polynomial: efficiency parameters must be finite");
            }
            // Positivity on a bounded interval: lambda is monotone, endpoints suffice.
            const Interval& iv = space_.axis(0);
            const double hi = iv.bounded() ? iv.hi : iv.lo;
            if (f.efficiency(iv.lo) <= 0.0 || f.efficiency(hi) <= 0.0 ||
                (!iv.bounded() && f.efficiency.kind == Efficiency::Kind::linear && f.efficiency.c1 < 0)) {
              throw ValidationError("weighted-polynomial: efficiency function must be positive on the design space");
            }
            return f.degree + 1;
          },
          [&](const family::Linear2fNoIntercept&) {
            need_q(2);
            return 2;
          },
          [&](const family::Interaction2f&) {
            need_q(2);
            return 4;
          },
          [&](const family::ExponentialSum& f) {
            need_q(1);
            if (f.a.empty() || f.a.size() != f.lambda.size()) {
              throw ValidationError("exponential-sum: a and lambda must be nonempty and of equal length");
            }
            for (size_t i = 0; i < f.a.size(); ++i) {
              if (!std::isfinite(f.a[i]) || f.a[i] == 0.0) throw ValidationError("exponential-sum: a_l must be nonzero");
              if (!(f.lambda[i] > 0.0) || !std::isfinite(f.lambda[i])) {
                throw ValidationError("exponential-sum: lambda_l must be positive");
              }
              if (i > 0 && !(f.lambda[i] > f.lambda[i - 1])) {
                throw ValidationError("exponential-sum: lambda must be strictly increasing");
              }
            }
            return static_cast<int>(2 * f.a.size());
          },
          [&](const family::ExpGrowth2f& f) {
            need_q(2);
            if (!std::isfinite(f.theta[0])) throw ValidationError("exp-growth-2f: theta0 must be finite");
            if (!(f.theta[1] >= 1.0) || !(f.theta[2] >= 1.0) || !std::isfinite(f.theta[1]) ||
                !std::isfinite(f.theta[2])) {
              throw ValidationError("exp-growth-2f: theta1 and theta2 must be >= 1");
            }
            return 3;
          },
          [&](const family::ExpProduct2f& f) {
            need_q(2);
            for (double t : f.theta) {
              if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("exp-product-2f: theta must be positive");
            }
            for (double b : f.b) {
              if (!(b > 0.0) || !std::isfinite(b)) throw ValidationError("exp-product-2f: b must be positive");
            }
            return 3;
          },
          [&](const family::MixturePolyExp& f) {
            need_q(2);
            if (!(f.theta3 > 0.0) || !std::isfinite(f.theta3)) {
              throw ValidationError("mixture-poly-exp: theta3 must be positive");
            }
            return 4;
          },
      },
      family_);
}

Vector ModelSpec::eval_f(const Point& x) const {
  if (x.size() != q()) throw DomainError(family_name() + ": point has wrong dimension");
  if (!space_.contains(x)) throw DomainError(family_name() + ": point outside the design space");
  return eval_f_unchecked(x);
}

Vector ModelSpec::eval_f_unchecked(const Point& x) const {
  Vector out(k_);
  eval_f_into(x, out.data());
  return out;
}

void ModelSpec::eval_f_into(const Point& x, double* out) const {
  std::visit(overloaded{
                 [&](const family::Polynomial& f) {
                   double p = 1.0;
                   for (int i = 0; i <= f.degree; ++i, p *= x(0)) out[i] = p;
                 },
                 [&](const family::WeightedPolynomial& f) {
                   const double s = std::sqrt(f.efficiency(x(0)));
                   double p = s;
                   for (int i = 0; i <= f.degree; ++i, p *= x(0)) out[i] = p;
                 },
                 [&](const family::Linear2fNoIntercept&) {
                   out[0] = x(0);
                   out[1] = x(1);
                 },
                 [&](const family::Interaction2f&) {
                   out[0] = 1.0;
                   out[1] = x(0);
                   out[2] = x(1);
                   out[3] = x(0) * x(1);
                 },
                 [&](const family::ExponentialSum& f) {
                   for (size_t l = 0; l < f.a.size(); ++l) {
                     const double e = std::exp(-f.lambda[l] * x(0));
                     out[2 * l] = e;
                     out[2 * l + 1] = -f.a[l] * x(0) * e;
                   }
                 },
                 [&](const family::ExpGrowth2f& f) {
                   out[0] = 1.0;
                   out[1] = -x(0) * std::exp(-f.theta[1] * x(0));
                   out[2] = -x(1) * std::exp(-f.theta[2] * x(1));
                 },
                 [&](const family::ExpProduct2f& f) {
                   const double e = std::exp(f.theta[1] * x(0) + f.theta[2] * x(1));
                   out[0] = e;
                   out[1] = f.theta[0] * x(0) * e;
                   out[2] = f.theta[0] * x(1) * e;
                 },
                 [&](const family::MixturePolyExp& f) {
                   out[0] = 1.0;
                   out[1] = x(0);
                   out[2] = x(0) * x(0) * x(0);
                   out[3] = -x(1) * std::exp(-f.theta3 * x(1));
                 },
             },
             family_);
}

double ModelSpec::eval_efficiency(const Point& x) const {
  const auto* wp = std::get_if<family::WeightedPolynomial>(&family_);
  if (wp == nullptr) throw ValidationError("eval_efficiency: family is not weighted-polynomial");
  if (!space_.contains(x)) throw DomainError("eval_efficiency: point outside the design space");
  const double v = wp->efficiency(x(0));
  if (!(v > 0.0)) throw ValidationError("eval_efficiency: efficiency must be positive");
  return v;
}

double default_exponential_truncation(const ModelSpec& model) {
  const auto* es = std::get_if<family::ExponentialSum>(&model.family());
  if (es == nullptr) throw ValidationError("default truncation applies to exponential-sum models only");
  return 3.0 / es->lambda.front();
}

}  // namespace optdesign

namespace optdesign {

Regression::Regression(std::string name, int k, int q, EvalFn eval, std::optional<DesignSpace> space)
    : name_(std::move(name)), k_(k), q_(q), eval_(std::move(eval)), space_(std::move(space)) {
  if (k_ < 1 || q_ < 1) throw ValidationError("regression needs k >= 1 and q >= 1");
}

Regression::Regression(const ModelSpec& model)
    : Regression(model.family_name(), model.k(), model.q(),
                 [model](const Point& x, double* out) { model.eval_f_into(x, out); }, model.space()) {}

Vector Regression::operator()(const Point& x) const {
  if (x.size() != q_) throw DomainError(name_ + ": point has wrong dimension");
  if (space_ && !space_->contains(x)) throw DomainError(name_ + ": point outside the design space");
  Vector out(k_);
  eval_(x, out.data());
  return out;
}

}  // namespace optdesign
