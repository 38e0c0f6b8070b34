#include "optdesign/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "optdesign/errors.hpp"

namespace optdesign::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + std::string(key) + "' has the wrong type");
  }
}

template <size_t N>
std::array<double, N> fixed(const json& j, const char* key, const std::string& where) {
  const auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != N) throw ValidationError(where + ": '" + key + "' needs " + std::to_string(N) + " entries");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Efficiency efficiency_from_json(const json& j) {
  Efficiency e;
  const auto kind = get<std::string>(j, "kind", "efficiency");
  if (kind == "constant") {
    e.kind = Efficiency::Kind::constant;
  } else if (kind == "exp") {
    e.kind = Efficiency::Kind::exponential;
  } else if (kind == "linear") {
    e.kind = Efficiency::Kind::linear;
  } else {
    throw ValidationError("efficiency: unknown kind '" + kind + "'");
  }
  e.c0 = j.value("c0", 1.0);
  e.c1 = j.value("c1", e.kind == Efficiency::Kind::constant ? 0.0 : 1.0);
  return e;
}

json efficiency_to_json(const Efficiency& e) {
  switch (e.kind) {
    case Efficiency::Kind::constant: return json{{"kind", "constant"}, {"c0", e.c0}};
    case Efficiency::Kind::exponential: return json{{"kind", "exp"}, {"c0", e.c0}, {"c1", e.c1}};
    case Efficiency::Kind::linear: return json{{"kind", "linear"}, {"c0", e.c0}, {"c1", e.c1}};
  }
  return json();
}

Point point_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("point must be a nonempty array");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError("point coordinates must be numbers");
    p(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return p;
}

json point_to_json(const Point& p) {
  json out = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(p(i));
  return out;
}

}  // namespace

LoadedModel model_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("model file must hold a JSON object");
  const auto fam = get<std::string>(j, "family", "model");
  const json params = j.value("params", json::object());
  const json space_j = j.value("space", json::object());

  std::optional<DesignSpace> space;
  if (space_j.contains("bounds")) {
    std::vector<Interval> bounds;
    for (const auto& b : space_j.at("bounds")) {
      if (!b.is_array() || b.size() != 2 || !b[0].is_number()) throw ValidationError("space bounds must be [lo, hi]");
      bounds.push_back(Interval{b[0].get<double>(), b[1].is_null() ? kInf : b[1].get<double>()});
    }
    space = DesignSpace(bounds);
  }

  auto model = [&]() -> ModelSpec {
    const std::string where = "params of " + fam;
    if (fam == "polynomial") {
      return ModelSpec::polynomial(get<int>(params, "degree", where), space.value_or(DesignSpace::unit_box(1)));
    }
    if (fam == "weighted-polynomial") {
      const Efficiency e = params.contains("efficiency") ? efficiency_from_json(params.at("efficiency")) : Efficiency{};
      return ModelSpec::weighted_polynomial(get<int>(params, "degree", where), e,
                                            space.value_or(DesignSpace::unit_box(1)));
    }
    if (fam == "linear-2f-no-intercept") return ModelSpec::linear_2f_no_intercept(space.value_or(DesignSpace::unit_box(2)));
    if (fam == "interaction-2f") return ModelSpec::interaction_2f(space.value_or(DesignSpace::unit_box(2)));
    if (fam == "exponential-sum") {
      auto a = get<std::vector<double>>(params, "a", where);
      auto l = get<std::vector<double>>(params, "lambda", where);
      return space ? ModelSpec::exponential_sum(a, l, *space) : ModelSpec::exponential_sum(a, l);
    }
    if (fam == "exp-growth-2f") {
      return ModelSpec::exp_growth_2f(fixed<3>(params, "theta", where), space.value_or(DesignSpace::unit_box(2)));
    }
    if (fam == "exp-product-2f") {
      return ModelSpec::exp_product_2f(fixed<3>(params, "theta", where), fixed<2>(params, "b", where));
    }
    if (fam == "mixture-poly-exp") {
      const double th = get<double>(params, "theta3", where);
      return space ? ModelSpec::mixture_poly_exp(th, *space) : ModelSpec::mixture_poly_exp(th);
    }
    throw ValidationError("unknown model family '" + fam + "'");
  }();

  // Unbounded exponential axes get the default truncation.
  if (!model.space().bounded()) {
    if (!std::holds_alternative<family::ExponentialSum>(model.family())) {
      throw MustTruncateError(fam + ": unbounded design space must be truncated");
    }
    const double hi = space_j.contains("truncate") ? space_j.at("truncate").get<double>()
                                                   : default_exponential_truncation(model);
    model = model.with_space(truncate(model.space(), 0, hi));
  }

  std::vector<double> steps(static_cast<size_t>(model.q()), 0.01);
  if (space_j.contains("steps")) {
    steps = get<std::vector<double>>(space_j, "steps", "space");
    if (static_cast<int>(steps.size()) != model.q()) throw ValidationError("space: need one step per axis");
  }
  CandidateSet cands = discretize(model.space(), steps);
  return LoadedModel{model, std::move(cands), j};
}

LoadedModel load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return model_from_json(j);
}

json model_to_json(const ModelSpec& model, const std::vector<double>& steps) {
  json params = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Polynomial>) return {{"degree", f.degree}};
        if constexpr (std::is_same_v<T, family::WeightedPolynomial>)
          return {{"degree", f.degree}, {"efficiency", efficiency_to_json(f.efficiency)}};
        if constexpr (std::is_same_v<T, family::ExponentialSum>) return {{"a", f.a}, {"lambda", f.lambda}};
        if constexpr (std::is_same_v<T, family::ExpGrowth2f>) return {{"theta", f.theta}};
        if constexpr (std::is_same_v<T, family::ExpProduct2f>) return {{"theta", f.theta}, {"b", f.b}};
        if constexpr (std::is_same_v<T, family::MixturePolyExp>) return {{"theta3", f.theta3}};
        return json::object();
      },
      model.family());
  json bounds = json::array();
  for (const auto& b : model.space().bounds()) {
    bounds.push_back(json::array({b.lo, b.bounded() ? json(b.hi) : json(nullptr)}));
  }
  json out{{"family", model.family_name()}, {"params", params}, {"space", {{"bounds", bounds}, {"steps", steps}}}};
  if (model.space().truncation_note()) out["space"]["truncation_note"] = *model.space().truncation_note();
  return out;
}

Design design_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array()) {
    throw ValidationError("design file must hold {\"atoms\": [...]}");
  }
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.contains("x")) throw ValidationError("design atom lacks 'x'");
    atoms.push_back({point_from_json(a.at("x")), get<double>(a, "w", "design atom")});
  }
  return Design(std::move(atoms));
}

Design load_design(const std::string& path) {
  try {
    return design_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json design_to_json(const Design& d) {
  json atoms = json::array();
  for (const auto& a : d.atoms()) atoms.push_back({{"x", point_to_json(a.x)}, {"w", a.w}});
  return json{{"atoms", atoms}};
}

json exact_design_to_json(const ExactDesign& d) {
  json atoms = json::array();
  for (size_t i = 0; i < d.points.size(); ++i) {
    atoms.push_back({{"x", point_to_json(d.points[i])}, {"reps", d.reps[i]}});
  }
  return json{{"atoms", atoms}, {"n", d.n}};
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json solve_report_to_json(const SolveReport& r, const Criterion& c) {
  return json{{"criterion", c.name()},
              {"design", design_to_json(r.design)},
              {"criterion_value", r.criterion_value},
              {"iterations", r.iterations},
              {"max_sensitivity_violation", r.max_sensitivity_violation},
              {"converged", r.converged},
              {"history", r.history},
              {"notes", r.notes}};
}

json certificate_to_json(const Certificate& cert) {
  return json{{"N", matrix_to_json(cert.N)},
              {"Z", matrix_to_json(cert.Z)},
              {"Lambda", vector_to_json(cert.Lambda)},
              {"bound", cert.bound},
              {"residual", cert.residual},
              {"eigenspace_dim", cert.eigenspace_dim}};
}

json certify_report_to_json(const CertifyReport& r) {
  json out{{"optimal", r.optimal},
           {"tol", r.tol},
           {"duality_products", {{"trace_MN", r.trace_mn}, {"phi_times_polar", r.phi_times_polar}}},
           {"max_violation", r.max_violation},
           {"violating_point", r.violating_point ? point_to_json(*r.violating_point) : json(nullptr)},
           {"support_equalities", r.support_sensitivities},
           {"max_support_gap", r.max_support_gap},
           {"truncation_warning", r.truncation_warning},
           {"warnings", r.warnings},
           {"certificate", certificate_to_json(r.certificate)}};
  return out;
}

json polytope_to_json(const PolytopeReport& r) {
  json hps = json::array();
  for (const auto& h : r.hyperplanes) {
    json active = json::array();
    for (const auto& p : h.active_support) active.push_back(point_to_json(p));
    hps.push_back({{"c", vector_to_json(h.c)}, {"active_support", active}, {"lengths", h.lengths}});
  }
  json groups = json::array();
  for (const auto& g : r.length_groups) {
    json pts = json::array();
    for (const auto& p : g) pts.push_back(point_to_json(p));
    groups.push_back(pts);
  }
  return json{{"hyperplanes", hps},
              {"length_groups", groups},
              {"max_candidate_constraint", r.max_candidate_constraint},
              {"max_length_spread", r.max_length_spread}};
}

json garza_to_json(const GarzaReport& r) {
  return json{{"injective", r.injective},
              {"max_equal_group_size", r.max_equal_group_size},
              {"saturation_bound", r.saturation_bound},
              {"monotone_axis_note", r.monotone_axis_note ? json(*r.monotone_axis_note) : json(nullptr)}};
}

json verdict_to_json(const AdmissibilityVerdict& v) {
  json ev = json::array();
  for (const auto& e : v.evidence) {
    ev.push_back({{"t", e.t},
                  {"status", to_string(e.status)},
                  {"dominator", e.dominator ? design_to_json(*e.dominator) : json(nullptr)}});
  }
  return json{{"status", to_string(v.status)},
              {"admissible", v.admissible()},
              {"dominator", v.dominator ? design_to_json(*v.dominator) : json(nullptr)},
              {"method", v.method},
              {"evidence", ev},
              {"note", v.note}};
}

json product_audit_to_json(const ProductAudit& a) {
  json factors = json::array();
  for (const auto& f : a.factors) {
    factors.push_back({{"factor", f.factor}, {"marginal", design_to_json(f.marginal)}, {"verdict", verdict_to_json(f.verdict)}});
  }
  return json{{"factors", factors}, {"support_bound", a.support_bound}, {"note", a.note}};
}

json decomposition_to_json(const SliceDecomposition& d, double recompose_error) {
  json slices = json::array();
  for (const auto& s : d.slices) {
    slices.push_back({{"t", s.t},
                      {"marginal_weight", s.marginal_weight},
                      {"conditional_design", design_to_json(s.conditional_design)},
                      {"conditional_dimension", s.model.C.cols()},
                      {"conditional_model", s.model.f_tilde.name()},
                      {"slice_space", s.model.slice_space},
                      {"C", matrix_to_json(s.model.C)}});
  }
  return json{{"slices", slices}, {"recompose_error", recompose_error}};
}

std::string candidate_csv(const CandidateSet& candidates, const Vector& values, const std::string& value_name) {
  std::ostringstream os;
  os << std::setprecision(17);
  const int q = candidates.space.dimension();
  for (int j = 0; j < q; ++j) os << "x" << j << ",";
  os << value_name << "\n";
  for (size_t i = 0; i < candidates.size(); ++i) {
    for (int j = 0; j < q; ++j) os << candidates.points[i](j) << ",";
    os << values(static_cast<Eigen::Index>(i)) << "\n";
  }
  return os.str();
}

std::string config_hash(const json& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
}

}  // namespace optdesign::io
