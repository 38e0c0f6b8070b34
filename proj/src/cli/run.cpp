#include <filesystem>
#include <iostream>
#include <sstream>

#include "optdesign/cli.hpp"
#include "optdesign/errors.hpp"

namespace optdesign::cli {

namespace {

using io::json;

json meta(const RunConfig& cfg, const io::LoadedModel& lm, const json& design) {
  json config{{"command", cfg.command},
              {"model", lm.source},
              {"design", design},
              {"criterion", cfg.criterion},
              {"tol", cfg.tol},
              {"seed", cfg.solver.seed},
              {"max_outer_iters", cfg.solver.max_outer_iters},
              {"slice_map", cfg.slice_map},
              {"budget", cfg.budget},
              {"product", cfg.product}};
  return json{{"optdesign_version", io::kVersion}, {"config_hash", io::config_hash(config)}, {"command", cfg.command}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Design require_design(const RunConfig& cfg) {
  if (cfg.design_path.empty()) throw ValidationError(cfg.command + " needs --design");
  return io::load_design(cfg.design_path);
}

Outcome do_solve(const RunConfig& cfg) {
  const auto lm = io::load_model(cfg.model_path);
  const Criterion c = Criterion::parse(cfg.criterion);
  SolverOptions opts = cfg.solver;
  opts.kkt_tol = cfg.tol;
  if (!cfg.init_design_path.empty()) opts.init_design = io::load_design(cfg.init_design_path);
  const SolveReport rep = solve(lm.model, lm.candidates, c, opts);

  Outcome out;
  out.report = meta(cfg, lm, opts.init_design ? io::design_to_json(*opts.init_design) : json(nullptr));
  out.report["model"] = io::model_to_json(lm.model, lm.candidates.resolution);
  out.report["result"] = io::solve_report_to_json(rep, c);
  if (cfg.round_n > 0) out.report["exact_design"] = io::exact_design_to_json(round_to_n(rep.design, cfg.round_n));
  out.files.emplace_back("solve_report.json", dump(out.report));
  out.files.emplace_back("design.json", dump(io::design_to_json(rep.design)));
  const Matrix m = info_matrix(rep.design, lm.model);
  if (!is_singular(m)) {
    const Certificate cert = build_certificate(c, m, lm.model, lm.candidates);
    const FeatureMatrix f = kernels::evaluate_features(lm.model, lm.candidates.points);
    out.files.emplace_back("sensitivity.csv", io::candidate_csv(lm.candidates, kernels::quadratic_forms(f, cert.N), "fNf"));
  }
  std::ostringstream os;
  os << "criterion " << c.name() << " value " << rep.criterion_value << ", " << rep.design.size() << " atoms, violation "
     << rep.max_sensitivity_violation << (rep.converged ? " (converged)" : " (NOT converged)");
  out.messages.push_back(os.str());
  out.exit_code = rep.converged ? kOk : kNotConverged;
  return out;
}

Outcome do_certify(const RunConfig& cfg, bool geometry) {
  const auto lm = io::load_model(cfg.model_path);
  const Criterion c = Criterion::parse(cfg.criterion);
  const Design d = require_design(cfg);
  const CertifyReport cr = certify(d, lm.model, lm.candidates, c, cfg.tol);
  Outcome out;
  out.report = meta(cfg, lm, io::design_to_json(d));
  out.report["criterion"] = c.name();
  out.report["certify"] = io::certify_report_to_json(cr);
  std::ostringstream os;
  os << "optimal=" << (cr.optimal ? "true" : "false") << " trace(MN)=" << cr.trace_mn
     << " phi*polar=" << cr.phi_times_polar << " max_violation=" << cr.max_violation;
  out.messages.push_back(os.str());
  for (const auto& w : cr.warnings) out.messages.push_back("warning: " + w);
  if (geometry) {
    if (!cr.optimal) {
      throw ValidationError("geometry needs a certified optimal design (max violation " +
                            std::to_string(cr.max_violation) + ")");
    }
    const PolytopeReport pr = polytope_report(cr.certificate, d, lm.model, lm.candidates, cfg.tol);
    out.report["polytope"] = io::polytope_to_json(pr);
    out.files.emplace_back("polytope.json", dump(out.report));
    out.messages.push_back(std::to_string(pr.hyperplanes.size()) + " active hyperplanes");
  } else {
    out.files.emplace_back("certify_report.json", dump(out.report));
    out.files.emplace_back("certificate.json", dump(io::certificate_to_json(cr.certificate)));
    out.files.emplace_back("sensitivity.csv", io::candidate_csv(lm.candidates, cr.candidate_sensitivities, "fNf"));
  }
  if (cr.truncation_warning) {
    out.messages.push_back("error: the truncated design space is too small; enlarge space.truncate and rerun");
    out.exit_code = kValidation;
  }
  return out;
}

Outcome do_garza(const RunConfig& cfg) {
  const auto lm = io::load_model(cfg.model_path);
  const GarzaReport gr = garza_report(lm.model, lm.candidates);
  Outcome out;
  out.report = meta(cfg, lm, nullptr);
  out.report["garza"] = io::garza_to_json(gr);
  if (const auto* es = std::get_if<family::ExponentialSum>(&lm.model.family())) {
    const SaturationCheck sc = exp_saturation_check(es->a, es->lambda);
    out.report["exp_saturation"] = {{"holds", sc.holds}, {"margins", sc.margins}};
  }
  out.files.emplace_back("garza.json", dump(out.report));
  out.files.emplace_back("norms.csv", io::candidate_csv(lm.candidates, gr.norm_values, "norm_sq"));
  out.messages.push_back(std::string("injective=") + (gr.injective ? "true" : "false") +
                         " saturation_bound=" + std::to_string(gr.saturation_bound));
  return out;
}

Outcome do_audit(const RunConfig& cfg) {
  const auto lm = io::load_model(cfg.model_path);
  const Design d = require_design(cfg);
  DominatorOptions opts;
  opts.budget = cfg.budget;
  Outcome out;
  out.report = meta(cfg, lm, io::design_to_json(d));
  bool inconclusive = false;
  if (cfg.product) {
    const ProductAudit pa = product_audit(d, lm.model, lm.candidates, opts);
    out.report["product_audit"] = io::product_audit_to_json(pa);
    for (const auto& f : pa.factors) {
      inconclusive = inconclusive || f.verdict.status == VerdictStatus::inconclusive;
      out.messages.push_back("factor " + std::to_string(f.factor) + ": " + to_string(f.verdict.status));
    }
    out.messages.push_back("support bound " + std::to_string(pa.support_bound));
  } else {
    const AdmissibilityVerdict v =
        cfg.slice_map.empty()
            ? find_dominator(d, lm.candidates, lm.model, opts)
            : conditional_audit(d, SliceMap::parse(cfg.slice_map), lm.model, lm.candidates, opts);
    out.report["verdict"] = io::verdict_to_json(v);
    inconclusive = v.status == VerdictStatus::inconclusive;
    out.messages.push_back("verdict: " + to_string(v.status));
  }
  out.files.emplace_back("audit.json", dump(out.report));
  out.exit_code = inconclusive ? kNotConverged : kOk;
  return out;
}

Outcome do_decompose(const RunConfig& cfg) {
  const auto lm = io::load_model(cfg.model_path);
  const Design d = require_design(cfg);
  if (cfg.slice_map.empty()) throw ValidationError("decompose needs --slice-map");
  const SliceMap tmap = SliceMap::parse(cfg.slice_map);
  const SliceDecomposition dec = decompose(d, tmap, lm.model);
  const double err = recompose_check(d, tmap, lm.model);
  Outcome out;
  out.report = meta(cfg, lm, io::design_to_json(d));
  out.report["decomposition"] = io::decomposition_to_json(dec, err);
  out.files.emplace_back("decomposition.json", dump(out.report));
  out.messages.push_back(std::to_string(dec.slices.size()) + " slices, recomposition error " + std::to_string(err));
  return out;
}

}  // namespace

Outcome execute(const RunConfig& cfg) {
  if (cfg.command != "examples" && cfg.model_path.empty()) throw ValidationError(cfg.command + " needs --model");
  if (cfg.command == "solve") return do_solve(cfg);
  if (cfg.command == "certify") return do_certify(cfg, false);
  if (cfg.command == "geometry") return do_certify(cfg, true);
  if (cfg.command == "garza") return do_garza(cfg);
  if (cfg.command == "audit") return do_audit(cfg);
  if (cfg.command == "decompose") return do_decompose(cfg);
  throw ValidationError("unknown command '" + cfg.command + "'");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "examples") {
      const auto rows = run_suite(cfg.suite_dir, cfg.filter);
      bool ok = true;
      for (const auto& r : rows) {
        out << (r.pass ? "PASS  " : "FAIL  ") << r.name;
        if (!r.detail.empty()) out << "  (" << r.detail << ")";
        out << "\n";
        ok = ok && r.pass;
      }
      out << rows.size() << " cases, " << (ok ? "all passed" : "failures present") << "\n";
      return ok ? kOk : kMismatch;
    }
    const Outcome o = execute(cfg);
    if (!cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      for (const auto& [name, content] : o.files) io::write_file((std::filesystem::path(cfg.out_dir) / name).string(), content);
    }
    for (const auto& m : o.messages) (m.rfind("error", 0) == 0 || m.rfind("warning", 0) == 0 ? err : out) << m << "\n";
    return o.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace optdesign::cli
