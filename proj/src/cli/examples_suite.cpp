#include <algorithm>
#include <cmath>
#include <filesystem>

#include "optdesign/cli.hpp"
#include "optdesign/errors.hpp"

namespace optdesign::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

json sorted_atoms(const json& design) {
  std::vector<json> atoms(design.at("atoms").begin(), design.at("atoms").end());
  std::sort(atoms.begin(), atoms.end(), [](const json& a, const json& b) {
    return a.at("x").get<std::vector<double>>() < b.at("x").get<std::vector<double>>();
  });
  return json(atoms);
}

/// Comparable subset of a full report.
json summarize(const std::string& command, const json& report) {
  if (command == "solve") {
    const json& r = report.at("result");
    return {{"atoms", sorted_atoms(r.at("design"))}, {"converged", r.at("converged")}};
  }
  if (command == "certify") {
    const json& r = report.at("certify");
    return {{"optimal", r.at("optimal")},
            {"trace_MN", r.at("duality_products").at("trace_MN")},
            {"phi_times_polar", r.at("duality_products").at("phi_times_polar")}};
  }
  if (command == "geometry") {
    std::vector<json> hps;
    for (const auto& h : report.at("polytope").at("hyperplanes")) {
      std::vector<std::vector<double>> act;
      for (const auto& p : h.at("active_support")) act.push_back(p.get<std::vector<double>>());
      std::sort(act.begin(), act.end());
      hps.push_back({{"c", h.at("c")}, {"active_support", act}});
    }
    std::sort(hps.begin(), hps.end(), [](const json& a, const json& b) {
      return a.at("c").get<std::vector<double>>() < b.at("c").get<std::vector<double>>();
    });
    return {{"hyperplanes", hps}};
  }
  if (command == "garza") {
    const json& g = report.at("garza");
    return {{"injective", g.at("injective")},
            {"saturation_bound", g.at("saturation_bound")},
            {"max_equal_group_size", g.at("max_equal_group_size")}};
  }
  if (command == "decompose") {
    json slices = json::array();
    for (const auto& s : report.at("decomposition").at("slices")) {
      slices.push_back({{"t", s.at("t")},
                        {"marginal_weight", s.at("marginal_weight")},
                        {"conditional_dimension", s.at("conditional_dimension")}});
    }
    return {{"slices", slices}, {"recompose_ok", report.at("decomposition").at("recompose_error").get<double>() <= 1e-10}};
  }
  if (command == "audit") {
    if (report.contains("product_audit")) {
      json factors = json::array();
      for (const auto& f : report.at("product_audit").at("factors")) {
        factors.push_back({{"factor", f.at("factor")}, {"status", f.at("verdict").at("status")}});
      }
      return {{"factors", factors}, {"support_bound", report.at("product_audit").at("support_bound")}};
    }
    const json& v = report.at("verdict");
    json out{{"status", v.at("status")}};
    if (!v.at("dominator").is_null()) out["dominator"] = sorted_atoms(v.at("dominator"));
    return out;
  }
  throw ValidationError("suite: unsupported command '" + command + "'");
}

}  // namespace

bool glob_match(const std::string& pattern, const std::string& text) {
  size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

bool matches_golden(const json& expected, const json& actual, double tol, std::string& why) {
  if (expected.is_number()) {
    if (!actual.is_number()) {
      why = "expected a number, got " + actual.dump();
      return false;
    }
    const double e = expected.get<double>(), a = actual.get<double>();
    if (std::abs(e - a) > tol) {
      why = "expected " + expected.dump() + ", got " + actual.dump();
      return false;
    }
    return true;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size()) {
      why = "array length differs: expected " + std::to_string(expected.size()) + ", got " +
            (actual.is_array() ? std::to_string(actual.size()) : actual.dump());
      return false;
    }
    for (size_t i = 0; i < expected.size(); ++i) {
      if (!matches_golden(expected[i], actual[i], tol, why)) {
        why = "[" + std::to_string(i) + "] " + why;
        return false;
      }
    }
    return true;
  }
  if (expected.is_object()) {
    if (!actual.is_object()) {
      why = "expected an object";
      return false;
    }
    for (const auto& [key, val] : expected.items()) {
      if (!actual.contains(key)) {
        why = "missing key '" + key + "'";
        return false;
      }
      if (!matches_golden(val, actual.at(key), tol, why)) {
        why = key + ": " + why;
        return false;
      }
    }
    return true;
  }
  if (expected != actual) {
    why = "expected " + expected.dump() + ", got " + actual.dump();
    return false;
  }
  return true;
}

std::vector<SuiteRow> run_suite(const std::string& suite_dir, const std::string& filter) {
  const fs::path dir(suite_dir.empty() ? std::string(OPTDESIGN_SUITE_DIR) : suite_dir);
  const json suite = json::parse(io::read_file((dir / "suite.json").string()));
  std::vector<SuiteRow> rows;
  for (const auto& c : suite.at("cases")) {
    const std::string name = c.at("name").get<std::string>();
    if (!glob_match(filter, name)) continue;
    SuiteRow row{name, false, ""};
    try {
      RunConfig cfg;
      cfg.command = c.at("command").get<std::string>();
      cfg.model_path = (dir / c.at("model").get<std::string>()).string();
      if (c.contains("design")) cfg.design_path = (dir / c.at("design").get<std::string>()).string();
      cfg.criterion = c.value("criterion", std::string("D"));
      cfg.slice_map = c.value("slice_map", std::string());
      cfg.product = c.value("product", false);
      cfg.budget = c.value("budget", 500);
      const Outcome o = execute(cfg);
      const json golden = json::parse(io::read_file((dir / c.at("golden").get<std::string>()).string()));
      const json summary = summarize(cfg.command, o.report);
      row.pass = matches_golden(golden.at("expect"), summary, golden.value("tolerance", 1e-4), row.detail);
    } catch (const std::exception& e) {
      row.pass = false;
      row.detail = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace optdesign::cli
