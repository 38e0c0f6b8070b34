#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "optdesign/io.hpp"

namespace optdesign::cli {

enum ExitCode { kOk = 0, kMismatch = 1, kValidation = 2, kNotConverged = 3 };

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string design_path;
  std::string init_design_path;
  std::string criterion = "D";
  SolverOptions solver;
  /// Certification tolerance; also the solver's kkt_tol.
  double tol = 1e-5;
  std::string out_dir;
  std::string slice_map;
  int budget = 500;
  bool product = false;
  long round_n = 0;
  std::string suite_dir;
  std::string filter = "*";
};

struct Outcome {
  int exit_code = kOk;
  io::json report;
  /// (file name, content) pairs written into the output directory.
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> messages;
};

/// Runs one analysis command without touching the file system for output.
Outcome execute(const RunConfig& cfg);

/// execute() plus report files and console output. Library errors map to
/// exit code 2 with the message on `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct SuiteRow {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the bundled cases whose names match `filter` (shell-style * and ?)
/// and compares them against their golden files.
std::vector<SuiteRow> run_suite(const std::string& suite_dir, const std::string& filter);

/// Numeric-tolerant comparison: every key of `expected` must match `actual`.
bool matches_golden(const io::json& expected, const io::json& actual, double tol, std::string& why);

bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace optdesign::cli
