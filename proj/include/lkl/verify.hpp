#pragma once

#include <string>
#include <vector>

namespace lkl {

// One measured check; pass is decided by comparing residual with tolerance under relation.
struct Check {
  std::string suite;
  std::string name;
  std::string anchor;  // short label of the identity under test
  double residual = 0;
  double tolerance = 0;
  std::string relation = "<";  // "<": residual < tolerance, ">": residual > tolerance
  bool pass = false;
  int criterion = 0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<Check> checks;
};

// Acceptance criteria 1..12.
CriterionResult run_criterion(int id);
std::string criterion_title(int id);

// Named suites: consistency, kernels, series, residues, laurent, all.
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);
std::vector<int> suite_criteria(const std::string& name);
std::vector<Check> run_suite(const std::string& name);

// Line-delimited text form: suite=.. check=.. anchor=.. residual=.. status=..
std::string format_check_line(const Check& c);

}  // namespace lkl
