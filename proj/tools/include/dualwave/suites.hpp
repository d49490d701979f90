#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dualwave::suites {

struct Outcome {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  /// One line per sub-check, "ok" or "FAIL" first.
  std::vector<std::string> lines;
  nlohmann::json report;
  nlohmann::json to_json() const;
};

struct Suite {
  int id;
  std::string name;
  double budget_seconds;
  Outcome (*run)();
};

/// The twelve acceptance suites in order.
const std::vector<Suite>& all();
/// Throws ConfigError for an unknown name.
const Suite& find(const std::string& name);
/// Runs the suite and fills id, name, timing; a suite that throws fails.
Outcome execute(const Suite& s);

}  // namespace dualwave::suites
