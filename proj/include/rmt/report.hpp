#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rmt {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Machine-readable record of one CLI invocation.
struct RunReport {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::vector<CheckResult> checks;
  /// Command-specific payload; omitted when null.
  nlohmann::json result;
  double wall_time = 0.0;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const CheckResult& c);

}  // namespace rmt
