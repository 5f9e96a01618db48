#include "rmt/report.hpp"

#include <algorithm>

namespace rmt {

bool RunReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"pass", c.passed}, {"value", c.value}, {"tolerance", c.tolerance},
          {"detail", c.detail}};
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j{{"command", command}, {"inputs", inputs}, {"outputs", outputs}, {"wall_time", wall_time}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(rmt::to_json(c));
  if (!result.is_null()) j["result"] = result;
  return j;
}

}  // namespace rmt
