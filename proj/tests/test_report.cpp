#include <doctest.h>

#include "rmt/report.hpp"

using namespace rmt;

TEST_SUITE("report") {

TEST_CASE("report json layout") {
  RunReport r;
  r.command = "support";
  r.inputs = {{"c", 0.5}};
  r.outputs = {"a.json"};
  r.checks.push_back({"x", true, 1.0, 2.0, "fine"});
  r.wall_time = 0.25;
  const auto j = r.to_json();
  CHECK(j["command"] == "support");
  CHECK(j["outputs"][0] == "a.json");
  CHECK(j["checks"][0]["pass"] == true);
  CHECK(j["checks"][0]["tolerance"] == 2.0);
  CHECK_FALSE(j.contains("result"));
  CHECK(r.all_passed());
  r.result = {{"k", 1}};
  r.checks.push_back({"y", false, 3.0, 1.0, {}});
  CHECK_FALSE(r.all_passed());
  CHECK(r.to_json()["result"]["k"] == 1);
}

}
