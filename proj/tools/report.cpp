#include "report.hpp"

#include <cstdio>

#include <json.hpp>

namespace larep::cli {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Report::number(const std::string& key, double v) { value(key, format_number(v)); }

std::string render_text(const Report& r) {
  std::string out = "larep-report/1\n";
  out += "command: " + r.command + "\n";
  for (const auto& [k, v] : r.values) out += k + " = " + v + "\n";
  for (const Check& c : r.checks) {
    out += c.passed ? "[PASS] " : "[FAIL] ";
    out += c.name;
    if (!c.passed && !c.residual.empty()) out += ": " + c.residual;
    out += "\n";
  }
  out += std::string("result: ") + (r.passed() ? "PASS" : "FAIL") + "\n";
  return out;
}

std::string render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = "larep-report/1";
  j["command"] = r.command;
  nlohmann::ordered_json vals = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.values) vals[k] = v;
  j["values"] = std::move(vals);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const Check& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["residual"] = c.residual;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  j["result"] = r.passed() ? "pass" : "fail";
  return j.dump(2) + "\n";
}

}  // namespace larep::cli
