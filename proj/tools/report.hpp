#ifndef LAREP_TOOLS_REPORT_HPP
#define LAREP_TOOLS_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

namespace larep::cli {

/// One named verification outcome inside a report.
struct Check {
  std::string name;
  bool passed = true;
  std::string residual;  // rendered witness when failed; may stay empty
};

/// Flat, stably ordered report: rows appear in insertion order in both the
/// text and the JSON rendering, so identical inputs give identical bytes.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<Check> checks;

  void value(const std::string& key, const std::string& v) { values.emplace_back(key, v); }
  void number(const std::string& key, double v);
  void check(const std::string& name, bool ok, const std::string& residual = "") {
    checks.push_back({name, ok, residual});
  }
  bool passed() const {
    for (const Check& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// 17-significant-digit rendering used for every numeric value.
std::string format_number(double v);

std::string render_text(const Report& r);
std::string render_json(const Report& r);

}  // namespace larep::cli

#endif
