#ifndef LAREP_TOOLS_JSONIO_HPP
#define LAREP_TOOLS_JSONIO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "larep/algebroid.hpp"
#include "larep/boundary.hpp"
#include "larep/superconnection.hpp"

namespace larep::cli {

/// Raised on any schema violation; the driver maps it to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Chart document plus its optional adapted subalgebroid presentation.
struct LoadedChart {
  AlgebroidChart chart;
  std::optional<AdaptedSplit> split;
};

LoadedChart load_chart_file(const std::string& path);

/// Coupling document over an already loaded chart.  Ordinary connections are
/// couplings whose v and omega entries are absent.
Superconnection load_coupling_file(const std::string& path, const AlgebroidChart& chart);

/// Scenario document: chart and coupling references, explicit periodic field
/// profiles, lattice sizes, observable form specifications and the insertion
/// point for boundary-changing runs.
struct Scenario {
  AlgebroidChart chart;
  std::vector<Superconnection> couplings;  // one, or two for boundary-changing
  FieldConfig config;
  std::vector<int> lattices;
  std::vector<nlohmann::json> form_specs;  // parsed per command with the right bundles
  double insertion = 0.5;
  double tolerance = 1e-10;
};

Scenario load_scenario_file(const std::string& path);

/// Form specification from a scenario: ordered components with graded-matrix
/// blocks of polynomial strings.
SuperForm parse_form(const nlohmann::json& spec, const AlgebroidChart& chart,
                     const GradedBundle& source, const GradedBundle& target);

/// One-line rendering of a polynomial graded matrix, block by block.
std::string render_matrix(const GradedMatrix<Poly>& m, const std::vector<std::string>& coords);

}  // namespace larep::cli

#endif
