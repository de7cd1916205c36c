#ifndef LAREP_ALGEBROID_HPP
#define LAREP_ALGEBROID_HPP

#include <string>
#include <vector>

#include "larep/poly.hpp"
#include "larep/superform.hpp"

namespace larep {

/// A validation outcome: empty entry list means the check passed.
struct ValidationReport {
  struct Entry {
    std::string what;      // which identity failed
    std::string residual;  // the nonzero polynomial, rendered
  };
  std::vector<Entry> entries;

  bool passed() const { return entries.empty(); }
};

/// Local chart of a Lie algebroid: base coordinates, frame, anchor structure
/// functions rho^mu_I and bracket structure functions C^K_IJ (kept for I<J).
class AlgebroidChart {
 public:
  AlgebroidChart(std::size_t base_dim, std::size_t fiber_rank,
                 std::vector<std::string> coords = {}, std::vector<std::string> frame = {});

  std::size_t base_dim() const { return n_; }
  std::size_t fiber_rank() const { return r_; }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::vector<std::string>& frame() const { return frame_; }

  const Poly& anchor(std::size_t I, std::size_t mu) const;
  void set_anchor(std::size_t I, std::size_t mu, Poly p);

  /// C^K_IJ with antisymmetry in (I,J) applied.
  Poly bracket(std::size_t K, std::size_t I, std::size_t J) const;
  void set_bracket(std::size_t K, std::size_t I, std::size_t J, Poly p);

 private:
  std::size_t n_, r_;
  std::vector<std::string> coords_, frame_;
  std::vector<Poly> anchor_;   // [I * n + mu]
  std::vector<Poly> bracket_;  // [K][I<J] flattened, see index()
  std::size_t pair_index(std::size_t I, std::size_t J) const;
};

/// Adapted presentation of a subalgebroid F -> Y inside a chart: Y is the
/// locus where the double-primed coordinates vanish and F is spanned by the
/// primed frame.
struct AdaptedSplit {
  AlgebroidChart chart;
  std::vector<std::size_t> primed_coords;  // tangential to Y
  std::vector<std::size_t> primed_frame;   // spanning F

  /// The restricted F-chart over Y (double-primed coordinates set to zero).
  AlgebroidChart restricted_chart() const;
};

/// Cartan-type differential on forms with polynomial (possibly matrix)
/// coefficients; the anchor acts entrywise as rho^mu_I d_mu.
SuperForm d_E_apply(const AlgebroidChart& chart, const SuperForm& omega);

/// d_E of a scalar function: the 1-form rho^mu_I d_mu f e^I.
SuperForm d_E_of_function(const AlgebroidChart& chart, const Poly& f);

/// The 1-form e^K as a scalar-valued SuperForm.
SuperForm frame_covector(const AlgebroidChart& chart, std::size_t K);

/// Checks d_E^2 = 0 on every coordinate function and frame covector; a
/// passing report is equivalent to the anchor compatibility and Jacobi
/// identities holding identically.
ValidationReport validate_algebroid(const AlgebroidChart& chart);

/// Checks the adapted-coordinate subalgebroid conditions: rho^{mu''}_{I'} and
/// C^{K''}_{I'J'} vanish on Y, and the restricted chart is itself a Lie
/// algebroid chart.
ValidationReport validate_subalgebroid(const AdaptedSplit& split);

/// Keeps only the monomials free of the dropped coordinates and re-indexes to
/// the kept ones (evaluation at zero of the complement).
Poly restrict_to_coords(const Poly& p, const std::vector<std::size_t>& keep);

}  // namespace larep

#endif
