#ifndef LAREP_BOUNDARY_HPP
#define LAREP_BOUNDARY_HPP

#include <utility>
#include <vector>

#include "larep/grassmann.hpp"
#include "larep/superconnection.hpp"
#include "larep/trigpoly.hpp"

namespace larep {

using GrassFun = Grassmann<TrigPoly>;                // scalar field value, exact in tau
using GrassMat = Grassmann<GradedMatrix<TrigPoly>>;  // matrix-valued, exact in tau
using NumGrass = Grassmann<double>;                  // scalar value at one tau
using NumMat = Grassmann<GradedMatrix<double>>;      // matrix value at one tau
using FormFunctional = Grassmann<GradedMatrix<Poly>>;  // symbolic functional in (x, xi)

/// Boundary-circle field content over a restricted chart: periodic profiles
/// valued in the Grassmann algebra of an odd generator set.  Componentwise,
/// phi is even with ghost 0, xi odd with ghost +1, psi even with ghost 0 and
/// etap odd with ghost -1.  (The parities follow from the BRST rules: the
/// variation of psi contains the odd d_tau xi, so psi itself must be even,
/// and the connection one-form M is then parity-homogeneous.)
struct FieldConfig {
  AlgebroidChart chart;
  GeneratorTable table;
  std::vector<GrassFun> phi;   // size base_dim
  std::vector<GrassFun> xi;    // size fiber_rank
  std::vector<GrassFun> psi;   // size fiber_rank
  std::vector<GrassFun> etap;  // size base_dim
};

/// First variation of a field configuration, component by component.
struct FieldVariation {
  std::vector<GrassFun> phi, xi, psi, etap;
};

/// Checks component counts and the parity/ghost homogeneity table.
ValidationReport validate_config(const FieldConfig& cfg);

/// Exact evaluation of a polynomial at even Grassmann arguments (finite
/// Taylor expansion around the body; terminates by soul nilpotency).
GrassFun eval_poly(const Poly& p, const std::vector<GrassFun>& x);
GrassMat eval_matrix(const GradedMatrix<Poly>& m, const std::vector<GrassFun>& x);

/// Chain-rule variation of the same evaluations: sum_nu (d_nu p)(x) dx^nu,
/// with the variation factor on the right.
GrassFun eval_poly_varied(const Poly& p, const std::vector<GrassFun>& x,
                          const std::vector<GrassFun>& dx);
GrassMat eval_matrix_varied(const GradedMatrix<Poly>& m, const std::vector<GrassFun>& x,
                            const std::vector<GrassFun>& dx);

/// Residual boundary BRST variation of every field component.
FieldVariation brst_delta(const FieldConfig& cfg);

/// Variation of the BRST rules themselves: applies the odd product rule to
/// each right-hand side with the given component variations substituted.
/// With var = brst_delta(cfg) this computes the square of the BRST operator,
/// which vanishes exactly when the chart axioms hold.
FieldVariation brst_delta_varied(const FieldConfig& cfg, const FieldVariation& var);

/// Exact tau-derivative, component by component.
GrassFun dtau(const GrassFun& f);
GrassMat dtau(const GrassMat& m);

/// Evaluation at a fixed parameter value.
NumGrass at_tau(const GrassFun& f, double tau);
NumMat at_tau(const GrassMat& m, double tau);

// ---------------------------------------------------------------------------
// Symbolic functionals in (x, xi): Grassmann elements over the frame
// covectors with polynomial (matrix) coefficients.

/// Rewrites a form as a functional: the ordered component at S becomes the
/// coefficient of the generator monomial xi^S (with the Koszul sign for
/// moving the coefficient to the right of the monomial).
FormFunctional form_to_functional(const SuperForm& w);

/// Inverse of form_to_functional; the coefficient bundles are supplied
/// explicitly so that the zero functional round-trips.
SuperForm functional_to_form(const FormFunctional& w, std::size_t fiber_rank,
                             const GradedBundle& source, const GradedBundle& target);

/// Entrywise coordinate derivative of all coefficients.
FormFunctional partial_x(const FormFunctional& w, std::size_t mu);

/// The homological vector field of the chart acting on functionals:
/// -rho^mu_I xi^I d_mu + (1/2) C^K_IJ xi^I xi^J d_{xi^K}.
FormFunctional qf_apply(const AlgebroidChart& chart, const FormFunctional& w);

/// Same with the anchor derivative replaced by the covariant derivative
/// rho^mu_I d_mu + [A_I, .].
FormFunctional qf_nabla_apply(const EConnection& conn, const FormFunctional& w);

/// The local superconnection form as a functional: v + A_I xi^I + higher.
FormFunctional alpha_functional(const Superconnection& D);

/// Covariant homological vector field of a superconnection background:
/// qf_apply minus the graded commutator with alpha.
FormFunctional qfd_apply(const Superconnection& D, const FormFunctional& w);

/// Maurer-Cartan residual of the background as a functional:
/// alpha * alpha - qf(alpha).  Zero exactly when the background is flat, and
/// the square of qfd_apply is the graded commutator with it.  Level by level
/// it is the image of the flatness residual tower with alternating signs.
FormFunctional mc_functional(const Superconnection& D);

/// Substitutes field values into a functional (generators to xi values,
/// coordinates to phi values), multiplying in storage order.
GrassMat functional_eval(const FormFunctional& w, const FieldConfig& cfg);
GrassMat functional_eval_varied(const FormFunctional& w, const FieldConfig& cfg,
                                const FieldVariation& var);

// ---------------------------------------------------------------------------
// Boundary observables.

/// The two observable components attached to a (matrix-valued) form:
///   O0 = (1/k!) w_{I...} xi...xi,
///   O1 = (1/(k-1)!) w_{I...} xi...xi psi + (1/k!) etap^nu d_nu w_{I...} xi...xi,
/// with O1 split into its psi part and its etap part.
struct Observable {
  GrassMat O0, O1psi, O1eta;
  GrassMat O1() const { return O1psi + O1eta; }
};
Observable observable_eval(const SuperForm& w, const FieldConfig& cfg);
Observable observable_varied(const SuperForm& w, const FieldConfig& cfg, const FieldVariation& var);

/// Boundary connection one-form M(tau): the O1 observable of the local
/// superconnection form (ordinary connections are the v = 0, higher = 0 case).
GrassMat connection_M(const Superconnection& D, const FieldConfig& cfg);
GrassMat connection_M_varied(const Superconnection& D, const FieldConfig& cfg,
                             const FieldVariation& var);

/// The evaluated functional of the superconnection form (the O0 companion).
GrassMat script_A(const Superconnection& D, const FieldConfig& cfg);
GrassMat script_A_varied(const Superconnection& D, const FieldConfig& cfg,
                         const FieldVariation& var);

// ---------------------------------------------------------------------------
// Holonomy numerics.

/// Identity element on a graded bundle.
NumMat gidentity(const GradedBundle& b);

/// exp(x) by scaling and squaring; the series on the scaled argument is
/// truncated at `order` terms (the nilpotent part is exact once the series
/// passes the generator budget).
NumMat grassmann_exp(const NumMat& x, const GradedBundle& b, int order = 18);

/// exp(x) together with its first variation d exp(x)[dx].
std::pair<NumMat, NumMat> grassmann_exp_varied(const NumMat& x, const NumMat& dx,
                                               const GradedBundle& b, int order = 18);

/// Inverse via the body inverse and a finite Neumann series in the nilpotent
/// remainder.
NumMat grassmann_inverse(const NumMat& a, const GradedBundle& b);

/// Midpoint-rule path-ordered exponential of -M over [0, t] with nlinks
/// links (later times act on the left).
NumMat holonomy(const Superconnection& D, const FieldConfig& cfg, int nlinks, double t = 1.0);

struct HolonomyVar {
  NumMat U, dU;
};
/// Holonomy together with its exact product-rule variation under the given
/// field variation.
HolonomyVar holonomy_varied(const Superconnection& D, const FieldConfig& cfg,
                            const FieldVariation& var, int nlinks, double t = 1.0);

/// Curvature/flatness integrand of the holonomy variation: for each level
/// the residual form R contributes
///   (-1)^{l-1}/(l-1)! R xi...xi psi + (-1)^l/l! etap dR xi...xi.
GrassMat curvature_integrand(const Superconnection& D, const FieldConfig& cfg);

struct DeltaStrReport {
  NumGrass measured;   // str of the product-rule variation of the discrete holonomy
  NumGrass predicted;  // quadrature of the curvature integrand, conjugated into the loop
  double discrepancy = 0;      // norm of measured - predicted
  double measured_norm = 0;
  double integrand_scale = 0;  // largest integrand norm over the quadrature nodes
  double boundary_term = 0;    // telescoped total-derivative residual (should vanish)
};
/// Measured-versus-predicted comparison of the BRST variation of str U(0,1).
DeltaStrReport delta_str_holonomy(const Superconnection& D, const FieldConfig& cfg, int nlinks);

// ---------------------------------------------------------------------------
// Covariant BRST operator and boundary-changing insertions.

/// hat-delta of the O0 observable: the plain variation minus the graded
/// commutator with the evaluated superconnection form.
GrassMat hat_delta_O0(const SuperForm& w, const Superconnection& D, const FieldConfig& cfg,
                      const FieldVariation& var);

/// hat-delta of the one-form observable: the plain variation minus the graded
/// commutator with the superconnection form, plus the commutator of the
/// boundary connection with O0.  Satisfies the covariant descent relation
/// hat-delta O1 = -dtau O0 - O1 of the covariantly transported form.
GrassMat hat_delta_O1(const SuperForm& w, const Superconnection& D, const FieldConfig& cfg,
                      const FieldVariation& var);

struct BoundaryChangingReport {
  NumGrass measured;   // variation of str(O1(t) U1(0,t) O2(0) U2(0,t)^{-1})
  NumGrass predicted;  // two-sided covariant split
  double discrepancy = 0;
  double measured_norm = 0;
};
/// Variation of a boundary-changing insertion versus its predicted two-sided
/// covariant decomposition.  w1 is Hom(V1,V2)-valued, w2 is Hom(V2,V1)-valued;
/// both forms must be total-degree homogeneous.
BoundaryChangingReport boundary_changing_check(const Superconnection& D1, const Superconnection& D2,
                                               const SuperForm& w1, const SuperForm& w2,
                                               const FieldConfig& cfg, double t, int nlinks);

}  // namespace larep

#endif
