#include "larep/superconnection.hpp"

#include <functional>

namespace larep {

Superconnection::Superconnection(EConnection conn)
    : conn_(std::move(conn)), v_(conn_.bundle(), conn_.bundle(), 1) {}

void Superconnection::set_v(GradedMatrix<Poly> v) {
  if (v.source != bundle() || v.target != bundle() || v.degree != 1)
    throw std::invalid_argument("Superconnection::set_v: v must be a degree +1 endomorphism");
  v_ = std::move(v);
}

SuperForm Superconnection::omega(int k) const {
  auto it = higher_.find(k);
  if (it != higher_.end()) return it->second;
  return SuperForm(chart().fiber_rank(), bundle(), bundle());
}

void Superconnection::set_omega(int k, SuperForm w) {
  if (k < 2) throw std::invalid_argument("Superconnection::set_omega: k must be >= 2");
  if (w.fiber_rank() != chart().fiber_rank() || w.source() != bundle() || w.target() != bundle())
    throw std::invalid_argument("Superconnection::set_omega: bundle mismatch");
  for (const auto& [idx, m] : w.terms())
    if (static_cast<int>(idx.size()) != k || m.degree != 1 - k)
      throw std::invalid_argument("Superconnection::set_omega: term is not of bidegree (k, 1-k)");
  if (w.is_zero())
    higher_.erase(k);
  else
    higher_[k] = std::move(w);
}

GradedMatrix<Poly> Superconnection::omega_component(int k, const MultiIndex& idx) const {
  auto it = higher_.find(k);
  if (it == higher_.end()) return GradedMatrix<Poly>(bundle(), bundle(), 1 - k);
  return it->second.component(idx, 1 - k);
}

namespace {

/// A degree-shifting endomorphism as a 0-form.
SuperForm form_of_matrix(std::size_t fiber_rank, const GradedMatrix<Poly>& m) {
  SuperForm w(fiber_rank, m.source, m.target);
  w.add_component({}, m);
  return w;
}

std::string first_nonzero_entry(const GradedMatrix<Poly>& m, const std::vector<std::string>& coords) {
  for (const auto& [k, block] : m.blocks)
    for (const Poly& p : block.a)
      if (!p.is_zero()) return p.to_string(coords);
  return {};
}

std::string index_names(const AlgebroidChart& chart, const MultiIndex& idx) {
  std::string s = "(";
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (t) s += ",";
    s += chart.frame().at(static_cast<std::size_t>(idx[t]));
  }
  return s + ")";
}

}  // namespace

SuperForm superconnection_apply(const Superconnection& D, const SuperForm& omega) {
  const EConnection& conn = D.connection();
  if (omega.target() != D.bundle())
    throw std::invalid_argument("superconnection_apply: bundle mismatch");
  const EConnection* src =
      (omega.source() == D.bundle() && D.bundle() != GradedBundle::line(0)) ? &conn : nullptr;
  SuperForm out = d_E_nabla_apply(conn, omega, src);
  if (!D.v().is_zero()) out += wedge(form_of_matrix(omega.fiber_rank(), D.v()), omega);
  for (const auto& [k, w] : D.higher()) out += wedge(w, omega);
  return out;
}

SuperForm assemble_alpha(const Superconnection& D) {
  const std::size_t r = D.chart().fiber_rank();
  SuperForm alpha(r, D.bundle(), D.bundle());
  alpha.set_component({}, D.v());
  for (std::size_t I = 0; I < r; ++I)
    alpha.set_component({static_cast<int>(I)}, D.connection().coefficient(I));
  for (const auto& [k, w] : D.higher())
    for (const auto& [idx, m] : w.terms()) alpha.set_component(idx, m);
  return alpha;
}

Superconnection disassemble_alpha(const AlgebroidChart& chart, const SuperForm& alpha) {
  if (alpha.source() != alpha.target())
    throw std::invalid_argument("disassemble_alpha: alpha must be endomorphism-valued");
  EConnection conn(chart, alpha.target());
  GradedMatrix<Poly> v(alpha.target(), alpha.target(), 1);
  std::map<int, SuperForm> higher;
  for (const auto& [idx, m] : alpha.terms()) {
    int k = static_cast<int>(idx.size());
    if (m.degree != 1 - k)
      throw std::invalid_argument("disassemble_alpha: term of total degree != 1");
    if (k == 0) {
      v = m;
    } else if (k == 1) {
      conn.set_coefficient(static_cast<std::size_t>(idx[0]), m);
    } else {
      auto it = higher.find(k);
      if (it == higher.end())
        it = higher.emplace(k, SuperForm(chart.fiber_rank(), alpha.source(), alpha.target())).first;
      it->second.set_component(idx, m);
    }
  }
  Superconnection D(std::move(conn));
  D.set_v(std::move(v));
  for (auto& [k, w] : higher) D.set_omega(k, std::move(w));
  return D;
}

SuperForm mc_residual(const Superconnection& D) {
  SuperForm alpha = assemble_alpha(D);
  return d_E_apply(D.chart(), alpha) + wedge(alpha, alpha);
}

std::map<int, SuperForm> flatness_residual_forms(const Superconnection& D) {
  const AlgebroidChart& chart = D.chart();
  const EConnection& conn = D.connection();
  const int r = static_cast<int>(chart.fiber_rank());
  const std::size_t fr = chart.fiber_rank();

  std::map<int, SuperForm> out;
  for (int l = 0; l <= r; ++l) out.emplace(l, SuperForm(fr, D.bundle(), D.bundle()));

  out.at(0).add_component({}, D.v() * D.v());

  for (int I = 0; I < r; ++I)
    out.at(1).add_component(
        {I}, covariant_derivative_hom(chart, &conn, &conn, D.v(), static_cast<std::size_t>(I)));

  if (r >= 2) {
    SuperForm F = curvature(conn);
    for (int I = 0; I < r; ++I)
      for (int J = I + 1; J < r; ++J) {
        GradedMatrix<Poly> om2 = D.omega_component(2, {I, J});
        out.at(2).add_component({I, J}, D.v() * om2 + om2 * D.v() + F.component({I, J}, 0));
      }
  }

  for (int n = 2; n + 1 <= r; ++n) {
    SuperForm dom = d_E_nabla_apply(conn, D.omega(n), &conn);
    for_each_increasing(r, n + 1, [&](const MultiIndex& K) {
      GradedMatrix<Poly> acc(D.bundle(), D.bundle(), 1 - n);
      GradedMatrix<Poly> top = D.omega_component(n + 1, K);
      GradedMatrix<Poly> vt = D.v() * top;
      if ((n + 1) % 2 == 1) vt = -vt;
      acc += vt;
      acc += top * D.v();
      acc += dom.component(K, 1 - n);
      for (int k = 2; k <= n - 1; ++k) {
        int sign = (((1 - k) * (n + 1 - k)) % 2 != 0) ? -1 : 1;
        // antisymmetrized reading of the split product: sum over shuffles
        std::vector<int> positions(static_cast<std::size_t>(k));
        std::function<void(int, int)> rec = [&](int pos, int start) {
          if (pos == k) {
            MultiIndex S, rest;
            std::vector<bool> in(K.size(), false);
            for (int p : positions) in[static_cast<std::size_t>(p)] = true;
            for (std::size_t t = 0; t < K.size(); ++t) (in[t] ? S : rest).push_back(K[t]);
            int s = sign * merge_sign(S, rest);
            GradedMatrix<Poly> prod =
                D.omega_component(k, S) * D.omega_component(n + 1 - k, rest);
            acc += (s == 1) ? prod : -prod;
            return;
          }
          for (int v = start; v <= n + 1 - (k - pos); ++v) {
            positions[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1, v + 1);
          }
        };
        rec(0, 0);
      }
      acc.prune();
      if (!acc.is_zero()) out.at(n + 1).add_component(K, acc);
    });
  }
  return out;
}

FlatnessReport flatness_equations(const Superconnection& D) {
  const AlgebroidChart& chart = D.chart();
  const int r = static_cast<int>(chart.fiber_rank());
  const auto& coords = chart.coords();

  std::map<int, SuperForm> residuals = flatness_residual_forms(D);

  FlatnessReport report;
  report.truncation_level = r;
  auto record = [&](std::string name, const GradedMatrix<Poly>& residual) {
    GradedMatrix<Poly> m = residual;
    m.prune();
    bool ok = m.is_zero();
    report.entries.push_back({std::move(name), ok, ok ? std::string{} : first_nonzero_entry(m, coords)});
  };

  record("v^2 = 0", residuals.at(0).component({}, 2));

  for (int I = 0; I < r; ++I)
    record("nabla_" + chart.frame()[static_cast<std::size_t>(I)] + " v = 0",
           residuals.at(1).component({I}, 1));

  if (r >= 2)
    for (int I = 0; I < r; ++I)
      for (int J = I + 1; J < r; ++J)
        record("v*Omega2 + Omega2*v + F = 0 at " + index_names(chart, {I, J}),
               residuals.at(2).component({I, J}, 0));

  for (int n = 2; n + 1 <= r; ++n)
    for_each_increasing(r, n + 1, [&](const MultiIndex& K) {
      record("tower n=" + std::to_string(n) + " at " + index_names(chart, K),
             residuals.at(n + 1).component(K, 1 - n));
    });
  return report;
}

}  // namespace larep
