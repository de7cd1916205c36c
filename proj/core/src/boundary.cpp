#include "larep/boundary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace larep {

namespace {

const GrassFun kZeroFun{};

GrassFun gf_one() { return GrassFun::unit(TrigPoly::constant(1.0)); }

/// Entrywise coordinate derivative of a polynomial graded matrix.
GradedMatrix<Poly> dmat(const GradedMatrix<Poly>& m, std::size_t mu) {
  GradedMatrix<Poly> r(m.source, m.target, m.degree);
  for (const auto& [k, blk] : m.blocks) {
    Mat<Poly> d(blk.rows, blk.cols);
    bool any = false;
    for (std::size_t i = 0; i < blk.a.size(); ++i) {
      d.a[i] = blk.a[i].partial(mu);
      if (!d.a[i].is_zero()) any = true;
    }
    if (any) r.blocks[k] = std::move(d);
  }
  return r;
}

/// Sum of coefficient magnitudes over all terms (a submultiplicative bound).
double gtotal(const NumMat& a) {
  double n = 0;
  for (const auto& [k, c] : a.terms()) n += coeff_norm(c);
  return n;
}

Mat<double> mat_inverse(Mat<double> m) {
  if (m.rows != m.cols) throw std::invalid_argument("mat_inverse: non-square");
  const std::size_t n = m.rows;
  Mat<double> inv = Mat<double>::identity(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (std::abs(m(piv, k)) < 1e-12) throw std::runtime_error("mat_inverse: singular body");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    double d = m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) /= d;
      inv(k, j) /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      double f = m(i, k);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

/// One scalar factor of an ordered product together with its variation and
/// intrinsic parity (needed when the value happens to vanish).
struct SF {
  const GrassFun* v;
  const GrassFun* d;
  int parity;
};

GrassFun sprod(const std::vector<SF>& fs, std::size_t vary = static_cast<std::size_t>(-1)) {
  GrassFun acc = gf_one();
  for (std::size_t j = 0; j < fs.size(); ++j) acc = acc * *(j == vary ? fs[j].d : fs[j].v);
  return acc;
}

/// pre-scalars * matrix * post-scalars, multiplied in the written order.
GrassMat chain_eval(const std::vector<SF>& pre, const GrassMat& mid, const std::vector<SF>& post) {
  GrassMat out = sprod(pre) * mid;
  for (const auto& f : post) out = out * *f.v;
  return out;
}

/// Odd-derivation product rule over the same chain: each slot varied in turn,
/// with the Koszul sign of the parities standing to its left.
GrassMat chain_varied(const std::vector<SF>& pre, const GrassMat& mid, const GrassMat& dmid,
                      int mid_parity, const std::vector<SF>& post) {
  GrassMat total;
  int sgn = 0;
  auto emit = [&](const GrassMat& t) {
    if (sgn & 1)
      total -= t;
    else
      total += t;
  };
  for (std::size_t i = 0; i < pre.size(); ++i) {
    GrassMat t = sprod(pre, i) * mid;
    for (const auto& f : post) t = t * *f.v;
    emit(t);
    sgn += pre[i].parity;
  }
  {
    GrassMat t = sprod(pre) * dmid;
    for (const auto& f : post) t = t * *f.v;
    emit(t);
    sgn += mid_parity;
  }
  for (std::size_t i = 0; i < post.size(); ++i) {
    GrassMat t = sprod(pre) * mid;
    for (std::size_t j = 0; j < post.size(); ++j) t = t * *(j == i ? post[i].d : post[j].v);
    emit(t);
    sgn += post[i].parity;
  }
  return total;
}

}  // namespace

ValidationReport validate_config(const FieldConfig& cfg) {
  ValidationReport rep;
  auto note = [&](std::string what) { rep.entries.push_back({std::move(what), {}}); };
  const std::size_t n = cfg.chart.base_dim(), r = cfg.chart.fiber_rank();
  if (cfg.phi.size() != n) note("phi: expected one component per base coordinate");
  if (cfg.xi.size() != r) note("xi: expected one component per frame index");
  if (cfg.psi.size() != r) note("psi: expected one component per frame index");
  if (cfg.etap.size() != n) note("etap: expected one component per base coordinate");
  auto audit = [&](const std::vector<GrassFun>& comps, const char* name, int parity, int ghost) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const GrassFun& f = comps[i];
      if (f.is_zero()) continue;
      auto p = f.parity();
      if (!p || *p != parity)
        note(std::string(name) + "[" + std::to_string(i) + "]: parity is not " +
             std::to_string(parity));
      auto g = f.ghost(cfg.table);
      if (!g || *g != ghost)
        note(std::string(name) + "[" + std::to_string(i) + "]: ghost number is not " +
             std::to_string(ghost));
    }
  };
  audit(cfg.phi, "phi", 0, 0);
  audit(cfg.xi, "xi", 1, 1);
  audit(cfg.psi, "psi", 0, 0);
  audit(cfg.etap, "etap", 1, -1);
  return rep;
}

GrassFun eval_poly(const Poly& p, const std::vector<GrassFun>& x) {
  GrassFun out;
  if (p.is_zero()) return out;
  if (p.nvars() != x.size()) throw std::invalid_argument("eval_poly: arity mismatch");
  for (const auto& [e, c] : p.terms()) {
    GrassFun acc = GrassFun::unit(TrigPoly::constant(static_cast<double>(c)));
    for (std::size_t j = 0; j < e.size(); ++j)
      for (unsigned t = 0; t < e[j]; ++t) acc = acc * x[j];
    out += acc;
  }
  return out;
}

GrassMat eval_matrix(const GradedMatrix<Poly>& m, const std::vector<GrassFun>& x) {
  std::map<GrassMask, GradedMatrix<TrigPoly>> acc;
  for (const auto& [k, blk] : m.blocks)
    for (std::size_t i = 0; i < blk.rows; ++i)
      for (std::size_t j = 0; j < blk.cols; ++j) {
        const Poly& p = blk(i, j);
        if (p.is_zero()) continue;
        GrassFun val = eval_poly(p, x);
        for (const auto& [key, f] : val.terms()) {
          auto it = acc.find(key.first);
          if (it == acc.end())
            it = acc.emplace(key.first, GradedMatrix<TrigPoly>(m.source, m.target, m.degree)).first;
          Mat<TrigPoly> b = it->second.block(k);
          b(i, j) += f;
          it->second.blocks[k] = std::move(b);
        }
      }
  GrassMat out;
  for (auto& [mask, gm] : acc) out.add_term(mask, gm);
  return out;
}

GrassFun eval_poly_varied(const Poly& p, const std::vector<GrassFun>& x,
                          const std::vector<GrassFun>& dx) {
  GrassFun out;
  if (p.is_zero()) return out;
  for (std::size_t nu = 0; nu < x.size(); ++nu) {
    Poly dp = p.partial(nu);
    if (dp.is_zero()) continue;
    out += eval_poly(dp, x) * dx[nu];
  }
  return out;
}

GrassMat eval_matrix_varied(const GradedMatrix<Poly>& m, const std::vector<GrassFun>& x,
                            const std::vector<GrassFun>& dx) {
  GrassMat out;
  for (std::size_t nu = 0; nu < x.size(); ++nu) {
    GradedMatrix<Poly> dm = dmat(m, nu);
    if (dm.is_zero()) continue;
    // The variation acts from the left: writing it in front of the (possibly
    // odd) matrix keeps the product rule an odd derivation.
    out += dx[nu] * eval_matrix(dm, x);
  }
  return out;
}

GrassFun dtau(const GrassFun& f) {
  GrassFun r;
  for (const auto& [k, c] : f.terms()) r.add_term(k.first, c.derivative());
  return r;
}

GrassMat dtau(const GrassMat& m) {
  GrassMat r;
  for (const auto& [k, gm] : m.terms()) {
    GradedMatrix<TrigPoly> d(gm.source, gm.target, gm.degree);
    for (const auto& [kk, blk] : gm.blocks) {
      Mat<TrigPoly> db(blk.rows, blk.cols);
      for (std::size_t i = 0; i < blk.a.size(); ++i) db.a[i] = blk.a[i].derivative();
      d.blocks[kk] = std::move(db);
    }
    r.add_term(k.first, d);
  }
  return r;
}

NumGrass at_tau(const GrassFun& f, double tau) {
  NumGrass r;
  for (const auto& [k, c] : f.terms()) r.add_term(k.first, c.eval(tau));
  return r;
}

NumMat at_tau(const GrassMat& m, double tau) {
  NumMat r;
  for (const auto& [k, gm] : m.terms()) {
    GradedMatrix<double> d(gm.source, gm.target, gm.degree);
    for (const auto& [kk, blk] : gm.blocks) {
      Mat<double> db(blk.rows, blk.cols);
      for (std::size_t i = 0; i < blk.a.size(); ++i) db.a[i] = blk.a[i].eval(tau);
      d.blocks[kk] = std::move(db);
    }
    r.add_term(k.first, d);
  }
  return r;
}

FieldVariation brst_delta(const FieldConfig& cfg) {
  const AlgebroidChart& ch = cfg.chart;
  const std::size_t n = ch.base_dim(), r = ch.fiber_rank();
  FieldVariation d;
  d.phi.resize(n);
  d.etap.resize(n);
  d.xi.resize(r);
  d.psi.resize(r);

  for (std::size_t mu = 0; mu < n; ++mu) {
    for (std::size_t I = 0; I < r; ++I) {
      const Poly& rho = ch.anchor(I, mu);
      if (rho.is_zero()) continue;
      d.phi[mu] -= eval_poly(rho, cfg.phi) * cfg.xi[I];
    }
    d.etap[mu] -= dtau(cfg.phi[mu]);
    for (std::size_t I = 0; I < r; ++I) {
      const Poly& rho = ch.anchor(I, mu);
      if (rho.is_zero()) continue;
      d.etap[mu] += eval_poly(rho, cfg.phi) * cfg.psi[I];
      for (std::size_t nu = 0; nu < n; ++nu) {
        Poly drho = rho.partial(nu);
        if (drho.is_zero()) continue;
        d.etap[mu] += eval_poly(drho, cfg.phi) * cfg.etap[nu] * cfg.xi[I];
      }
    }
  }

  for (std::size_t I = 0; I < r; ++I) {
    for (std::size_t J = 0; J < r; ++J)
      for (std::size_t K = J + 1; K < r; ++K) {
        Poly C = ch.bracket(I, J, K);
        if (C.is_zero()) continue;
        d.xi[I] += eval_poly(C, cfg.phi) * cfg.xi[J] * cfg.xi[K];
      }
    d.psi[I] -= dtau(cfg.xi[I]);
    for (std::size_t J = 0; J < r; ++J)
      for (std::size_t K = 0; K < r; ++K) {
        Poly C = ch.bracket(I, J, K);
        if (C.is_zero()) continue;
        d.psi[I] -= eval_poly(C, cfg.phi) * cfg.psi[J] * cfg.xi[K];
      }
    for (std::size_t nu = 0; nu < n; ++nu)
      for (std::size_t J = 0; J < r; ++J)
        for (std::size_t K = J + 1; K < r; ++K) {
          Poly dC = ch.bracket(I, J, K).partial(nu);
          if (dC.is_zero()) continue;
          d.psi[I] -= eval_poly(dC, cfg.phi) * cfg.etap[nu] * cfg.xi[J] * cfg.xi[K];
        }
  }
  return d;
}

FieldVariation brst_delta_varied(const FieldConfig& cfg, const FieldVariation& var) {
  const AlgebroidChart& ch = cfg.chart;
  const std::size_t n = ch.base_dim(), r = ch.fiber_rank();
  FieldVariation d;
  d.phi.resize(n);
  d.etap.resize(n);
  d.xi.resize(r);
  d.psi.resize(r);

  auto ev = [&](const Poly& p) { return eval_poly(p, cfg.phi); };
  auto evv = [&](const Poly& p) { return eval_poly_varied(p, cfg.phi, var.phi); };

  for (std::size_t mu = 0; mu < n; ++mu) {
    for (std::size_t I = 0; I < r; ++I) {
      const Poly& rho = ch.anchor(I, mu);
      if (rho.is_zero()) continue;
      d.phi[mu] -= evv(rho) * cfg.xi[I] + ev(rho) * var.xi[I];
    }
    d.etap[mu] -= dtau(var.phi[mu]);
    for (std::size_t I = 0; I < r; ++I) {
      const Poly& rho = ch.anchor(I, mu);
      if (rho.is_zero()) continue;
      d.etap[mu] += evv(rho) * cfg.psi[I] + ev(rho) * var.psi[I];
      for (std::size_t nu = 0; nu < n; ++nu) {
        Poly drho = rho.partial(nu);
        if (drho.is_zero()) continue;
        d.etap[mu] += evv(drho) * cfg.etap[nu] * cfg.xi[I] +
                      ev(drho) * (var.etap[nu] * cfg.xi[I] - cfg.etap[nu] * var.xi[I]);
      }
    }
  }

  for (std::size_t I = 0; I < r; ++I) {
    for (std::size_t J = 0; J < r; ++J)
      for (std::size_t K = J + 1; K < r; ++K) {
        Poly C = ch.bracket(I, J, K);
        if (C.is_zero()) continue;
        d.xi[I] += evv(C) * cfg.xi[J] * cfg.xi[K] +
                   ev(C) * (var.xi[J] * cfg.xi[K] - cfg.xi[J] * var.xi[K]);
      }
    d.psi[I] -= dtau(var.xi[I]);
    for (std::size_t J = 0; J < r; ++J)
      for (std::size_t K = 0; K < r; ++K) {
        Poly C = ch.bracket(I, J, K);
        if (C.is_zero()) continue;
        // psi is even, so the variation passes it without a sign
        d.psi[I] -= evv(C) * cfg.psi[J] * cfg.xi[K] +
                    ev(C) * (var.psi[J] * cfg.xi[K] + cfg.psi[J] * var.xi[K]);
      }
    for (std::size_t nu = 0; nu < n; ++nu)
      for (std::size_t J = 0; J < r; ++J)
        for (std::size_t K = J + 1; K < r; ++K) {
          Poly dC = ch.bracket(I, J, K).partial(nu);
          if (dC.is_zero()) continue;
          d.psi[I] -=
              evv(dC) * cfg.etap[nu] * cfg.xi[J] * cfg.xi[K] +
              ev(dC) * (var.etap[nu] * cfg.xi[J] * cfg.xi[K] -
                        cfg.etap[nu] * var.xi[J] * cfg.xi[K] + cfg.etap[nu] * cfg.xi[J] * var.xi[K]);
        }
  }
  return d;
}

FormFunctional form_to_functional(const SuperForm& w) {
  FormFunctional f;
  for (const auto& [idx, m] : w.terms()) {
    GrassMask mask = 0;
    for (int i : idx) mask |= GrassMask{1} << i;
    bool flip = (m.parity() * static_cast<int>(idx.size())) % 2 != 0;
    f.add_term(mask, flip ? GradedMatrix<Poly>(-m) : m);
  }
  return f;
}

SuperForm functional_to_form(const FormFunctional& w, std::size_t fiber_rank,
                             const GradedBundle& source, const GradedBundle& target) {
  SuperForm out(fiber_rank, source, target);
  for (const auto& [key, m] : w.terms()) {
    MultiIndex idx;
    for (std::size_t i = 0; i < fiber_rank; ++i)
      if (key.first & (GrassMask{1} << i)) idx.push_back(static_cast<int>(i));
    if (static_cast<std::size_t>(std::popcount(key.first)) != idx.size())
      throw std::invalid_argument("functional_to_form: generator outside the frame range");
    bool flip = (m.parity() * static_cast<int>(idx.size())) % 2 != 0;
    out.add_component(idx, flip ? GradedMatrix<Poly>(-m) : m);
  }
  return out;
}

FormFunctional partial_x(const FormFunctional& w, std::size_t mu) {
  FormFunctional r;
  for (const auto& [key, m] : w.terms()) {
    GradedMatrix<Poly> dm = dmat(m, mu);
    if (!dm.is_zero()) r.add_term(key.first, dm);
  }
  return r;
}

FormFunctional qf_apply(const AlgebroidChart& chart, const FormFunctional& w) {
  const std::size_t n = chart.base_dim(), r = chart.fiber_rank();
  const Poly one = Poly::constant(n, 1);
  FormFunctional out;
  for (std::size_t mu = 0; mu < n; ++mu) {
    FormFunctional dw = partial_x(w, mu);
    if (dw.is_zero()) continue;
    for (std::size_t I = 0; I < r; ++I) {
      const Poly& rho = chart.anchor(I, mu);
      if (rho.is_zero()) continue;
      out -= Grassmann<Poly>::unit(rho) * Grassmann<Poly>::term(GrassMask{1} << I, one) * dw;
    }
  }
  for (std::size_t K = 0; K < r; ++K) {
    FormFunctional wK = w.partial(K);
    if (wK.is_zero()) continue;
    for (std::size_t I = 0; I < r; ++I)
      for (std::size_t J = I + 1; J < r; ++J) {
        Poly C = chart.bracket(K, I, J);
        if (C.is_zero()) continue;
        out += Grassmann<Poly>::unit(C) * Grassmann<Poly>::term(GrassMask{1} << I, one) *
               Grassmann<Poly>::term(GrassMask{1} << J, one) * wK;
      }
  }
  return out;
}

FormFunctional qf_nabla_apply(const EConnection& conn, const FormFunctional& w) {
  const AlgebroidChart& chart = conn.chart();
  const Poly one = Poly::constant(chart.base_dim(), 1);
  FormFunctional out = qf_apply(chart, w);
  for (std::size_t I = 0; I < chart.fiber_rank(); ++I) {
    const GradedMatrix<Poly>& A = conn.coefficient(I);
    if (A.is_zero()) continue;
    FormFunctional gA = FormFunctional::unit(A);
    out -= Grassmann<Poly>::term(GrassMask{1} << I, one) * (gA * w - w * gA);
  }
  return out;
}

FormFunctional alpha_functional(const Superconnection& D) {
  return form_to_functional(assemble_alpha(D));
}

FormFunctional qfd_apply(const Superconnection& D, const FormFunctional& w) {
  return qf_apply(D.chart(), w) - gcomm(alpha_functional(D), w);
}

FormFunctional mc_functional(const Superconnection& D) {
  FormFunctional a = alpha_functional(D);
  return a * a - qf_apply(D.chart(), a);
}

GrassMat functional_eval(const FormFunctional& w, const FieldConfig& cfg) {
  GrassMat out;
  for (const auto& [key, m] : w.terms()) {
    GrassFun pre = gf_one();
    for (std::size_t i = 0; i < cfg.xi.size(); ++i)
      if (key.first & (GrassMask{1} << i)) pre = pre * cfg.xi[i];
    out += pre * eval_matrix(m, cfg.phi);
  }
  return out;
}

GrassMat functional_eval_varied(const FormFunctional& w, const FieldConfig& cfg,
                                const FieldVariation& var) {
  GrassMat out;
  for (const auto& [key, m] : w.terms()) {
    std::vector<SF> pre;
    for (std::size_t i = 0; i < cfg.xi.size(); ++i)
      if (key.first & (GrassMask{1} << i)) pre.push_back({&cfg.xi[i], &var.xi[i], 1});
    GrassMat mid = eval_matrix(m, cfg.phi);
    GrassMat dmid = eval_matrix_varied(m, cfg.phi, var.phi);
    // reuse the chain rule with the matrix placed last: pre * mid
    out += chain_varied(pre, mid, dmid, m.parity(), {});
  }
  return out;
}

namespace {

Observable observable_impl(const SuperForm& w, const FieldConfig& cfg, const FieldVariation* var) {
  Observable out;
  const std::size_t n = cfg.chart.base_dim();
  for (const auto& [S, A] : w.terms()) {
    const std::size_t k = S.size();
    const int pm = A.parity();
    GrassMat M = eval_matrix(A, cfg.phi);
    GrassMat dM;
    if (var) dM = eval_matrix_varied(A, cfg.phi, var->phi);

    std::vector<SF> xs;
    xs.reserve(k);
    for (int i : S) {
      std::size_t u = static_cast<std::size_t>(i);
      xs.push_back({&cfg.xi[u], var ? &var->xi[u] : &kZeroFun, 1});
    }

    out.O0 += var ? chain_varied({}, M, dM, pm, xs) : chain_eval({}, M, xs);

    for (std::size_t p = 0; p < k; ++p) {
      std::vector<SF> post;
      post.reserve(k);
      for (std::size_t q = 0; q < k; ++q)
        if (q != p) post.push_back(xs[q]);
      std::size_t u = static_cast<std::size_t>(S[p]);
      post.push_back({&cfg.psi[u], var ? &var->psi[u] : &kZeroFun, 0});
      GrassMat t = var ? chain_varied({}, M, dM, pm, post) : chain_eval({}, M, post);
      // Koszul sign for moving the slot's generator past the ones before it
      // and past the coefficient.
      if ((p + static_cast<std::size_t>(pm)) & 1)
        out.O1psi -= t;
      else
        out.O1psi += t;
    }

    for (std::size_t nu = 0; nu < n; ++nu) {
      GradedMatrix<Poly> dA = dmat(A, nu);
      if (dA.is_zero()) continue;
      GrassMat Mnu = eval_matrix(dA, cfg.phi);
      GrassMat dMnu;
      if (var) dMnu = eval_matrix_varied(dA, cfg.phi, var->phi);
      std::vector<SF> pre{{&cfg.etap[nu], var ? &var->etap[nu] : &kZeroFun, 1}};
      out.O1eta += var ? chain_varied(pre, Mnu, dMnu, pm, xs) : chain_eval(pre, Mnu, xs);
    }
  }
  return out;
}

}  // namespace

Observable observable_eval(const SuperForm& w, const FieldConfig& cfg) {
  return observable_impl(w, cfg, nullptr);
}

Observable observable_varied(const SuperForm& w, const FieldConfig& cfg,
                             const FieldVariation& var) {
  return observable_impl(w, cfg, &var);
}

GrassMat connection_M(const Superconnection& D, const FieldConfig& cfg) {
  return observable_eval(assemble_alpha(D), cfg).O1();
}

GrassMat connection_M_varied(const Superconnection& D, const FieldConfig& cfg,
                             const FieldVariation& var) {
  return observable_varied(assemble_alpha(D), cfg, var).O1();
}

GrassMat script_A(const Superconnection& D, const FieldConfig& cfg) {
  return observable_eval(assemble_alpha(D), cfg).O0;
}

GrassMat script_A_varied(const Superconnection& D, const FieldConfig& cfg,
                         const FieldVariation& var) {
  return observable_varied(assemble_alpha(D), cfg, var).O0;
}

NumMat gidentity(const GradedBundle& b) {
  return NumMat::unit(GradedMatrix<double>::identity(b, 1.0));
}

NumMat grassmann_exp(const NumMat& x, const GradedBundle& b, int order) {
  double n = gtotal(x);
  int s = 0;
  while (std::ldexp(n, -s) > 0.5 && s < 40) ++s;
  NumMat y = std::ldexp(1.0, -s) * x;
  NumMat e = gidentity(b);
  NumMat term = gidentity(b);
  for (int j = 1; j <= order; ++j) {
    term = (1.0 / j) * (term * y);
    if (term.is_zero()) break;
    e += term;
    if (gtotal(term) < 1e-300) break;
  }
  for (int i = 0; i < s; ++i) e = e * e;
  return e;
}

std::pair<NumMat, NumMat> grassmann_exp_varied(const NumMat& x, const NumMat& dx,
                                               const GradedBundle& b, int order) {
  double n = gtotal(x);
  int s = 0;
  while (std::ldexp(n, -s) > 0.5 && s < 40) ++s;
  double scale = std::ldexp(1.0, -s);
  NumMat y = scale * x, dy = scale * dx;
  NumMat e = gidentity(b), de;
  NumMat term = gidentity(b), dterm;
  for (int j = 1; j <= order; ++j) {
    dterm = (1.0 / j) * (dterm * y + term * dy);
    term = (1.0 / j) * (term * y);
    e += term;
    de += dterm;
    if (term.is_zero() && dterm.is_zero()) break;
  }
  for (int i = 0; i < s; ++i) {
    de = de * e + e * de;
    e = e * e;
  }
  return {e, de};
}

NumMat grassmann_inverse(const NumMat& a, const GradedBundle& b) {
  GradedMatrix<double> body(b, b, 0);
  if (const GradedMatrix<double>* m = a.find_term(0, 0)) body = *m;
  GradedMatrix<double> body_inv(b, b, 0);
  for (const auto& [k, rank] : b.ranks) body_inv.blocks[k] = mat_inverse(body.block(k));
  NumMat binv = NumMat::unit(body_inv);

  NumMat rest = a;
  rest.add_term(0, -body);
  NumMat m = binv * rest;  // nilpotent: generator content or degree shift in every term
  NumMat acc = gidentity(b);
  NumMat pw = gidentity(b);
  int span = b.max_degree() - b.min_degree();
  int cap = 34 + 2 * span;
  for (int j = 0; j < cap && !pw.is_zero(); ++j) {
    pw = NumMat{} - (pw * m);
    acc += pw;
  }
  if (!pw.is_zero()) throw std::runtime_error("grassmann_inverse: remainder is not nilpotent");
  return acc * binv;
}

NumMat holonomy(const Superconnection& D, const FieldConfig& cfg, int nlinks, double t) {
  if (nlinks < 1) throw std::invalid_argument("holonomy: need at least one link");
  const GradedBundle& b = D.bundle();
  GrassMat Mf = connection_M(D, cfg);
  double dt = t / nlinks;
  NumMat U = gidentity(b);
  for (int s = 0; s < nlinks; ++s) {
    NumMat Ms = at_tau(Mf, (s + 0.5) * dt);
    U = grassmann_exp((-dt) * Ms, b) * U;
  }
  return U;
}

HolonomyVar holonomy_varied(const Superconnection& D, const FieldConfig& cfg,
                            const FieldVariation& var, int nlinks, double t) {
  if (nlinks < 1) throw std::invalid_argument("holonomy_varied: need at least one link");
  const GradedBundle& b = D.bundle();
  SuperForm alpha = assemble_alpha(D);
  GrassMat Mf = observable_eval(alpha, cfg).O1();
  GrassMat dMf = observable_varied(alpha, cfg, var).O1();
  double dt = t / nlinks;

  std::vector<NumMat> E(static_cast<std::size_t>(nlinks)), dE(static_cast<std::size_t>(nlinks));
  for (int s = 0; s < nlinks; ++s) {
    double tau = (s + 0.5) * dt;
    auto [e, de] = grassmann_exp_varied((-dt) * at_tau(Mf, tau), (-dt) * at_tau(dMf, tau), b);
    E[static_cast<std::size_t>(s)] = std::move(e);
    dE[static_cast<std::size_t>(s)] = std::move(de);
  }
  // right[s] = E_{s-1} ... E_0, left[s] = E_{nlinks-1} ... E_{s+1}
  std::vector<NumMat> right(static_cast<std::size_t>(nlinks));
  right[0] = gidentity(b);
  for (int s = 1; s < nlinks; ++s)
    right[static_cast<std::size_t>(s)] =
        E[static_cast<std::size_t>(s - 1)] * right[static_cast<std::size_t>(s - 1)];
  NumMat left = gidentity(b);
  HolonomyVar out;
  for (int s = nlinks - 1; s >= 0; --s) {
    out.dU += left * dE[static_cast<std::size_t>(s)] * right[static_cast<std::size_t>(s)];
    left = left * E[static_cast<std::size_t>(s)];
  }
  out.U = std::move(left);
  return out;
}

GrassMat curvature_integrand(const Superconnection& D, const FieldConfig& cfg) {
  GrassMat G;
  for (const auto& [l, R] : flatness_residual_forms(D)) {
    if (R.is_zero()) continue;
    Observable parts = observable_eval(R, cfg);
    if (l % 2 == 1)
      G -= parts.O1();
    else
      G += parts.O1();
  }
  return G;
}

DeltaStrReport delta_str_holonomy(const Superconnection& D, const FieldConfig& cfg, int nlinks) {
  const GradedBundle& b = D.bundle();
  FieldVariation var = brst_delta(cfg);

  HolonomyVar hv = holonomy_varied(D, cfg, var, nlinks, 1.0);
  DeltaStrReport rep;
  rep.measured = gsupertrace(hv.dU);
  rep.measured_norm = gnorm(rep.measured);

  GrassMat Gf = curvature_integrand(D, cfg);
  GrassMat Mf = connection_M(D, cfg);
  double dt = 1.0 / nlinks;
  NumMat Uj = gidentity(b), Vj = gidentity(b);
  NumMat quad;
  for (int j = 0; j <= nlinks; ++j) {
    double w = (j == 0 || j == nlinks) ? dt / 2 : dt;
    NumMat Gj = at_tau(Gf, j * dt);
    double gn = gtotal(Gj);
    if (gn > rep.integrand_scale) rep.integrand_scale = gn;
    quad += w * (Vj * Gj * Uj);
    if (j < nlinks) {
      NumMat Ms = at_tau(Mf, (j + 0.5) * dt);
      Uj = grassmann_exp((-dt) * Ms, b) * Uj;
      Vj = Vj * grassmann_exp(dt * Ms, b);
    }
  }
  rep.predicted = NumGrass{} - gsupertrace(Uj * quad);
  rep.discrepancy = gnorm(rep.measured - rep.predicted);

  NumMat A0 = at_tau(script_A(D, cfg), 0.0);
  rep.boundary_term = gnorm(gsupertrace(A0 * Uj) - gsupertrace(Uj * A0));
  return rep;
}

GrassMat hat_delta_O0(const SuperForm& w, const Superconnection& D, const FieldConfig& cfg,
                      const FieldVariation& var) {
  GrassMat dO0 = observable_varied(w, cfg, var).O0;
  GrassMat A0 = script_A(D, cfg);
  GrassMat O0 = observable_eval(w, cfg).O0;
  return dO0 - gcomm(A0, O0);
}

GrassMat hat_delta_O1(const SuperForm& w, const Superconnection& D, const FieldConfig& cfg,
                      const FieldVariation& var) {
  Observable o = observable_eval(w, cfg);
  GrassMat dO1 = observable_varied(w, cfg, var).O1();
  return dO1 - gcomm(script_A(D, cfg), o.O1()) + gcomm(connection_M(D, cfg), o.O0);
}

BoundaryChangingReport boundary_changing_check(const Superconnection& D1, const Superconnection& D2,
                                               const SuperForm& w1, const SuperForm& w2,
                                               const FieldConfig& cfg, double t, int nlinks) {
  auto td1 = w1.total_degree(), td2 = w2.total_degree();
  if (!td1 || !td2)
    throw std::invalid_argument("boundary_changing_check: forms must be total-degree homogeneous");
  const int p1 = ((*td1 % 2) + 2) % 2;
  const int p2 = ((*td2 % 2) + 2) % 2;
  auto sgn = [](int p, NumMat m) { return (p & 1) ? NumMat{} - std::move(m) : std::move(m); };

  FieldVariation var = brst_delta(cfg);
  Observable o1 = observable_eval(w1, cfg), o1v = observable_varied(w1, cfg, var);
  Observable o2 = observable_eval(w2, cfg), o2v = observable_varied(w2, cfg, var);
  NumMat O1t = at_tau(o1.O0, t), dO1t = at_tau(o1v.O0, t);
  NumMat O20 = at_tau(o2.O0, 0.0), dO20 = at_tau(o2v.O0, 0.0);

  HolonomyVar h1 = holonomy_varied(D1, cfg, var, nlinks, t);
  HolonomyVar h2 = holonomy_varied(D2, cfg, var, nlinks, t);
  NumMat U2inv = grassmann_inverse(h2.U, D2.bundle());
  NumMat dU2inv = NumMat{} - (U2inv * h2.dU * U2inv);

  BoundaryChangingReport rep;
  rep.measured = gsupertrace(dO1t * h1.U * O20 * U2inv) +
                 gsupertrace(sgn(p1, O1t * h1.dU * O20 * U2inv)) +
                 gsupertrace(sgn(p1, O1t * h1.U * dO20 * U2inv)) +
                 gsupertrace(sgn(p1 + p2, O1t * h1.U * O20 * dU2inv));
  rep.measured_norm = gnorm(rep.measured);

  NumMat A1t = at_tau(script_A(D1, cfg), t), A10 = at_tau(script_A(D1, cfg), 0.0);
  NumMat A2t = at_tau(script_A(D2, cfg), t), A20 = at_tau(script_A(D2, cfg), 0.0);
  NumMat hd1 = dO1t - A2t * O1t + sgn(p1, O1t * A1t);
  NumMat hd2 = dO20 - A10 * O20 + sgn(p2, O20 * A20);
  rep.predicted =
      gsupertrace(hd1 * h1.U * O20 * U2inv) + gsupertrace(sgn(p1, O1t * h1.U * hd2 * U2inv));
  rep.discrepancy = gnorm(rep.measured - rep.predicted);
  return rep;
}

}  // namespace larep
