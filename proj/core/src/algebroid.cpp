#include "larep/algebroid.hpp"

#include <algorithm>
#include <functional>

namespace larep {

AlgebroidChart::AlgebroidChart(std::size_t base_dim, std::size_t fiber_rank,
                               std::vector<std::string> coords, std::vector<std::string> frame)
    : n_(base_dim), r_(fiber_rank), coords_(std::move(coords)), frame_(std::move(frame)) {
  if (coords_.empty())
    for (std::size_t i = 0; i < n_; ++i) coords_.push_back("x" + std::to_string(i + 1));
  if (frame_.empty())
    for (std::size_t i = 0; i < r_; ++i) frame_.push_back("e" + std::to_string(i + 1));
  if (coords_.size() != n_ || frame_.size() != r_)
    throw std::invalid_argument("AlgebroidChart: name count mismatch");
  anchor_.assign(r_ * n_, Poly(n_));
  bracket_.assign(r_ * r_ * (r_ - 1) / 2, Poly(n_));
}

std::size_t AlgebroidChart::pair_index(std::size_t I, std::size_t J) const {
  // index of the pair (I,J) with I<J in lexicographic order
  return I * r_ - I * (I + 1) / 2 + (J - I - 1);
}

const Poly& AlgebroidChart::anchor(std::size_t I, std::size_t mu) const {
  if (I >= r_ || mu >= n_) throw std::out_of_range("AlgebroidChart::anchor");
  return anchor_[I * n_ + mu];
}

void AlgebroidChart::set_anchor(std::size_t I, std::size_t mu, Poly p) {
  if (I >= r_ || mu >= n_) throw std::out_of_range("AlgebroidChart::set_anchor");
  if (p.nvars() != n_) throw std::invalid_argument("AlgebroidChart::set_anchor: arity mismatch");
  anchor_[I * n_ + mu] = std::move(p);
}

Poly AlgebroidChart::bracket(std::size_t K, std::size_t I, std::size_t J) const {
  if (K >= r_ || I >= r_ || J >= r_) throw std::out_of_range("AlgebroidChart::bracket");
  if (I == J) return Poly(n_);
  if (I < J) return bracket_[K * (r_ * (r_ - 1) / 2) + pair_index(I, J)];
  return -bracket_[K * (r_ * (r_ - 1) / 2) + pair_index(J, I)];
}

void AlgebroidChart::set_bracket(std::size_t K, std::size_t I, std::size_t J, Poly p) {
  if (K >= r_ || I >= r_ || J >= r_ || I == J) throw std::out_of_range("AlgebroidChart::set_bracket");
  if (p.nvars() != n_) throw std::invalid_argument("AlgebroidChart::set_bracket: arity mismatch");
  if (I < J)
    bracket_[K * (r_ * (r_ - 1) / 2) + pair_index(I, J)] = std::move(p);
  else
    bracket_[K * (r_ * (r_ - 1) / 2) + pair_index(J, I)] = -p;
}

Poly restrict_to_coords(const Poly& p, const std::vector<std::size_t>& keep) {
  Poly out(keep.size());
  for (const auto& [e, c] : p.terms()) {
    Poly::Exponents re(keep.size(), 0);
    bool survives = true;
    std::vector<bool> kept(e.size(), false);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      re[i] = e[keep[i]];
      kept[keep[i]] = true;
    }
    for (std::size_t mu = 0; mu < e.size(); ++mu)
      if (!kept[mu] && e[mu] > 0) {
        survives = false;
        break;
      }
    if (survives) out.add_term(re, c);
  }
  return out;
}

AlgebroidChart AdaptedSplit::restricted_chart() const {
  std::vector<std::string> coords, frame;
  for (std::size_t mu : primed_coords) coords.push_back(chart.coords().at(mu));
  for (std::size_t I : primed_frame) frame.push_back(chart.frame().at(I));
  AlgebroidChart f(primed_coords.size(), primed_frame.size(), coords, frame);
  for (std::size_t i = 0; i < primed_frame.size(); ++i)
    for (std::size_t m = 0; m < primed_coords.size(); ++m)
      f.set_anchor(i, m, restrict_to_coords(chart.anchor(primed_frame[i], primed_coords[m]), primed_coords));
  for (std::size_t k = 0; k < primed_frame.size(); ++k)
    for (std::size_t i = 0; i < primed_frame.size(); ++i)
      for (std::size_t j = i + 1; j < primed_frame.size(); ++j)
        f.set_bracket(k, i, j,
                      restrict_to_coords(chart.bracket(primed_frame[k], primed_frame[i], primed_frame[j]),
                                         primed_coords));
  return f;
}

namespace {

GradedMatrix<Poly> anchor_derivative(const AlgebroidChart& chart, std::size_t I,
                                     const GradedMatrix<Poly>& m) {
  GradedMatrix<Poly> out(m.source, m.target, m.degree);
  for (const auto& [k, block] : m.blocks) {
    Mat<Poly> d(block.rows, block.cols, Poly(chart.base_dim()));
    for (std::size_t a = 0; a < block.a.size(); ++a)
      for (std::size_t mu = 0; mu < chart.base_dim(); ++mu)
        d.a[a] += chart.anchor(I, mu) * block.a[a].partial(mu);
    if (!d.is_zero()) out.blocks[k] = std::move(d);
  }
  return out;
}

}  // namespace

SuperForm d_E_apply(const AlgebroidChart& chart, const SuperForm& omega) {
  const int r = static_cast<int>(chart.fiber_rank());
  SuperForm out(omega.fiber_rank(), omega.source(), omega.target());
  if (omega.fiber_rank() != chart.fiber_rank())
    throw std::invalid_argument("d_E_apply: fiber rank mismatch");

  // collect the form degrees (and coefficient degrees) present
  std::map<int, int> degree_hint;  // form degree -> coefficient degree
  for (const auto& [idx, m] : omega.terms()) degree_hint[static_cast<int>(idx.size())] = m.degree;

  for (const auto& [k, hint] : degree_hint) {
    for_each_increasing(r, k + 1, [&](const MultiIndex& K) {
      GradedMatrix<Poly> acc(omega.source(), omega.target(), hint);
      // anchor part: sum_i (-1)^{i-1} rho^mu_{K_i} d_mu omega_{K \ K_i}
      for (int i = 0; i < k + 1; ++i) {
        MultiIndex rest;
        for (int t = 0; t < k + 1; ++t)
          if (t != i) rest.push_back(K[t]);
        GradedMatrix<Poly> comp = omega.component(rest, hint);
        if (comp.is_zero()) continue;
        GradedMatrix<Poly> term = anchor_derivative(chart, K[i], comp);
        if (i % 2 == 1) term = -term;
        acc += term;
      }
      // bracket part: sum_{i<j} (-1)^{i+j} C^J_{K_i K_j} omega_{J, K \ {K_i,K_j}}
      for (int i = 0; i < k + 1; ++i)
        for (int j = i + 1; j < k + 1; ++j) {
          MultiIndex rest;
          for (int t = 0; t < k + 1; ++t)
            if (t != i && t != j) rest.push_back(K[t]);
          for (int J = 0; J < r; ++J) {
            Poly c = chart.bracket(J, K[i], K[j]);
            if (c.is_zero()) continue;
            MultiIndex full;
            full.push_back(J);
            for (int v : rest) full.push_back(v);
            GradedMatrix<Poly> comp = omega.component(full, hint);
            if (comp.is_zero()) continue;
            GradedMatrix<Poly> term = c * comp;
            // (-1)^{i+j} with 1-based positions: (i+1)+(j+1) = i+j+2
            if ((i + j) % 2 == 1) term = -term;
            acc += term;
          }
        }
      if (!acc.is_zero()) out.add_component(K, acc);
    });
  }
  return out;
}

SuperForm d_E_of_function(const AlgebroidChart& chart, const Poly& f) {
  SuperForm zero_form = SuperForm::scalar(chart.fiber_rank());
  GradedMatrix<Poly> coeff(GradedBundle::line(0), GradedBundle::line(0), 0);
  Mat<Poly> cell(1, 1);
  cell(0, 0) = f;
  coeff.set_block(0, cell);
  zero_form.add_component({}, coeff);
  return d_E_apply(chart, zero_form);
}

SuperForm frame_covector(const AlgebroidChart& chart, std::size_t K) {
  SuperForm form = SuperForm::scalar(chart.fiber_rank());
  GradedMatrix<Poly> coeff(GradedBundle::line(0), GradedBundle::line(0), 0);
  Mat<Poly> cell(1, 1);
  cell(0, 0) = Poly::constant(chart.base_dim(), 1);
  coeff.set_block(0, cell);
  form.add_component({static_cast<int>(K)}, coeff);
  return form;
}

namespace {

void report_nonzero(const AlgebroidChart& chart, const SuperForm& form, const std::string& label,
                    ValidationReport& report) {
  for (const auto& [idx, m] : form.terms()) {
    if (m.is_zero()) continue;
    std::string where = label + " at e^{";
    for (std::size_t t = 0; t < idx.size(); ++t) {
      if (t) where += ",";
      where += chart.frame().at(static_cast<std::size_t>(idx[t]));
    }
    where += "}";
    std::string residual;
    for (const auto& [k, block] : m.blocks)
      for (const Poly& p : block.a)
        if (!p.is_zero()) {
          residual = p.to_string(chart.coords().empty() ? std::vector<std::string>{} : chart.coords());
          break;
        }
    report.entries.push_back({where, residual});
  }
}

}  // namespace

ValidationReport validate_algebroid(const AlgebroidChart& chart) {
  ValidationReport report;
  for (std::size_t mu = 0; mu < chart.base_dim(); ++mu) {
    Poly x = Poly::variable(chart.base_dim(), mu);
    SuperForm dd = d_E_apply(chart, d_E_of_function(chart, x));
    report_nonzero(chart, dd, "d_E^2(" + chart.coords()[mu] + ")", report);
  }
  for (std::size_t K = 0; K < chart.fiber_rank(); ++K) {
    SuperForm dd = d_E_apply(chart, d_E_apply(chart, frame_covector(chart, K)));
    report_nonzero(chart, dd, "d_E^2(" + chart.frame()[K] + ")", report);
  }
  return report;
}

ValidationReport validate_subalgebroid(const AdaptedSplit& split) {
  ValidationReport report;
  const AlgebroidChart& chart = split.chart;
  std::vector<bool> coord_primed(chart.base_dim(), false), frame_primed(chart.fiber_rank(), false);
  for (std::size_t mu : split.primed_coords) coord_primed.at(mu) = true;
  for (std::size_t I : split.primed_frame) frame_primed.at(I) = true;

  // (i) the anchor of primed sections stays tangent to Y
  for (std::size_t I : split.primed_frame)
    for (std::size_t mu = 0; mu < chart.base_dim(); ++mu) {
      if (coord_primed[mu]) continue;
      Poly rest = restrict_to_coords(chart.anchor(I, mu), split.primed_coords);
      if (!rest.is_zero()) {
        std::vector<std::string> names;
        for (std::size_t m : split.primed_coords) names.push_back(chart.coords()[m]);
        report.entries.push_back({"anchor leak rho^{" + chart.coords()[mu] + "}_{" +
                                      chart.frame()[I] + "} on Y",
                                  rest.to_string(names)});
      }
    }
  // (ii) the bracket of primed sections stays in F
  for (std::size_t K = 0; K < chart.fiber_rank(); ++K) {
    if (frame_primed[K]) continue;
    for (std::size_t a = 0; a < split.primed_frame.size(); ++a)
      for (std::size_t b = a + 1; b < split.primed_frame.size(); ++b) {
        Poly rest = restrict_to_coords(
            chart.bracket(K, split.primed_frame[a], split.primed_frame[b]), split.primed_coords);
        if (!rest.is_zero()) {
          std::vector<std::string> names;
          for (std::size_t m : split.primed_coords) names.push_back(chart.coords()[m]);
          report.entries.push_back({"bracket leak C^{" + chart.frame()[K] + "}_{" +
                                        chart.frame()[split.primed_frame[a]] + "," +
                                        chart.frame()[split.primed_frame[b]] + "} on Y",
                                    rest.to_string(names)});
        }
      }
  }
  // (iii) the restriction is a Lie algebroid chart in its own right
  ValidationReport inner = validate_algebroid(split.restricted_chart());
  for (auto& e : inner.entries)
    report.entries.push_back({"restricted chart: " + e.what, e.residual});
  return report;
}

}  // namespace larep
