#include "jsonio.hpp"

#include <filesystem>
#include <fstream>

namespace larep::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw InputError(msg); }

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(path + ": " + e.what());
  }
  if (!j.is_object()) fail(path + ": top-level value must be an object");
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) fail(what + ": unknown key '" + item.key() + "'");
  }
}

const json& require(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) fail(what + ": missing key '" + key + "'");
  return *it;
}

std::size_t get_size(const json& j, const std::string& what) {
  if (!j.is_number_unsigned()) fail(what + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

int get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + ": expected an integer");
  return j.get<int>();
}

double get_double(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + ": expected a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& what) {
  if (!j.is_string()) fail(what + ": expected a string");
  return j.get<std::string>();
}

std::vector<std::string> get_string_list(const json& j, const std::string& what) {
  if (!j.is_array()) fail(what + ": expected an array of strings");
  std::vector<std::string> out;
  for (const json& v : j) out.push_back(get_string(v, what));
  return out;
}

int parse_int_key(const std::string& key, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(key, &used);
    if (used != key.size()) fail(what + ": bad integer key '" + key + "'");
    return v;
  } catch (const std::exception&) {
    fail(what + ": bad integer key '" + key + "'");
  }
}

Poly get_poly(const json& j, const std::vector<std::string>& coords, const std::string& what) {
  std::string text = get_string(j, what);
  try {
    return parse_poly(text, coords);
  } catch (const std::exception& e) {
    fail(what + ": " + e.what());
  }
}

GradedBundle parse_bundle(const json& j, const std::string& what) {
  if (!j.is_object()) fail(what + ": expected an object of degree -> rank");
  std::map<int, std::size_t> ranks;
  for (const auto& item : j.items())
    ranks[parse_int_key(item.key(), what)] = get_size(item.value(), what + " rank");
  return GradedBundle(std::move(ranks));
}

GradedMatrix<Poly> parse_graded_matrix(const json& j, const GradedBundle& src,
                                       const GradedBundle& tgt,
                                       const std::vector<std::string>& coords,
                                       const std::string& what) {
  if (!j.is_object()) fail(what + ": expected an object with 'degree' and 'blocks'");
  reject_unknown_keys(j, {"degree", "blocks"}, what);
  int degree = get_int(require(j, "degree", what), what + ".degree");
  GradedMatrix<Poly> m(src, tgt, degree);
  const json& blocks = require(j, "blocks", what);
  if (!blocks.is_object()) fail(what + ".blocks: expected an object of source degree -> matrix");
  for (const auto& item : blocks.items()) {
    int k = parse_int_key(item.key(), what + ".blocks");
    std::size_t rows = tgt.rank(k + degree), cols = src.rank(k);
    const json& rowsj = item.value();
    if (!rowsj.is_array() || rowsj.size() != rows)
      fail(what + ".blocks[" + item.key() + "]: expected " + std::to_string(rows) + " rows");
    Mat<Poly> blk(rows, cols, Poly(coords.size()));
    for (std::size_t i = 0; i < rows; ++i) {
      const json& rowj = rowsj[i];
      if (!rowj.is_array() || rowj.size() != cols)
        fail(what + ".blocks[" + item.key() + "]: expected " + std::to_string(cols) + " columns");
      for (std::size_t c = 0; c < cols; ++c)
        blk(i, c) = get_poly(rowj[c], coords, what + ".blocks[" + item.key() + "]");
    }
    m.set_block(k, std::move(blk));
  }
  return m;
}

GeneratorTable boundary_table(const AlgebroidChart& chart, std::size_t extra) {
  GeneratorTable table;
  for (std::size_t I = 0; I < chart.fiber_rank(); ++I)
    table.gens.push_back({"xi" + std::to_string(I + 1), 1});
  for (std::size_t mu = 0; mu < chart.base_dim(); ++mu)
    table.gens.push_back({"eta" + std::to_string(mu + 1), -1});
  for (std::size_t s = 0; s < extra; ++s)
    table.gens.push_back({"s" + std::to_string(s + 1), 0});
  return table;
}

GrassFun parse_profile(const json& j, std::size_t generator_count, const std::string& what) {
  if (!j.is_array()) fail(what + ": expected an array of terms");
  GrassFun value;
  for (const json& term : j) {
    if (!term.is_object()) fail(what + ": term must be an object");
    reject_unknown_keys(term, {"generators", "harmonics"}, what);
    GrassMask mask = 0;
    if (auto it = term.find("generators"); it != term.end()) {
      if (!it->is_array()) fail(what + ".generators: expected an array of indices");
      for (const json& g : *it) {
        std::size_t idx = get_size(g, what + ".generators");
        if (idx >= generator_count) fail(what + ".generators: index out of range");
        GrassMask bit = GrassMask{1} << idx;
        if (mask & bit) fail(what + ".generators: repeated index");
        mask |= bit;
      }
    }
    TrigPoly profile;
    const json& harms = require(term, "harmonics", what);
    if (!harms.is_array()) fail(what + ".harmonics: expected an array");
    for (const json& h : harms) {
      if (!h.is_object()) fail(what + ".harmonics: entry must be an object");
      reject_unknown_keys(h, {"m", "cos", "sin"}, what + ".harmonics");
      int m = get_int(require(h, "m", what + ".harmonics"), what + ".harmonics.m");
      if (m < 0) fail(what + ".harmonics.m: expected m >= 0");
      double c = 0, s = 0;
      if (auto it = h.find("cos"); it != h.end()) c = get_double(*it, what + ".harmonics.cos");
      if (auto it = h.find("sin"); it != h.end()) s = get_double(*it, what + ".harmonics.sin");
      if (m == 0) {
        if (s != 0) fail(what + ".harmonics: the constant term has no sine part");
        profile += TrigPoly::constant(c);
      } else {
        profile += TrigPoly::cosine(m, c) + TrigPoly::sine(m, s);
      }
    }
    value += GrassFun::term(mask, profile);
  }
  return value;
}

std::vector<GrassFun> parse_component_list(const json& j, std::size_t count,
                                           std::size_t generator_count, const std::string& what) {
  if (!j.is_array() || j.size() != count)
    fail(what + ": expected " + std::to_string(count) + " component profiles");
  std::vector<GrassFun> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(parse_profile(j[i], generator_count, what + "[" + std::to_string(i) + "]"));
  return out;
}

std::string resolve(const std::string& scenario_path, const std::string& ref) {
  std::filesystem::path p(ref);
  if (p.is_absolute()) return ref;
  return (std::filesystem::path(scenario_path).parent_path() / p).string();
}

}  // namespace

LoadedChart load_chart_file(const std::string& path) {
  json j = read_document(path);
  const std::string what = "chart file";
  reject_unknown_keys(
      j, {"base_dim", "fiber_rank", "coords", "frame", "anchor", "bracket", "adapted_split"}, what);
  std::size_t n = get_size(require(j, "base_dim", what), what + ".base_dim");
  std::size_t r = get_size(require(j, "fiber_rank", what), what + ".fiber_rank");
  std::vector<std::string> coords, frame;
  if (auto it = j.find("coords"); it != j.end()) coords = get_string_list(*it, what + ".coords");
  if (auto it = j.find("frame"); it != j.end()) frame = get_string_list(*it, what + ".frame");
  if (!coords.empty() && coords.size() != n) fail(what + ".coords: expected base_dim names");
  if (!frame.empty() && frame.size() != r) fail(what + ".frame: expected fiber_rank names");
  AlgebroidChart chart(n, r, std::move(coords), std::move(frame));
  if (auto it = j.find("anchor"); it != j.end()) {
    if (!it->is_array() || it->size() != r) fail(what + ".anchor: expected fiber_rank rows");
    for (std::size_t I = 0; I < r; ++I) {
      const json& row = (*it)[I];
      if (!row.is_array() || row.size() != n) fail(what + ".anchor: expected base_dim columns");
      for (std::size_t mu = 0; mu < n; ++mu)
        chart.set_anchor(I, mu, get_poly(row[mu], chart.coords(), what + ".anchor"));
    }
  }
  if (auto it = j.find("bracket"); it != j.end()) {
    if (!it->is_array()) fail(what + ".bracket: expected an array of entries");
    for (const json& e : *it) {
      if (!e.is_object()) fail(what + ".bracket: entry must be an object");
      reject_unknown_keys(e, {"i", "j", "k", "value"}, what + ".bracket");
      std::size_t i = get_size(require(e, "i", what), what + ".bracket.i");
      std::size_t jj = get_size(require(e, "j", what), what + ".bracket.j");
      std::size_t k = get_size(require(e, "k", what), what + ".bracket.k");
      if (i >= jj) fail(what + ".bracket: entries require i < j");
      if (jj >= r || k >= r) fail(what + ".bracket: frame index out of range");
      chart.set_bracket(k, i, jj, get_poly(require(e, "value", what), chart.coords(),
                                           what + ".bracket.value"));
    }
  }
  LoadedChart out{std::move(chart), std::nullopt};
  if (auto it = j.find("adapted_split"); it != j.end()) {
    const std::string sw = what + ".adapted_split";
    if (!it->is_object()) fail(sw + ": expected an object");
    reject_unknown_keys(*it, {"primed_coords", "primed_frame"}, sw);
    AdaptedSplit split{out.chart, {}, {}};
    if (!require(*it, "primed_coords", sw).is_array() || !require(*it, "primed_frame", sw).is_array())
      fail(sw + ": expected arrays of indices");
    for (const json& v : require(*it, "primed_coords", sw)) {
      std::size_t idx = get_size(v, sw + ".primed_coords");
      if (idx >= n) fail(sw + ".primed_coords: index out of range");
      split.primed_coords.push_back(idx);
    }
    for (const json& v : require(*it, "primed_frame", sw)) {
      std::size_t idx = get_size(v, sw + ".primed_frame");
      if (idx >= r) fail(sw + ".primed_frame: index out of range");
      split.primed_frame.push_back(idx);
    }
    out.split = std::move(split);
  }
  return out;
}

Superconnection load_coupling_file(const std::string& path, const AlgebroidChart& chart) {
  json j = read_document(path);
  const std::string what = "coupling file";
  reject_unknown_keys(j, {"bundle", "A", "v", "omega"}, what);
  GradedBundle b = parse_bundle(require(j, "bundle", what), what + ".bundle");
  EConnection conn(chart, b);
  const json& coeffs = require(j, "A", what);
  if (!coeffs.is_array() || coeffs.size() != chart.fiber_rank())
    fail(what + ".A: expected one coefficient per frame index");
  for (std::size_t I = 0; I < chart.fiber_rank(); ++I) {
    GradedMatrix<Poly> a = parse_graded_matrix(coeffs[I], b, b, chart.coords(),
                                               what + ".A[" + std::to_string(I) + "]");
    if (a.degree != 0) fail(what + ".A: connection coefficients must have degree 0");
    conn.set_coefficient(I, std::move(a));
  }
  Superconnection D(std::move(conn));
  if (auto it = j.find("v"); it != j.end()) {
    GradedMatrix<Poly> v = parse_graded_matrix(*it, b, b, chart.coords(), what + ".v");
    if (v.degree != 1) fail(what + ".v: expected degree 1");
    D.set_v(std::move(v));
  }
  if (auto it = j.find("omega"); it != j.end()) {
    if (!it->is_array()) fail(what + ".omega: expected an array of entries");
    std::map<int, SuperForm> forms;
    for (const json& e : *it) {
      if (!e.is_object()) fail(what + ".omega: entry must be an object");
      reject_unknown_keys(e, {"k", "indices", "block"}, what + ".omega");
      int k = get_int(require(e, "k", what), what + ".omega.k");
      if (k < 2 || k > static_cast<int>(chart.fiber_rank()))
        fail(what + ".omega.k: expected 2 <= k <= fiber_rank");
      const json& idxj = require(e, "indices", what);
      if (!idxj.is_array() || idxj.size() != static_cast<std::size_t>(k))
        fail(what + ".omega.indices: expected k indices");
      MultiIndex idx;
      for (const json& v : idxj) {
        int i = get_int(v, what + ".omega.indices");
        if (i < 0 || i >= static_cast<int>(chart.fiber_rank()))
          fail(what + ".omega.indices: frame index out of range");
        if (!idx.empty() && i <= idx.back())
          fail(what + ".omega.indices: expected strictly increasing indices");
        idx.push_back(i);
      }
      GradedMatrix<Poly> blk =
          parse_graded_matrix(require(e, "block", what), b, b, chart.coords(), what + ".omega.block");
      if (blk.degree != 1 - k) fail(what + ".omega.block: expected degree 1 - k");
      forms.try_emplace(k, SuperForm(chart.fiber_rank(), b, b)).first->second.add_component(idx, blk);
    }
    for (auto& [k, w] : forms) D.set_omega(k, std::move(w));
  }
  return D;
}

SuperForm parse_form(const nlohmann::json& spec, const AlgebroidChart& chart,
                     const GradedBundle& source, const GradedBundle& target) {
  const std::string what = "form specification";
  if (!spec.is_object()) fail(what + ": expected an object");
  reject_unknown_keys(spec, {"components"}, what);
  SuperForm w(chart.fiber_rank(), source, target);
  const json& comps = require(spec, "components", what);
  if (!comps.is_array()) fail(what + ".components: expected an array");
  for (const json& e : comps) {
    if (!e.is_object()) fail(what + ".components: entry must be an object");
    reject_unknown_keys(e, {"indices", "block"}, what + ".components");
    MultiIndex idx;
    const json& idxj = require(e, "indices", what);
    if (!idxj.is_array()) fail(what + ".components.indices: expected an array");
    for (const json& v : idxj) {
      int i = get_int(v, what + ".components.indices");
      if (i < 0 || i >= static_cast<int>(chart.fiber_rank()))
        fail(what + ".components.indices: frame index out of range");
      if (!idx.empty() && i <= idx.back())
        fail(what + ".components.indices: expected strictly increasing indices");
      idx.push_back(i);
    }
    w.add_component(idx, parse_graded_matrix(require(e, "block", what), source, target,
                                             chart.coords(), what + ".components.block"));
  }
  return w;
}

Scenario load_scenario_file(const std::string& path) {
  json j = read_document(path);
  const std::string what = "scenario file";
  reject_unknown_keys(j,
                      {"chart", "coupling", "couplings", "extra_generators", "fields", "lattices",
                       "forms", "insertion", "tolerance"},
                      what);
  LoadedChart lc = load_chart_file(resolve(path, get_string(require(j, "chart", what), what)));
  Scenario sc{std::move(lc.chart), {}, {}, {}, {}, 0.5, 1e-10};
  if (j.contains("coupling") == j.contains("couplings"))
    fail(what + ": expected exactly one of 'coupling' or 'couplings'");
  if (auto it = j.find("coupling"); it != j.end()) {
    sc.couplings.push_back(
        load_coupling_file(resolve(path, get_string(*it, what + ".coupling")), sc.chart));
  } else {
    const json& list = j["couplings"];
    if (!list.is_array() || list.size() != 2) fail(what + ".couplings: expected two references");
    for (const json& ref : list)
      sc.couplings.push_back(
          load_coupling_file(resolve(path, get_string(ref, what + ".couplings")), sc.chart));
  }
  std::size_t extra = 2;
  if (auto it = j.find("extra_generators"); it != j.end())
    extra = get_size(*it, what + ".extra_generators");
  GeneratorTable table = boundary_table(sc.chart, extra);
  std::size_t gens = table.gens.size();
  if (gens > 31) fail(what + ": generator budget exceeded");
  const json& fields = require(j, "fields", what);
  if (!fields.is_object()) fail(what + ".fields: expected an object");
  reject_unknown_keys(fields, {"phi", "xi", "psi", "etap"}, what + ".fields");
  std::size_t n = sc.chart.base_dim(), r = sc.chart.fiber_rank();
  sc.config = FieldConfig{sc.chart, std::move(table), {}, {}, {}, {}};
  sc.config.phi = parse_component_list(require(fields, "phi", what), n, gens, what + ".fields.phi");
  sc.config.xi = parse_component_list(require(fields, "xi", what), r, gens, what + ".fields.xi");
  sc.config.psi = parse_component_list(require(fields, "psi", what), r, gens, what + ".fields.psi");
  sc.config.etap =
      parse_component_list(require(fields, "etap", what), n, gens, what + ".fields.etap");
  ValidationReport vr = validate_config(sc.config);
  if (!vr.passed())
    fail(what + ".fields: " + vr.entries.front().what +
         (vr.entries.front().residual.empty() ? "" : " (" + vr.entries.front().residual + ")"));
  if (auto it = j.find("lattices"); it != j.end()) {
    if (!it->is_array() || it->empty()) fail(what + ".lattices: expected a non-empty array");
    for (const json& v : *it) {
      int nl = get_int(v, what + ".lattices");
      if (nl < 2) fail(what + ".lattices: expected at least two links");
      sc.lattices.push_back(nl);
    }
  }
  if (auto it = j.find("forms"); it != j.end()) {
    if (!it->is_array()) fail(what + ".forms: expected an array");
    for (const json& spec : *it) sc.form_specs.push_back(spec);
  }
  if (auto it = j.find("insertion"); it != j.end()) {
    sc.insertion = get_double(*it, what + ".insertion");
    if (!(sc.insertion > 0.0 && sc.insertion < 1.0))
      fail(what + ".insertion: expected a point strictly inside (0, 1)");
  }
  if (auto it = j.find("tolerance"); it != j.end()) {
    sc.tolerance = get_double(*it, what + ".tolerance");
    if (!(sc.tolerance > 0)) fail(what + ".tolerance: expected a positive number");
  }
  return sc;
}

std::string render_matrix(const GradedMatrix<Poly>& m, const std::vector<std::string>& coords) {
  if (m.is_zero()) return "0";
  std::string out;
  for (const auto& [k, blk] : m.blocks) {
    if (blk.is_zero()) continue;
    if (!out.empty()) out += "; ";
    out += "deg " + std::to_string(k) + ": [";
    for (std::size_t i = 0; i < blk.rows; ++i) {
      if (i) out += ", ";
      out += "[";
      for (std::size_t c = 0; c < blk.cols; ++c) {
        if (c) out += ", ";
        out += blk(i, c).to_string(coords);
      }
      out += "]";
    }
    out += "]";
  }
  return out.empty() ? "0" : out;
}

}  // namespace larep::cli
