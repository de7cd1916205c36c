#include "larep/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace larep {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
};

Int parse_integer(Cursor& cur) {
  cur.skip_ws();
  std::size_t start = cur.pos;
  std::string digits;
  while (cur.pos < cur.s.size() && std::isdigit(static_cast<unsigned char>(cur.s[cur.pos])))
    digits += cur.s[cur.pos++];
  if (digits.empty()) throw ParseError("expected integer", start);
  if (cur.pos < cur.s.size() && cur.s[cur.pos] == '.')
    throw ParseError("decimal literals are not allowed; write a fraction", cur.pos);
  return Int(digits);
}

std::string parse_name(Cursor& cur) {
  cur.skip_ws();
  std::size_t start = cur.pos;
  std::string name;
  while (cur.pos < cur.s.size() &&
         (std::isalnum(static_cast<unsigned char>(cur.s[cur.pos])) || cur.s[cur.pos] == '_'))
    name += cur.s[cur.pos++];
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])))
    throw ParseError("expected coordinate name", start);
  return name;
}

// factor = rational | name['^' int]
// term   = factor ('*' factor)*
Poly parse_term(Cursor& cur, const std::vector<std::string>& coords) {
  const std::size_t n = coords.size();
  Rational coeff = 1;
  Poly::Exponents expo(n, 0);
  bool first = true;
  for (;;) {
    char c = cur.peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int num = parse_integer(cur);
      Int den = 1;
      if (cur.accept('/')) {
        std::size_t at = cur.pos;
        den = parse_integer(cur);
        if (den == 0) throw ParseError("zero denominator", at);
      }
      coeff *= Rational(num, den);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t at = cur.pos;
      std::string name = parse_name(cur);
      auto it = std::find(coords.begin(), coords.end(), name);
      if (it == coords.end()) throw ParseError("unknown coordinate '" + name + "'", at);
      unsigned k = 1;
      if (cur.accept('^')) {
        Int e = parse_integer(cur);
        if (e < 0 || e > 1000000) throw ParseError("exponent out of range", cur.pos);
        k = static_cast<unsigned>(e);
      }
      expo[static_cast<std::size_t>(it - coords.begin())] += k;
    } else if (first) {
      throw ParseError("expected term", cur.pos);
    } else {
      break;
    }
    first = false;
    if (!cur.accept('*')) break;
  }
  Poly p(n);
  p.add_term(expo, coeff);
  return p;
}

}  // namespace

Poly parse_poly(const std::string& text, const std::vector<std::string>& coords) {
  Cursor cur{text};
  Poly result(coords.size());
  bool negate = false;
  // leading sign
  for (;;) {
    if (cur.accept('-'))
      negate = !negate;
    else if (!cur.accept('+'))
      break;
  }
  for (;;) {
    Poly t = parse_term(cur, coords);
    result += negate ? -t : t;
    if (cur.eof()) break;
    char c = cur.peek();
    if (c == '+' || c == '-') {
      negate = false;
      for (;;) {
        if (cur.accept('-'))
          negate = !negate;
        else if (!cur.accept('+'))
          break;
      }
    } else {
      throw ParseError("unexpected character", cur.pos);
    }
  }
  return result;
}

std::string Poly::to_string(const std::vector<std::string>& coords) const {
  if (coords.size() != nvars_) throw std::invalid_argument("Poly::to_string: name count mismatch");
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Rational a = c;
    if (first) {
      if (a < 0) {
        out << "-";
        a = -a;
      }
    } else {
      out << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    bool has_var = std::any_of(e.begin(), e.end(), [](unsigned k) { return k > 0; });
    bool wrote = false;
    if (a != 1 || !has_var) {
      out << a;
      wrote = true;
    }
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (wrote) out << "*";
      out << coords[i];
      if (e[i] > 1) out << "^" << e[i];
      wrote = true;
    }
  }
  return out.str();
}

std::string Poly::to_string() const {
  std::vector<std::string> names;
  names.reserve(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) names.push_back("x" + std::to_string(i + 1));
  return to_string(names);
}

}  // namespace larep
