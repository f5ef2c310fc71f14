#include "fman/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

namespace fman {

namespace {

std::shared_ptr<const Expr::Node> make_node(Expr::Node n) {
  return std::make_shared<const Expr::Node>(std::move(n));
}

int find_coord(std::span<const std::string> coords, const std::string& name) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

Expr Expr::constant(double v) { return Expr(make_node({Kind::constant, v, {}, 0, AnalyticFn::exp, nullptr, nullptr, {}})); }
Expr Expr::coord(std::string name) {
  return Expr(make_node({Kind::coord, 0.0, std::move(name), 0, AnalyticFn::exp, nullptr, nullptr, {}}));
}
Expr Expr::neg(Expr a) { return Expr(make_node({Kind::neg, 0.0, {}, 0, AnalyticFn::exp, a.node_, nullptr, {}})); }
Expr Expr::add(Expr a, Expr b) { return Expr(make_node({Kind::add, 0.0, {}, 0, AnalyticFn::exp, a.node_, b.node_, {}})); }
Expr Expr::sub(Expr a, Expr b) { return Expr(make_node({Kind::sub, 0.0, {}, 0, AnalyticFn::exp, a.node_, b.node_, {}})); }
Expr Expr::mul(Expr a, Expr b) { return Expr(make_node({Kind::mul, 0.0, {}, 0, AnalyticFn::exp, a.node_, b.node_, {}})); }
Expr Expr::div(Expr a, Expr b) { return Expr(make_node({Kind::div, 0.0, {}, 0, AnalyticFn::exp, a.node_, b.node_, {}})); }
Expr Expr::pow(Expr a, int exponent) {
  return Expr(make_node({Kind::pow, 0.0, {}, exponent, AnalyticFn::exp, a.node_, nullptr, {}}));
}
Expr Expr::call(AnalyticFn fn, Expr a) { return Expr(make_node({Kind::call, 0.0, {}, 0, fn, a.node_, nullptr, {}})); }

namespace {

void collect_coords(const Expr::Node* n, std::set<std::string>& out) {
  if (!n) return;
  if (n->kind == Expr::Kind::coord) out.insert(n->name);
  collect_coords(n->a.get(), out);
  collect_coords(n->b.get(), out);
}

}  // namespace

std::vector<std::string> Expr::coordinates() const {
  std::set<std::string> s;
  if (node_) collect_coords(node_.get(), s);
  return {s.begin(), s.end()};
}

bool Expr::is_constant() const { return coordinates().empty(); }

Jet Expr::eval_jet(std::span<const std::string> coords, std::span<const double> point, int order) const {
  if (!node_) throw Error(Errc::invalid, "empty expression");
  if (coords.size() != point.size()) throw Error(Errc::shape, "point length does not match coordinate count");
  const int n = static_cast<int>(coords.size());
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::constant:
      return Jet::constant(n, order, nd.value);
    case Kind::coord: {
      int i = find_coord(coords, nd.name);
      if (i < 0) throw Error(Errc::unknown_name, "unknown coordinate '" + nd.name + "'");
      return Jet::variable(n, order, i, point[static_cast<std::size_t>(i)]);
    }
    case Kind::neg:
      return -Expr(nd.a).eval_jet(coords, point, order);
    case Kind::add:
      return Expr(nd.a).eval_jet(coords, point, order) + Expr(nd.b).eval_jet(coords, point, order);
    case Kind::sub:
      return Expr(nd.a).eval_jet(coords, point, order) - Expr(nd.b).eval_jet(coords, point, order);
    case Kind::mul:
      return Expr(nd.a).eval_jet(coords, point, order) * Expr(nd.b).eval_jet(coords, point, order);
    case Kind::div:
      return Expr(nd.a).eval_jet(coords, point, order) / Expr(nd.b).eval_jet(coords, point, order);
    case Kind::pow:
      return Expr(nd.a).eval_jet(coords, point, order).pow_int(nd.exponent);
    case Kind::call:
      return jet_apply_analytic(nd.fn, Expr(nd.a).eval_jet(coords, point, order));
  }
  throw Error(Errc::invalid, "corrupt expression node");
}

double Expr::eval(std::span<const std::string> coords, std::span<const double> point) const {
  if (!node_) throw Error(Errc::invalid, "empty expression");
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::constant:
      return nd.value;
    case Kind::coord: {
      int i = find_coord(coords, nd.name);
      if (i < 0) throw Error(Errc::unknown_name, "unknown coordinate '" + nd.name + "'");
      return point[static_cast<std::size_t>(i)];
    }
    case Kind::neg:
      return -Expr(nd.a).eval(coords, point);
    case Kind::add:
      return Expr(nd.a).eval(coords, point) + Expr(nd.b).eval(coords, point);
    case Kind::sub:
      return Expr(nd.a).eval(coords, point) - Expr(nd.b).eval(coords, point);
    case Kind::mul:
      return Expr(nd.a).eval(coords, point) * Expr(nd.b).eval(coords, point);
    case Kind::div: {
      double den = Expr(nd.b).eval(coords, point);
      if (den == 0.0) throw Error(Errc::domain, "division by zero");
      return Expr(nd.a).eval(coords, point) / den;
    }
    case Kind::pow:
      return std::pow(Expr(nd.a).eval(coords, point), nd.exponent);
    case Kind::call: {
      double v = Expr(nd.a).eval(coords, point);
      switch (nd.fn) {
        case AnalyticFn::exp: return std::exp(v);
        case AnalyticFn::log:
          if (v <= 0.0) throw Error(Errc::domain, "log of non-positive value");
          return std::log(v);
        case AnalyticFn::sin: return std::sin(v);
        case AnalyticFn::cos: return std::cos(v);
        case AnalyticFn::sqrt:
          if (v < 0.0) throw Error(Errc::domain, "sqrt of negative value");
          return std::sqrt(v);
      }
      throw Error(Errc::invalid, "corrupt call node");
    }
  }
  throw Error(Errc::invalid, "corrupt expression node");
}

const char* analytic_fn_name(AnalyticFn f) {
  switch (f) {
    case AnalyticFn::exp: return "exp";
    case AnalyticFn::log: return "log";
    case AnalyticFn::sin: return "sin";
    case AnalyticFn::cos: return "cos";
    case AnalyticFn::sqrt: return "sqrt";
  }
  return "?";
}

namespace {

// precedence levels for printing: add=1, mul=2, unary=3, pow=4, atom=5
int node_level(const Expr::Node& n) {
  switch (n.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::neg: return 3;
    case Expr::Kind::pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const Expr::Node& n, std::string& out, int parent_level, bool right_assoc_slot) {
  const int level = node_level(n);
  const bool parens = level < parent_level || (level == parent_level && right_assoc_slot);
  if (parens) out += '(';
  switch (n.kind) {
    case Expr::Kind::constant:
      out += format_number(n.value);
      break;
    case Expr::Kind::coord:
      out += n.name;
      break;
    case Expr::Kind::neg:
      out += '-';
      print_node(*n.a, out, 4, false);  // bind operand tighter than unary minus
      break;
    case Expr::Kind::add:
      print_node(*n.a, out, 1, false);
      out += " + ";
      print_node(*n.b, out, 1, true);
      break;
    case Expr::Kind::sub:
      print_node(*n.a, out, 1, false);
      out += " - ";
      print_node(*n.b, out, 1, true);
      break;
    case Expr::Kind::mul:
      print_node(*n.a, out, 2, false);
      out += "*";
      print_node(*n.b, out, 2, true);
      break;
    case Expr::Kind::div:
      print_node(*n.a, out, 2, false);
      out += "/";
      print_node(*n.b, out, 2, true);
      break;
    case Expr::Kind::pow:
      print_node(*n.a, out, 5, false);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    case Expr::Kind::call:
      out += analytic_fn_name(n.fn);
      out += '(';
      print_node(*n.a, out, 0, false);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Expr::to_string() const {
  if (!node_) return "";
  std::string out;
  print_node(*node_, out, 0, false);
  return out;
}

// ---------------------------------------------------------------------------
// recursive-descent parser

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t start) {
    throw Error(Errc::parse, msg, SourceSpan{start, std::max(start + 1, pos)});
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = Expr::add(e, parse_term());
      else if (accept('-'))
        e = Expr::sub(e, parse_term());
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept('*'))
        e = Expr::mul(e, parse_factor());
      else if (accept('/'))
        e = Expr::div(e, parse_factor());
      else
        return e;
    }
  }

  // factor := ("-")* base ("^" sint)?  with ^ applied before the minus signs,
  // honoring the precedence ^ > unary minus.
  Expr parse_factor() {
    skip_ws();
    int negs = 0;
    while (accept('-')) ++negs;
    Expr e = parse_base();
    if (accept('^')) e = Expr::pow(e, parse_int_literal());
    for (int i = 0; i < negs; ++i) e = Expr::neg(e);
    return e;
  }

  int parse_int_literal() {
    skip_ws();
    std::size_t start = pos;
    bool negative = false;
    if (pos < text.size() && text[pos] == '-') {
      negative = true;
      ++pos;
    }
    std::size_t digits_start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits_start) fail("expected integer exponent", start);
    if (pos < text.size() && (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
      fail("non-integer exponent", start);
    long v = std::stol(text.substr(digits_start, pos - digits_start));
    return static_cast<int>(negative ? -v : v);
  }

  Expr parse_base() {
    skip_ws();
    std::size_t start = pos;
    if (pos >= text.size()) fail("unexpected end of expression", start);
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      if (!accept(')')) fail("unclosed parenthesis", start);
      return e;
    }
    if (c == '-') {
      ++pos;
      return Expr::neg(parse_base());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'", start);
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos++;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' belongs to a following identifier, not this number
      }
    }
    try {
      return Expr::constant(std::stod(text.substr(start, pos - start)));
    } catch (const std::exception&) {
      fail("malformed number", start);
    }
  }

  Expr parse_ident() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name = text.substr(start, pos - start);
    if (accept('(')) {
      AnalyticFn fn;
      if (name == "exp")
        fn = AnalyticFn::exp;
      else if (name == "log")
        fn = AnalyticFn::log;
      else if (name == "sin")
        fn = AnalyticFn::sin;
      else if (name == "cos")
        fn = AnalyticFn::cos;
      else if (name == "sqrt")
        fn = AnalyticFn::sqrt;
      else
        fail("unknown function '" + name + "'", start);
      Expr arg = parse_expr();
      if (!accept(')')) fail("unclosed call to '" + name + "'", start);
      return Expr::call(fn, arg);
    }
    return Expr::coord(std::move(name));
  }
};

}  // namespace

Expr parse_expression(const std::string& text) {
  Parser p(text);
  Expr e = p.parse_expr();
  if (!p.at_end()) p.fail("trailing input after expression", p.pos);
  return e;
}

namespace {

Expr substitute_node(const Expr::Node& n, std::span<const std::string> coords,
                     const std::vector<Expr>& replacement) {
  switch (n.kind) {
    case Expr::Kind::constant:
      return Expr::constant(n.value);
    case Expr::Kind::coord: {
      int i = find_coord(coords, n.name);
      if (i < 0) throw Error(Errc::unknown_name, "unknown coordinate '" + n.name + "'");
      return replacement[static_cast<std::size_t>(i)];
    }
    case Expr::Kind::neg:
      return Expr::neg(substitute_node(*n.a, coords, replacement));
    case Expr::Kind::add:
      return Expr::add(substitute_node(*n.a, coords, replacement), substitute_node(*n.b, coords, replacement));
    case Expr::Kind::sub:
      return Expr::sub(substitute_node(*n.a, coords, replacement), substitute_node(*n.b, coords, replacement));
    case Expr::Kind::mul:
      return Expr::mul(substitute_node(*n.a, coords, replacement), substitute_node(*n.b, coords, replacement));
    case Expr::Kind::div:
      return Expr::div(substitute_node(*n.a, coords, replacement), substitute_node(*n.b, coords, replacement));
    case Expr::Kind::pow:
      return Expr::pow(substitute_node(*n.a, coords, replacement), n.exponent);
    case Expr::Kind::call:
      return Expr::call(n.fn, substitute_node(*n.a, coords, replacement));
  }
  throw Error(Errc::invalid, "corrupt expression node");
}

double det_lu(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace

Expr substitute_linear(const Expr& e, std::span<const std::string> coords,
                       const std::vector<std::vector<double>>& matrix, std::span<const double> offset) {
  const std::size_t n = coords.size();
  if (matrix.size() != n || offset.size() != n) throw Error(Errc::shape, "substitution matrix/offset size mismatch");
  for (const auto& row : matrix)
    if (row.size() != n) throw Error(Errc::shape, "substitution matrix is not square");
  if (std::abs(det_lu(matrix)) < 1e-300) throw Error(Errc::singular, "singular substitution matrix");

  std::vector<Expr> replacement;
  replacement.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr acc = Expr::constant(offset[i]);
    bool have = offset[i] != 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double a = matrix[i][j];
      if (a == 0.0) continue;
      Expr term = (a == 1.0) ? Expr::coord(coords[j]) : Expr::mul(Expr::constant(a), Expr::coord(coords[j]));
      acc = have ? Expr::add(acc, term) : term;
      have = true;
    }
    if (!have) acc = Expr::constant(0.0);
    replacement.push_back(acc);
  }
  return substitute_node(e.node(), coords, replacement);
}

}  // namespace fman
