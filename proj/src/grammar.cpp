#include "propmap/grammar.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "map_nodes.hpp"

namespace propmap {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Recursive-descent parser over a shared cursor. Generator names are
// resolved by context: `power(d)` is the planar power in map position and
// the circle power in sphere position.
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  MapSpec parse_map_top() {
    MapSpec m = parse_map_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after map expression");
    return m;
  }

  SphereMapSpec parse_sphere_top() {
    SphereMapSpec s = parse_sphere_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after sphere-map expression");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw DomainError("parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect_char(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool try_char(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string read_ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  std::string peek_ident() {
    size_t saved = pos_;
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string id = text_.substr(start, pos_ - start);
    pos_ = saved;
    return id;
  }

  double read_number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos_ += static_cast<size_t>(end - begin);
    return v;
  }

  int read_int() {
    double v = read_number();
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail("expected integer");
    return i;
  }

  std::vector<double> read_number_list() {
    std::vector<double> out;
    out.push_back(read_number());
    while (try_char(',')) out.push_back(read_number());
    return out;
  }

  // --- map expressions ---

  MapSpec parse_map_expr() {
    std::string id = read_ident();
    if (id == "id") {
      expect_char('(');
      int n = read_int();
      expect_char(')');
      return MapSpec::identity(n);
    }
    if (id == "const") {
      expect_char('(');
      int n = read_int();
      expect_char(':');
      auto vals = read_number_list();
      expect_char(')');
      Vec v(vals.size());
      for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
      return MapSpec::constant(n, v);
    }
    if (id == "linear") {
      expect_char('(');
      int k = read_int();
      expect_char(',');
      int n = read_int();
      expect_char(':');
      auto vals = read_number_list();
      expect_char(')');
      if (static_cast<int>(vals.size()) != k * n) fail("linear: expected k*n entries");
      Mat m(k, n);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = vals[i * n + j];
      return MapSpec::linear(m);
    }
    if (id == "dilate") {
      expect_char('(');
      double lambda = read_number();
      expect_char(',');
      int n = read_int();
      expect_char(')');
      return MapSpec::dilation(lambda, n);
    }
    if (id == "poly") {
      expect_char('(');
      auto coeffs = read_number_list();
      expect_char(')');
      return MapSpec::polynomial(coeffs);
    }
    if (id == "power") {
      expect_char('(');
      int d = read_int();
      expect_char(')');
      return MapSpec::planar_power(d);
    }
    if (id == "hopf") return MapSpec::radial_extension(SphereMapSpec::hopf());
    if (id == "clamp") {
      expect_char('(');
      double r = read_number();
      expect_char(',');
      int k = read_int();
      expect_char(')');
      return MapSpec::clamp_map(r, k);
    }
    if (id == "radial") {
      expect_char('(');
      SphereMapSpec f = parse_sphere_expr();
      expect_char(')');
      return MapSpec::radial_extension(f);
    }
    if (id == "suspend") {
      expect_char('(');
      MapSpec f = parse_map_expr();
      expect_char(')');
      return MapSpec::suspension(f);
    }
    if (id == "compose") {
      expect_char('(');
      MapSpec f = parse_map_expr();
      expect_char(',');
      MapSpec g = parse_map_expr();
      expect_char(')');
      return MapSpec::compose(f, g);
    }
    if (id == "radialize") {
      expect_char('(');
      MapSpec f = parse_map_expr();
      expect_char(')');
      return MapSpec::radialize_outside_ball(f);
    }
    if (id == "proper") {
      expect_char('(');
      MapSpec f = parse_map_expr();
      expect_char(')');
      return f.assert_proper();
    }
    if (id == "expr") {
      expect_char('(');
      int n = read_int();
      expect_char(':');
      std::vector<ScalarExpr> comps;
      comps.push_back(parse_scalar());
      while (try_char(',')) comps.push_back(parse_scalar());
      expect_char(')');
      return MapSpec::expressions(n, comps);
    }
    fail("unknown map generator '" + id + "'");
  }

  // --- sphere-map expressions ---

  SphereMapSpec parse_sphere_expr() {
    std::string id = read_ident();
    if (id == "id") {
      expect_char('(');
      int n = read_int();
      expect_char(')');
      return SphereMapSpec::identity(n);
    }
    if (id == "const") {
      expect_char('(');
      auto vals = read_number_list();
      expect_char(')');
      Vec v(vals.size());
      for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
      const double nv = v.norm();
      if (nv < tol::kDegenerateNorm) fail("sphere const: zero point");
      // domain dimension defaults to codomain dimension
      return SphereMapSpec::constant(static_cast<int>(vals.size()) - 1, v / nv);
    }
    if (id == "antipodal") {
      expect_char('(');
      int n = read_int();
      expect_char(')');
      return SphereMapSpec::antipodal(n);
    }
    if (id == "reflect") {
      expect_char('(');
      int n = read_int();
      expect_char(')');
      return SphereMapSpec::reflect_last(n);
    }
    if (id == "power") {
      expect_char('(');
      int d = read_int();
      expect_char(')');
      return SphereMapSpec::circle_power(d);
    }
    if (id == "hopf") return SphereMapSpec::hopf();
    if (id == "suspend") {
      expect_char('(');
      SphereMapSpec g = parse_sphere_expr();
      expect_char(')');
      return SphereMapSpec::suspension(g);
    }
    if (id == "compose") {
      expect_char('(');
      SphereMapSpec f = parse_sphere_expr();
      expect_char(',');
      SphereMapSpec g = parse_sphere_expr();
      expect_char(')');
      return SphereMapSpec::compose(f, g);
    }
    if (id == "restrict") {
      expect_char('(');
      MapSpec g = parse_map_expr();
      expect_char(')');
      return SphereMapSpec::restriction(g);
    }
    fail("unknown sphere-map generator '" + id + "'");
  }

  // --- scalar expressions ---

  ScalarExpr parse_scalar() { return parse_sum(); }

  ScalarExpr parse_sum() {
    ScalarExpr lhs = parse_term();
    for (;;) {
      if (try_char('+'))
        lhs = ScalarExpr::binary('+', lhs, parse_term());
      else if (try_char('-'))
        lhs = ScalarExpr::binary('-', lhs, parse_term());
      else
        return lhs;
    }
  }

  ScalarExpr parse_term() {
    ScalarExpr lhs = parse_unary();
    for (;;) {
      if (try_char('*'))
        lhs = ScalarExpr::binary('*', lhs, parse_unary());
      else if (try_char('/'))
        lhs = ScalarExpr::binary('/', lhs, parse_unary());
      else
        return lhs;
    }
  }

  ScalarExpr parse_unary() {
    if (try_char('-')) return ScalarExpr::negate(parse_unary());
    return parse_atom();
  }

  ScalarExpr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarExpr e = parse_scalar();
      expect_char(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return ScalarExpr::literal(read_number());
    }
    std::string id = read_ident();
    if (id == "norm") {
      expect_char('(');
      std::vector<ScalarExpr> args;
      args.push_back(parse_scalar());
      while (try_char(',')) args.push_back(parse_scalar());
      expect_char(')');
      return ScalarExpr::norm(std::move(args));
    }
    if (id == "min" || id == "max") {
      expect_char('(');
      ScalarExpr a = parse_scalar();
      expect_char(',');
      ScalarExpr b = parse_scalar();
      expect_char(')');
      return id == "min" ? ScalarExpr::min_of(a, b) : ScalarExpr::max_of(a, b);
    }
    if (id.size() >= 2 && id[0] == 'x') {
      char* end = nullptr;
      long idx = std::strtol(id.c_str() + 1, &end, 10);
      if (*end == '\0' && idx >= 1) return ScalarExpr::variable(static_cast<int>(idx) - 1);
    }
    fail("unknown scalar token '" + id + "'");
  }

  const std::string& text_;
  size_t pos_ = 0;
};

std::string print_map(const detail::MapNode& n);

std::string print_sphere(const detail::SphereNode& n) {
  using detail::SphereKind;
  switch (n.kind) {
    case SphereKind::Identity: return "id(" + std::to_string(n.in_sdim) + ")";
    case SphereKind::Constant: {
      std::string s = "const(";
      for (int i = 0; i < n.point.size(); ++i) {
        if (i) s += ", ";
        s += format_double(n.point[i]);
      }
      return s + ")";
    }
    case SphereKind::Antipodal: return "antipodal(" + std::to_string(n.in_sdim) + ")";
    case SphereKind::ReflectLast: return "reflect(" + std::to_string(n.in_sdim) + ")";
    case SphereKind::CirclePower: return "power(" + std::to_string(n.power) + ")";
    case SphereKind::Hopf: return "hopf";
    case SphereKind::Suspend: return "suspend(" + print_sphere(*n.a) + ")";
    case SphereKind::Compose:
      return "compose(" + print_sphere(*n.a) + ", " + print_sphere(*n.b) + ")";
    case SphereKind::Restrict: return "restrict(" + print_map(*n.restricted) + ")";
  }
  throw Error("sphere print: unreachable");
}

std::string print_map(const detail::MapNode& n) {
  using detail::MapKind;
  switch (n.kind) {
    case MapKind::Identity: return "id(" + std::to_string(n.in_dim) + ")";
    case MapKind::Constant: {
      std::string s = "const(" + std::to_string(n.in_dim) + ": ";
      for (int i = 0; i < n.vector.size(); ++i) {
        if (i) s += ", ";
        s += format_double(n.vector[i]);
      }
      return s + ")";
    }
    case MapKind::Linear: {
      std::string s = "linear(" + std::to_string(n.out_dim) + ", " + std::to_string(n.in_dim) + ": ";
      bool first = true;
      for (int i = 0; i < n.matrix.rows(); ++i)
        for (int j = 0; j < n.matrix.cols(); ++j) {
          if (!first) s += ", ";
          first = false;
          s += format_double(n.matrix(i, j));
        }
      return s + ")";
    }
    case MapKind::Dilation:
      return "dilate(" + format_double(n.scalar) + ", " + std::to_string(n.in_dim) + ")";
    case MapKind::Poly: {
      std::string s = "poly(";
      for (size_t i = 0; i < n.coeffs.size(); ++i) {
        if (i) s += ", ";
        s += format_double(n.coeffs[i]);
      }
      return s + ")";
    }
    case MapKind::PlanarPower: return "power(" + std::to_string(n.power) + ")";
    case MapKind::Clamp:
      return "clamp(" + format_double(n.scalar) + ", " + std::to_string(n.in_dim) + ")";
    case MapKind::Radial: return "radial(" + print_sphere(*n.sphere) + ")";
    case MapKind::Suspend: return "suspend(" + print_map(*n.a) + ")";
    case MapKind::Compose: return "compose(" + print_map(*n.a) + ", " + print_map(*n.b) + ")";
    case MapKind::Exprs: {
      std::string s = "expr(" + std::to_string(n.in_dim) + ": ";
      std::string body;
      for (size_t i = 0; i < n.exprs.size(); ++i) {
        if (i) body += ", ";
        body += n.exprs[i].to_text();
      }
      s += body + ")";
      return n.proper ? "proper(" + s + ")" : s;
    }
    case MapKind::Radialize: return "radialize(" + print_map(*n.a) + ")";
    case MapKind::Custom: return "custom(" + n.custom->describe() + ")";
  }
  throw Error("map print: unreachable");
}

}  // namespace

MapSpec parse_map(const std::string& text) { return Parser(text).parse_map_top(); }

SphereMapSpec parse_sphere_map(const std::string& text) { return Parser(text).parse_sphere_top(); }

std::string map_to_text(const MapSpec& spec) {
  if (!spec.node_) throw Error("use of an empty map");
  return print_map(*spec.node_);
}

std::string sphere_to_text(const SphereMapSpec& spec) {
  if (!spec.node_) throw Error("use of an empty sphere map");
  return print_sphere(*spec.node_);
}

std::string MapSpec::to_text() const { return map_to_text(*this); }

std::string SphereMapSpec::to_text() const { return sphere_to_text(*this); }

}  // namespace propmap
