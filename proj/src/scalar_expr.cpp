#include "propmap/scalar_expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "propmap/config.hpp"

namespace propmap {

namespace {

enum class Op { Var, Lit, Add, Sub, Mul, Div, Neg, Norm, Min, Max };

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

struct ScalarExpr::Node {
  Op op = Op::Lit;
  double value = 0.0;
  int var = -1;
  std::vector<ScalarExpr> args;
};

ScalarExpr ScalarExpr::variable(int index) {
  if (index < 0) throw DomainError("scalar expr: negative coordinate index");
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index;
  e.node_ = n;
  return e;
}

ScalarExpr ScalarExpr::literal(double value) {
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  n->op = Op::Lit;
  n->value = value;
  e.node_ = n;
  return e;
}

ScalarExpr ScalarExpr::binary(char op, ScalarExpr lhs, ScalarExpr rhs) {
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  switch (op) {
    case '+': n->op = Op::Add; break;
    case '-': n->op = Op::Sub; break;
    case '*': n->op = Op::Mul; break;
    case '/': n->op = Op::Div; break;
    default: throw DomainError("scalar expr: unknown operator");
  }
  n->args = {std::move(lhs), std::move(rhs)};
  e.node_ = n;
  return e;
}

ScalarExpr ScalarExpr::negate(ScalarExpr arg) {
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  n->op = Op::Neg;
  n->args = {std::move(arg)};
  e.node_ = n;
  return e;
}

ScalarExpr ScalarExpr::norm(std::vector<ScalarExpr> args) {
  if (args.empty()) throw DomainError("norm() needs at least one argument");
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  n->op = Op::Norm;
  n->args = std::move(args);
  e.node_ = n;
  return e;
}

ScalarExpr ScalarExpr::min_of(ScalarExpr lhs, ScalarExpr rhs) {
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  n->op = Op::Min;
  n->args = {std::move(lhs), std::move(rhs)};
  e.node_ = n;
  return e;
}

ScalarExpr ScalarExpr::max_of(ScalarExpr lhs, ScalarExpr rhs) {
  ScalarExpr e;
  auto n = std::make_shared<Node>();
  n->op = Op::Max;
  n->args = {std::move(lhs), std::move(rhs)};
  e.node_ = n;
  return e;
}

double ScalarExpr::eval(const Eigen::VectorXd& point) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Var:
      if (n.var >= point.size())
        throw DomainError("scalar expr references coordinate x" +
                          std::to_string(n.var + 1) + " beyond input dimension");
      return point[n.var];
    case Op::Lit: return n.value;
    case Op::Add: return n.args[0].eval(point) + n.args[1].eval(point);
    case Op::Sub: return n.args[0].eval(point) - n.args[1].eval(point);
    case Op::Mul: return n.args[0].eval(point) * n.args[1].eval(point);
    case Op::Div: return n.args[0].eval(point) / n.args[1].eval(point);
    case Op::Neg: return -n.args[0].eval(point);
    case Op::Norm: {
      double s = 0.0;
      for (const auto& a : n.args) {
        const double x = a.eval(point);
        s += x * x;
      }
      return std::sqrt(s);
    }
    case Op::Min: return std::min(n.args[0].eval(point), n.args[1].eval(point));
    case Op::Max: return std::max(n.args[0].eval(point), n.args[1].eval(point));
  }
  throw Error("scalar expr: unreachable");
}

int ScalarExpr::max_variable() const {
  const Node& n = *node_;
  int best = n.op == Op::Var ? n.var : -1;
  for (const auto& a : n.args) best = std::max(best, a.max_variable());
  return best;
}

std::string ScalarExpr::to_text() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Var: return "x" + std::to_string(n.var + 1);
    case Op::Lit: return format_double(n.value);
    case Op::Add: return "(" + n.args[0].to_text() + " + " + n.args[1].to_text() + ")";
    case Op::Sub: return "(" + n.args[0].to_text() + " - " + n.args[1].to_text() + ")";
    case Op::Mul: return "(" + n.args[0].to_text() + " * " + n.args[1].to_text() + ")";
    case Op::Div: return "(" + n.args[0].to_text() + " / " + n.args[1].to_text() + ")";
    case Op::Neg: return "(-" + n.args[0].to_text() + ")";
    case Op::Norm: {
      std::string s = "norm(";
      for (size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += ", ";
        s += n.args[i].to_text();
      }
      return s + ")";
    }
    case Op::Min: return "min(" + n.args[0].to_text() + ", " + n.args[1].to_text() + ")";
    case Op::Max: return "max(" + n.args[0].to_text() + ", " + n.args[1].to_text() + ")";
  }
  throw Error("scalar expr: unreachable");
}

}  // namespace propmap
