#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace propmap {

// Closed-form scalar expression over coordinates x1..xn: literals,
// + - * /, unary minus, norm(...), min/max. This is the escape hatch for
// maps that are not in the named generator catalog.
class ScalarExpr {
 public:
  static ScalarExpr variable(int index);  // 0-based coordinate index
  static ScalarExpr literal(double value);
  static ScalarExpr binary(char op, ScalarExpr lhs, ScalarExpr rhs);
  static ScalarExpr negate(ScalarExpr arg);
  static ScalarExpr norm(std::vector<ScalarExpr> args);
  static ScalarExpr min_of(ScalarExpr lhs, ScalarExpr rhs);
  static ScalarExpr max_of(ScalarExpr lhs, ScalarExpr rhs);

  double eval(const Eigen::VectorXd& point) const;
  int max_variable() const;  // highest coordinate index used, -1 if none
  std::string to_text() const;

 private:
  struct Node;
  ScalarExpr() = default;
  std::shared_ptr<const Node> node_;
};

}  // namespace propmap
