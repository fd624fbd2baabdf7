#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crackdyn {

/// Immutable expression tree over the variables t, x, y, z.
///
/// Grammar (loosest binding first):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 'pi' | variable | func '(' args ')' | '(' sum ')'
///
/// Functions: sin cos exp sqrt abs (one argument), min max (two).
class Expr {
public:
  enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };

  struct Node;

  Expr();  // the literal 0
  static Expr parse(std::string_view source);
  static Expr constant(double value);

  /// Evaluates at time t and the given coordinates (x, y[, z]). Throws
  /// DomainError on division by zero, sqrt of a negative argument, a
  /// variable without a binding, or any non-finite result.
  double eval(double t, std::span<const double> point) const;

  /// Fully parenthesized source text that parses back to an equal tree.
  std::string to_string() const;

  /// True when no variable occurs in the tree.
  bool is_constant() const;

  bool operator==(const Expr& other) const;

  const Node& root() const { return *root_; }

private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

struct Expr::Node {
  Kind kind;
  double value = 0.0;   // number
  char variable = 0;    // 't', 'x', 'y' or 'z'
  std::string function; // call
  std::vector<std::shared_ptr<const Node>> args;
};

/// A vector of scalar expressions, one per component.
using VectorExpr = std::vector<Expr>;

/// Parses "(e1, e2, ...)" or a bare scalar expression (one component).
VectorExpr parse_vector(std::string_view source);

}  // namespace crackdyn
