#include "crackdyn/expr.hpp"

#include "crackdyn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace crackdyn {

using NodePtr = std::shared_ptr<const Expr::Node>;

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::number;
  n->value = v;
  return n;
}

NodePtr make_node(Expr::Kind kind, std::vector<NodePtr> args, std::string function = {}) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->function = std::move(function);
  return n;
}

int arity(const std::string& name) {
  if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt" || name == "abs") return 1;
  if (name == "min" || name == "max") return 2;
  return -1;
}

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    auto node = sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return node;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  void advance() { ++pos_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("offset " + std::to_string(pos_) + ": " + msg, pos_);
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  NodePtr sum() {
    auto lhs = product();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      advance();
      auto rhs = product();
      lhs = make_node(c == '+' ? Expr::Kind::add : Expr::Kind::sub, {lhs, rhs});
    }
  }

  NodePtr product() {
    auto lhs = unary();
    for (;;) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      advance();
      auto rhs = unary();
      lhs = make_node(c == '*' ? Expr::Kind::mul : Expr::Kind::div, {lhs, rhs});
    }
  }

  NodePtr unary() {
    if (peek() == '-') {
      advance();
      return make_node(Expr::Kind::neg, {unary()});
    }
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (peek() == '^') {
      advance();
      return make_node(Expr::Kind::pow, {base, unary()});
    }
    return base;
  }

  NodePtr primary() {
    const char c = peek();
    if (c == '(') {
      advance();
      auto inner = sum();
      if (peek() != ')') fail("expected ')'");
      advance();
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') fail("unexpected end of expression");
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = src_.data() + pos_;
    // strtod needs a terminated buffer; copy the numeric prefix
    std::size_t end = pos_;
    while (end < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.' ||
            src_[end] == 'e' || src_[end] == 'E' ||
            ((src_[end] == '+' || src_[end] == '-') && end > pos_ &&
             (src_[end - 1] == 'e' || src_[end - 1] == 'E')))) {
      ++end;
    }
    std::string text(begin, end - pos_);
    char* stop = nullptr;
    const double v = std::strtod(text.c_str(), &stop);
    if (stop == text.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(stop - text.c_str());
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "t" || name == "x" || name == "y" || name == "z") {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Kind::variable;
      n->variable = name[0];
      return n;
    }
    if (name == "pi") return make_number(std::numbers::pi);
    const int n_args = arity(name);
    if (n_args < 0) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (peek() != '(') fail("expected '(' after " + name);
    advance();
    std::vector<NodePtr> args;
    args.push_back(sum());
    while (peek() == ',') {
      advance();
      args.push_back(sum());
    }
    if (peek() != ')') fail("expected ')'");
    advance();
    if (static_cast<int>(args.size()) != n_args) {
      fail(name + " takes " + std::to_string(n_args) + " argument(s)");
    }
    return make_node(Expr::Kind::call, std::move(args), name);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double evaluate(const Expr::Node& n, double t, std::span<const double> p) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::number:
      return n.value;
    case K::variable: {
      if (n.variable == 't') return t;
      const std::size_t k = static_cast<std::size_t>(n.variable - 'x');
      if (k >= p.size()) throw DomainError(std::string("unbound variable ") + n.variable);
      return p[k];
    }
    case K::neg:
      return -evaluate(*n.args[0], t, p);
    case K::add:
      return checked(evaluate(*n.args[0], t, p) + evaluate(*n.args[1], t, p), "+");
    case K::sub:
      return checked(evaluate(*n.args[0], t, p) - evaluate(*n.args[1], t, p), "-");
    case K::mul:
      return checked(evaluate(*n.args[0], t, p) * evaluate(*n.args[1], t, p), "*");
    case K::div: {
      const double num = evaluate(*n.args[0], t, p);
      const double den = evaluate(*n.args[1], t, p);
      if (den == 0.0) throw DomainError("division by zero");
      return checked(num / den, "/");
    }
    case K::pow:
      return checked(std::pow(evaluate(*n.args[0], t, p), evaluate(*n.args[1], t, p)), "^");
    case K::call: {
      const double a = evaluate(*n.args[0], t, p);
      const std::string& f = n.function;
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      if (f == "exp") return checked(std::exp(a), "exp");
      if (f == "abs") return std::abs(a);
      if (f == "sqrt") {
        if (a < 0.0) throw DomainError("sqrt of negative argument");
        return std::sqrt(a);
      }
      const double b = evaluate(*n.args[1], t, p);
      if (f == "min") return std::min(a, b);
      return std::max(a, b);
    }
  }
  return 0.0;
}

void print(const Expr::Node& n, std::string& out) {
  using K = Expr::Kind;
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.args[0], out);
    out += op;
    print(*n.args[1], out);
    out += ')';
  };
  switch (n.kind) {
    case K::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      if (n.value < 0.0) {
        out += "(-";
        std::snprintf(buf, sizeof buf, "%.17g", -n.value);
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case K::variable:
      out += n.variable;
      return;
    case K::neg:
      out += "(-";
      print(*n.args[0], out);
      out += ')';
      return;
    case K::add: binary("+"); return;
    case K::sub: binary("-"); return;
    case K::mul: binary("*"); return;
    case K::div: binary("/"); return;
    case K::pow: binary("^"); return;
    case K::call:
      out += n.function;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        print(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

bool equal(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == Expr::Kind::number && a.value != b.value) return false;
  if (a.variable != b.variable || a.function != b.function) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

bool has_variable(const Expr::Node& n) {
  if (n.kind == Expr::Kind::variable) return true;
  for (const auto& a : n.args)
    if (has_variable(*a)) return true;
  return false;
}

}  // namespace

Expr::Expr() : root_(make_number(0.0)) {}

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).parse_all()); }

Expr Expr::constant(double value) { return Expr(make_number(value)); }

double Expr::eval(double t, std::span<const double> point) const {
  return evaluate(*root_, t, point);
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool Expr::is_constant() const { return !has_variable(*root_); }

bool Expr::operator==(const Expr& other) const { return equal(*root_, *other.root_); }

VectorExpr parse_vector(std::string_view source) {
  // A parenthesized list with at least one top-level comma is a tuple;
  // anything else is a single scalar.
  int depth = 0;
  bool tuple = false;
  std::size_t first = source.find_first_not_of(" \t");
  if (first != std::string_view::npos && source[first] == '(') {
    for (std::size_t i = first; i < source.size(); ++i) {
      if (source[i] == '(') ++depth;
      else if (source[i] == ')') --depth;
      else if (source[i] == ',' && depth == 1) tuple = true;
      if (depth == 0) {
        if (source.find_first_not_of(" \t", i + 1) != std::string_view::npos) tuple = false;
        break;
      }
    }
  }
  if (!tuple) return {Expr::parse(source)};

  VectorExpr out;
  std::size_t start = first + 1;
  depth = 0;
  for (std::size_t i = start; i < source.size(); ++i) {
    const char c = source[i];
    if (c == '(') ++depth;
    else if (c == ')' && depth > 0) --depth;
    else if ((c == ',' && depth == 0) || (c == ')' && depth == 0)) {
      out.push_back(Expr::parse(source.substr(start, i - start)));
      start = i + 1;
      if (c == ')') break;
    }
  }
  return out;
}

}  // namespace crackdyn
