#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "wrp/jet_map.hpp"

namespace wrp {

class Expr;

namespace detail {

enum class Op { constant, var, add, sub, mul, neg, sin, cos, exp, pow, component };

struct Node;
struct Call {
  MapPtr map;
  std::vector<std::shared_ptr<const Node>> args;
};

struct Node {
  Op op = Op::constant;
  double value = 0.0;
  int index = 0;
  std::vector<std::shared_ptr<const Node>> args;
  std::shared_ptr<const Call> call;
};

}  // namespace detail

/// Immutable expression over input coordinates built from constants, + - *, division by constants, integer powers,
/// sin, cos, exp and calls of other jet maps.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}
  Expr(double v) : Expr(constant(v)) {}

  static Expr constant(double v) {
    auto n = std::make_shared<detail::Node>();
    n->value = v;
    return Expr(std::move(n));
  }
  static Expr var(int i) {
    auto n = std::make_shared<detail::Node>();
    n->op = detail::Op::var;
    n->index = i;
    return Expr(std::move(n));
  }

  /// All output coordinates of `map` evaluated at `args`; shared so the call is evaluated once.
  static std::vector<Expr> call(MapPtr map, const std::vector<Expr>& args) {
    require(static_cast<int>(args.size()) == map->in_dim(), ErrorKind::precondition, "call arity does not match map input");
    auto c = std::make_shared<detail::Call>();
    c->map = std::move(map);
    for (const auto& a : args) c->args.push_back(a.node_);
    std::vector<Expr> out;
    for (int k = 0; k < c->map->out_dim(); ++k) {
      auto n = std::make_shared<detail::Node>();
      n->op = detail::Op::component;
      n->index = k;
      n->call = c;
      out.push_back(Expr(std::move(n)));
    }
    return out;
  }

  bool is_constant() const { return node_->op == detail::Op::constant; }
  bool is_constant(double v) const { return is_constant() && node_->value == v; }
  double constant_value() const { return node_->value; }
  const detail::Node& node() const { return *node_; }
  bool has_calls() const { return has_calls(*node_); }
  bool has_transcendental() const { return has_transcendental(*node_); }
  /// Polynomial degree, or -1 when the expression is not polynomial.
  int polynomial_degree() const { return degree(*node_); }

  friend Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return constant(a.node_->value + b.node_->value);
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return binary(detail::Op::add, a, b);
  }
  friend Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return constant(a.node_->value - b.node_->value);
    if (b.is_constant(0.0)) return a;
    return binary(detail::Op::sub, a, b);
  }
  friend Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return constant(a.node_->value * b.node_->value);
    if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return binary(detail::Op::mul, a, b);
  }
  friend Expr operator-(const Expr& a) {
    if (a.is_constant()) return constant(-a.node_->value);
    return unary(detail::Op::neg, a);
  }
  friend Expr sin(const Expr& a) { return a.is_constant() ? constant(std::sin(a.node_->value)) : unary(detail::Op::sin, a); }
  friend Expr cos(const Expr& a) { return a.is_constant() ? constant(std::cos(a.node_->value)) : unary(detail::Op::cos, a); }
  friend Expr exp(const Expr& a) { return a.is_constant() ? constant(std::exp(a.node_->value)) : unary(detail::Op::exp, a); }
  friend Expr pow(const Expr& a, int n) {
    require(n >= 0, ErrorKind::config, "only nonnegative integer powers are supported");
    if (n == 0) return constant(1.0);
    if (n == 1) return a;
    auto node = std::make_shared<detail::Node>();
    node->op = detail::Op::pow;
    node->index = n;
    node->args = {a.node_};
    return Expr(std::move(node));
  }

  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

 private:
  friend struct ExprAccess;
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

  static Expr unary(detail::Op op, const Expr& a) {
    auto n = std::make_shared<detail::Node>();
    n->op = op;
    n->args = {a.node_};
    return Expr(std::move(n));
  }
  static Expr binary(detail::Op op, const Expr& a, const Expr& b) {
    auto n = std::make_shared<detail::Node>();
    n->op = op;
    n->args = {a.node_, b.node_};
    return Expr(std::move(n));
  }

  static bool has_calls(const detail::Node& n) {
    if (n.op == detail::Op::component) return true;
    for (const auto& a : n.args)
      if (has_calls(*a)) return true;
    return false;
  }
  static bool has_transcendental(const detail::Node& n) {
    if (n.op == detail::Op::sin || n.op == detail::Op::cos || n.op == detail::Op::exp) return true;
    for (const auto& a : n.args)
      if (has_transcendental(*a)) return true;
    return false;
  }
  static int degree(const detail::Node& n) {
    using detail::Op;
    switch (n.op) {
      case Op::constant: return 0;
      case Op::var: return 1;
      case Op::add:
      case Op::sub: {
        int a = degree(*n.args[0]), b = degree(*n.args[1]);
        return (a < 0 || b < 0) ? -1 : std::max(a, b);
      }
      case Op::mul: {
        int a = degree(*n.args[0]), b = degree(*n.args[1]);
        return (a < 0 || b < 0) ? -1 : a + b;
      }
      case Op::neg: return degree(*n.args[0]);
      case Op::pow: {
        int a = degree(*n.args[0]);
        return a < 0 ? -1 : a * n.index;
      }
      default: return -1;
    }
  }

  std::shared_ptr<const detail::Node> node_;
};

struct ExprAccess {
  static const std::shared_ptr<const detail::Node>& node(const Expr& e) { return e.node_; }
  static Expr wrap(std::shared_ptr<const detail::Node> n) { return Expr(std::move(n)); }
};

/// Evaluates expressions over doubles or Taylor polynomials. Shared subtrees and calls are
/// evaluated once per evaluator.
template <class T>
class ExprEvaluator {
 public:
  ExprEvaluator(std::vector<T> vars, LayoutPtr layout = nullptr) : vars_(std::move(vars)), layout_(std::move(layout)) {}

  T operator()(const Expr& e) { return eval(*ExprAccess::node(e)); }

 private:
  T konst(double v) const {
    if constexpr (std::is_same_v<T, double>) return v;
    else return Taylor::constant(layout_, v);
  }

  T eval(const detail::Node& n) {
    using detail::Op;
    switch (n.op) {
      case Op::constant: return konst(n.value);
      case Op::var:
        require(n.index >= 0 && n.index < static_cast<int>(vars_.size()), ErrorKind::precondition,
                "expression variable index out of range");
        return vars_[n.index];
      case Op::component: return call(*n.call)[n.index];
      default: break;
    }
    auto it = memo_.find(&n);
    if (it != memo_.end()) return it->second;
    T r = compute(n);
    memo_.emplace(&n, r);
    return r;
  }

  T compute(const detail::Node& n) {
    using detail::Op;
    switch (n.op) {
      case Op::add: return eval(*n.args[0]) + eval(*n.args[1]);
      case Op::sub: return eval(*n.args[0]) - eval(*n.args[1]);
      case Op::mul: return eval(*n.args[0]) * eval(*n.args[1]);
      case Op::neg: return -eval(*n.args[0]);
      case Op::sin: {
        using std::sin;
        return sin(eval(*n.args[0]));
      }
      case Op::cos: {
        using std::cos;
        return cos(eval(*n.args[0]));
      }
      case Op::exp: {
        using std::exp;
        return exp(eval(*n.args[0]));
      }
      case Op::pow: {
        T a = eval(*n.args[0]);
        T r = a;
        for (int k = 1; k < n.index; ++k) r = r * a;
        return r;
      }
      default: return konst(0.0);
    }
  }

  const std::vector<T>& call(const detail::Call& c) {
    auto it = calls_.find(&c);
    if (it != calls_.end()) return it->second;
    std::vector<T> args;
    for (const auto& a : c.args) args.push_back(eval(*a));
    std::vector<T> out;
    if constexpr (std::is_same_v<T, double>) {
      out = c.map->eval(args);
    } else {
      Vec base(args.size());
      for (std::size_t k = 0; k < args.size(); ++k) base[k] = args[k].value();
      out = substitute(c.map->taylor(base, layout_->degree()), args, layout_);
    }
    return calls_.emplace(&c, std::move(out)).first->second;
  }

  std::vector<T> vars_;
  LayoutPtr layout_;
  std::unordered_map<const detail::Node*, T> memo_;
  std::unordered_map<const detail::Call*, std::vector<T>> calls_;
};

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Fully parenthesised text form; parse_expr reads it back to the same tree.
inline std::string to_string(const Expr& e, const std::vector<std::string>& names) {
  using detail::Op;
  const detail::Node& n = e.node();
  auto sub = [&](int k) { return to_string(ExprAccess::wrap(n.args[k]), names); };
  switch (n.op) {
    case Op::constant: {
      std::string s = format_double(n.value);
      return n.value < 0 || (n.value == 0.0 && std::signbit(n.value)) ? "(" + s + ")" : s;
    }
    case Op::var: return names.at(n.index);
    case Op::add: return "(" + sub(0) + " + " + sub(1) + ")";
    case Op::sub: return "(" + sub(0) + " - " + sub(1) + ")";
    case Op::mul: return "(" + sub(0) + " * " + sub(1) + ")";
    case Op::neg: return "(-(" + sub(0) + "))";
    case Op::sin: return "sin(" + sub(0) + ")";
    case Op::cos: return "cos(" + sub(0) + ")";
    case Op::exp: return "exp(" + sub(0) + ")";
    case Op::pow: return "(" + sub(0) + ")^" + std::to_string(n.index);
    case Op::component: fail(ErrorKind::config, "expressions with map calls have no text form");
  }
  return {};
}

namespace detail {

class ExprParser {
 public:
  ExprParser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::config, "cannot parse expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    while (true) {
      if (eat('+')) e = e + product();
      else if (eat('-')) e = e - product();
      else return e;
    }
  }
  Expr product() {
    Expr e = power();
    while (true) {
      if (eat('*')) {
        e = e * power();
      } else if (eat('/')) {
        Expr d = power();
        if (!d.is_constant() || d.constant_value() == 0.0) error("divisor must be a nonzero constant");
        e = e * Expr::constant(1.0 / d.constant_value());
      } else {
        return e;
      }
    }
  }
  Expr power() {
    Expr e = unary();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected an integer exponent");
      e = pow(e, std::stoi(s_.substr(start, pos_ - start)));
    }
    return e;
  }
  Expr unary() {
    if (eat('-')) {
      skip();
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) return Expr::constant(-number());
      return -unary();
    }
    return primary();
  }
  double number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) error("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number());
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) error("unexpected character");
    std::string word = s_.substr(start, pos_ - start);
    if (word == "sin" || word == "cos" || word == "exp") {
      if (!eat('(')) error("expected '(' after " + word);
      Expr a = sum();
      if (!eat(')')) error("expected ')'");
      return word == "sin" ? sin(a) : word == "cos" ? cos(a) : exp(a);
    }
    for (std::size_t k = 0; k < names_.size(); ++k)
      if (names_[k] == word) return Expr::var(static_cast<int>(k));
    error("unknown identifier '" + word + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(const std::string& text, const std::vector<std::string>& names) {
  return detail::ExprParser(text, names).parse();
}

}  // namespace wrp
