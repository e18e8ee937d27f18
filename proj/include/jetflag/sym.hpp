#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace jetflag::sym {

enum class Kind { constant, variable, sum, product, power, quotient, function };
enum class Func { sin, cos, exp, log, sqrt };

std::string_view func_name(Func f);

struct Node;

/// Immutable expression handle. Copies share the underlying tree.
///
/// The arithmetic operators are smart constructors: they flatten nested sums
/// and products, fold constants, and drop neutral elements, so trees built by
/// differentiation stay small. They do not expand or collect terms; that is
/// the job of normalize().
class Expr {
 public:
  Expr();  // the constant 0
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(static_cast<long>(value)) {}  // NOLINT
  Expr(const mpq_class& value);  // NOLINT

  static Expr var(std::string name);

  Kind kind() const;
  const mpq_class& value() const;            // constant
  const std::string& name() const;           // variable
  Func func() const;                         // function
  int exponent() const;                      // power
  const std::vector<Expr>& args() const;     // sum, product, power (1), quotient (2), function (1)

  bool is_constant() const { return kind() == Kind::constant; }
  bool is_constant(long v) const;

  const Node* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_node(Node n);
};

struct Node {
  Kind kind = Kind::constant;
  mpq_class value;
  std::string name;
  Func func = Func::sin;
  int exponent = 1;
  std::vector<Expr> args;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);
Expr apply(Func f, const Expr& arg);
Expr sum(const std::vector<Expr>& terms);
Expr product(const std::vector<Expr>& factors);

inline Expr var(std::string name) { return Expr::var(std::move(name)); }
inline Expr sin(const Expr& e) { return apply(Func::sin, e); }
inline Expr cos(const Expr& e) { return apply(Func::cos, e); }
inline Expr exp(const Expr& e) { return apply(Func::exp, e); }
inline Expr log(const Expr& e) { return apply(Func::log, e); }
inline Expr sqrt(const Expr& e) { return apply(Func::sqrt, e); }

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' ['-'] integer)?
///   base   := number | identifier | identifier '(' expr ')' | '(' expr ')'
/// Identifiers match [A-Za-z][A-Za-z0-9_.]*. Numbers are decimal integers;
/// ratios are written p/q and a decimal point literal is read exactly.
Expr parse(std::string_view text);

/// Printed form that parse() reads back to an equal-valued tree.
std::string to_string(const Expr& e);

Expr diff(const Expr& e, std::string_view v);

using Env = std::map<std::string, double, std::less<>>;

/// IEEE evaluation. Throws Error(unbound_variable) or Error(domain).
double eval(const Expr& e, const Env& env);

std::set<std::string> free_variables(const Expr& e);

/// Simultaneous substitution of variables by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& bindings);

/// Expanded rational normal form over atoms: variables and function
/// applications (with normalized arguments) are opaque, except that an even
/// power of sqrt(P) with polynomial P is replaced by a power of P.
/// Idempotent; unique for polynomial inputs.
Expr normalize(const Expr& e);

/// Sound symbolic zero test: true iff the numerator of the normal form is
/// the zero polynomial.
bool is_zero(const Expr& e);

enum class ZeroVerdict { symbolic_zero, numeric_zero, nonzero };
std::string_view to_string(ZeroVerdict v);

/// is_zero() first; when that fails, evaluates at 20 random points (variables
/// drawn from [0.2, 1.8]) and reports numeric_zero when every |value| <= 1e-9.
ZeroVerdict zero_verdict(const Expr& e, std::uint64_t seed = 0);

}  // namespace jetflag::sym
