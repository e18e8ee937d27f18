#include <cctype>
#include <cmath>
#include <utility>

#include "jetflag/error.hpp"
#include "jetflag/sym.hpp"

namespace jetflag::sym {

std::string_view func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

Expr make_node(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

namespace {

Expr constant(const mpq_class& v) {
  Node n;
  n.kind = Kind::constant;
  n.value = v;
  n.value.canonicalize();
  return make_node(std::move(n));
}

const Expr& zero_expr() {
  static const Expr z = constant(0);
  return z;
}

}  // namespace

Expr::Expr() : node_(zero_expr().node_) {}
Expr::Expr(long value) : Expr(constant(mpq_class(value))) {}
Expr::Expr(const mpq_class& value) : Expr(constant(value)) {}

Expr Expr::var(std::string name) {
  if (name.empty()) throw Error(ErrorCode::invalid_argument, "variable name must be nonempty");
  Node n;
  n.kind = Kind::variable;
  n.name = std::move(name);
  return make_node(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
const mpq_class& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->func; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
bool Expr::is_constant(long v) const { return kind() == Kind::constant && value() == v; }

// ---------------------------------------------------------------------------
// Smart constructors

Expr sum(const std::vector<Expr>& terms) {
  std::vector<Expr> flat;
  mpq_class c = 0;
  for (const Expr& t : terms) {
    if (t.kind() == Kind::sum) {
      for (const Expr& s : t.args()) {
        if (s.is_constant()) c += s.value();
        else flat.push_back(s);
      }
    } else if (t.is_constant()) {
      c += t.value();
    } else {
      flat.push_back(t);
    }
  }
  if (c != 0) flat.push_back(Expr(c));
  if (flat.empty()) return Expr(0);
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = Kind::sum;
  n.args = std::move(flat);
  return make_node(std::move(n));
}

Expr product(const std::vector<Expr>& factors) {
  std::vector<Expr> flat;
  mpq_class c = 1;
  for (const Expr& f : factors) {
    if (f.kind() == Kind::product) {
      for (const Expr& s : f.args()) {
        if (s.is_constant()) c *= s.value();
        else flat.push_back(s);
      }
    } else if (f.is_constant()) {
      c *= f.value();
    } else {
      flat.push_back(f);
    }
  }
  if (c == 0) return Expr(0);
  if (c != 1 || flat.empty()) flat.insert(flat.begin(), Expr(c));
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = Kind::product;
  n.args = std::move(flat);
  return make_node(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator-(const Expr& a) { return product({Expr(-1), a}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant()) {
    if (b.value() == 0) throw Error(ErrorCode::domain, "division by zero");
    return a * Expr(mpq_class(1) / b.value());
  }
  if (a.is_constant(0)) return Expr(0);
  Node n;
  n.kind = Kind::quotient;
  n.args = {a, b};
  return make_node(std::move(n));
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    mpq_class v = base.value();
    if (v == 0) {
      if (exponent < 0) throw Error(ErrorCode::domain, "zero raised to a negative power");
      return Expr(0);
    }
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), v.get_num_mpz_t(), static_cast<unsigned long>(std::abs(exponent)));
    mpz_pow_ui(den.get_mpz_t(), v.get_den_mpz_t(), static_cast<unsigned long>(std::abs(exponent)));
    mpq_class r = exponent > 0 ? mpq_class(num, den) : mpq_class(den, num);
    r.canonicalize();
    return Expr(r);
  }
  if (base.kind() == Kind::power) return pow(base.args()[0], base.exponent() * exponent);
  Node n;
  n.kind = Kind::power;
  n.exponent = exponent;
  n.args = {base};
  return make_node(std::move(n));
}

namespace {

bool exact_sqrt(const mpq_class& v, mpq_class& out) {
  if (v < 0) return false;
  mpz_class a = v.get_num(), b = v.get_den();
  if (!mpz_perfect_square_p(a.get_mpz_t()) || !mpz_perfect_square_p(b.get_mpz_t())) return false;
  mpz_class ra, rb;
  mpz_sqrt(ra.get_mpz_t(), a.get_mpz_t());
  mpz_sqrt(rb.get_mpz_t(), b.get_mpz_t());
  out = mpq_class(ra, rb);
  out.canonicalize();
  return true;
}

}  // namespace

Expr apply(Func f, const Expr& arg) {
  if (arg.is_constant()) {
    const mpq_class& v = arg.value();
    switch (f) {
      case Func::sin:
        if (v == 0) return Expr(0);
        break;
      case Func::cos:
        if (v == 0) return Expr(1);
        break;
      case Func::exp:
        if (v == 0) return Expr(1);
        break;
      case Func::log:
        if (v == 1) return Expr(0);
        break;
      case Func::sqrt: {
        mpq_class r;
        if (exact_sqrt(v, r)) return Expr(r);
        break;
      }
    }
  }
  Node n;
  n.kind = Kind::function;
  n.func = f;
  n.args = {arg};
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Prec { kSum = 1, kProd = 2, kNeg = 3, kPow = 4, kAtom = 5 };

std::string print(const Expr& e, int min_prec);

std::string wrap(std::string s, int prec, int min_prec) {
  return prec < min_prec ? "(" + s + ")" : s;
}

bool negative_term(const Expr& e) {
  if (e.is_constant()) return e.value() < 0;
  if (e.kind() == Kind::product) return e.args().front().is_constant() && e.args().front().value() < 0;
  return false;
}

std::string print(const Expr& e, int min_prec) {
  switch (e.kind()) {
    case Kind::constant: {
      const mpq_class& v = e.value();
      int prec = v < 0 ? kNeg : (v.get_den() == 1 ? kAtom : kProd);
      return wrap(v.get_str(), prec, min_prec);
    }
    case Kind::variable:
      return e.name();
    case Kind::function:
      return std::string(func_name(e.func())) + "(" + print(e.args()[0], kSum) + ")";
    case Kind::power:
      return wrap(print(e.args()[0], kAtom) + "^" + std::to_string(e.exponent()), kPow, min_prec);
    case Kind::quotient:
      return wrap(print(e.args()[0], kProd) + "/" + print(e.args()[1], kPow), kProd, min_prec);
    case Kind::product: {
      const auto& fs = e.args();
      std::size_t start = 0;
      std::string out;
      int prec = kProd;
      if (fs.front().is_constant(-1)) {
        out = "-";
        start = 1;
        prec = kNeg;
      }
      for (std::size_t i = start; i < fs.size(); ++i) {
        if (i > start) out += "*";
        out += print(fs[i], kProd);
      }
      return wrap(out, prec, min_prec);
    }
    case Kind::sum: {
      const auto& ts = e.args();
      std::string out = print(ts.front(), kSum);
      for (std::size_t i = 1; i < ts.size(); ++i) {
        if (negative_term(ts[i])) out += " - " + print(-ts[i], kProd);
        else out += " + " + print(ts[i], kSum + 1);
      }
      return wrap(out, kSum, min_prec);
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, kSum); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (true) {
      if (accept('+')) terms.push_back(term());
      else if (accept('-')) terms.push_back(-term());
      else break;
    }
    return sum(terms);
  }

  Expr term() {
    Expr acc = factor();
    while (true) {
      if (accept('*')) acc = acc * factor();
      else if (accept('/')) acc = acc / factor();
      else break;
    }
    return acc;
  }

  Expr factor() {
    if (accept('-')) return -factor();
    Expr b = base();
    if (accept('^')) {
      skip_ws();
      bool neg = accept('-');
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int n = std::stoi(std::string(text_.substr(start, pos_ - start)));
      b = pow(b, neg ? -n : n);
    }
    return b;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.')) {
        ++pos_;
      }
      std::string id(text_.substr(start, pos_ - start));
      if (accept('(')) {
        Func f;
        if (id == "sin") f = Func::sin;
        else if (id == "cos") f = Func::cos;
        else if (id == "exp") f = Func::exp;
        else if (id == "log") f = Func::log;
        else if (id == "sqrt") f = Func::sqrt;
        else throw Error(ErrorCode::unknown_function, "unknown function '" + id + "' at position " + std::to_string(start));
        Expr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return apply(f, arg);
      }
      return Expr::var(id);
    }
    if (accept('(')) {
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    mpz_class den = 1;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t fstart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (fstart == pos_) fail("expected digits after decimal point");
      digits += std::string(text_.substr(fstart, pos_ - fstart));
      mpz_ui_pow_ui(den.get_mpz_t(), 10, pos_ - fstart);
    }
    mpq_class v(mpz_class(digits, 10), den);
    v.canonicalize();
    return Expr(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Differentiation

Expr diff(const Expr& e, std::string_view v) {
  switch (e.kind()) {
    case Kind::constant:
      return Expr(0);
    case Kind::variable:
      return Expr(e.name() == v ? 1 : 0);
    case Kind::sum: {
      std::vector<Expr> terms;
      for (const Expr& t : e.args()) terms.push_back(diff(t, v));
      return sum(terms);
    }
    case Kind::product: {
      const auto& fs = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        Expr d = diff(fs[i], v);
        if (d.is_constant(0)) continue;
        std::vector<Expr> rest{d};
        for (std::size_t j = 0; j < fs.size(); ++j) {
          if (j != i) rest.push_back(fs[j]);
        }
        terms.push_back(product(rest));
      }
      return sum(terms);
    }
    case Kind::power: {
      const Expr& b = e.args()[0];
      Expr db = diff(b, v);
      if (db.is_constant(0)) return Expr(0);
      return product({Expr(e.exponent()), pow(b, e.exponent() - 1), db});
    }
    case Kind::quotient: {
      const Expr& a = e.args()[0];
      const Expr& b = e.args()[1];
      Expr da = diff(a, v), db = diff(b, v);
      if (db.is_constant(0)) return da / b;
      return (da * b - a * db) / pow(b, 2);
    }
    case Kind::function: {
      const Expr& u = e.args()[0];
      Expr du = diff(u, v);
      if (du.is_constant(0)) return Expr(0);
      switch (e.func()) {
        case Func::sin: return cos(u) * du;
        case Func::cos: return -(sin(u) * du);
        case Func::exp: return e * du;
        case Func::log: return du / u;
        case Func::sqrt: return du / (Expr(2) * e);
      }
    }
  }
  return Expr(0);
}

// ---------------------------------------------------------------------------
// Evaluation

double eval(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case Kind::constant:
      return e.value().get_d();
    case Kind::variable: {
      auto it = env.find(e.name());
      if (it == env.end()) throw Error(ErrorCode::unbound_variable, "unbound variable '" + e.name() + "'");
      return it->second;
    }
    case Kind::sum: {
      double s = 0;
      for (const Expr& t : e.args()) s += eval(t, env);
      return s;
    }
    case Kind::product: {
      double p = 1;
      for (const Expr& f : e.args()) p *= eval(f, env);
      return p;
    }
    case Kind::power: {
      double b = eval(e.args()[0], env);
      if (b == 0 && e.exponent() < 0) throw Error(ErrorCode::domain, "zero raised to a negative power");
      return std::pow(b, e.exponent());
    }
    case Kind::quotient: {
      double a = eval(e.args()[0], env);
      double b = eval(e.args()[1], env);
      if (b == 0) throw Error(ErrorCode::domain, "division by zero");
      return a / b;
    }
    case Kind::function: {
      double u = eval(e.args()[0], env);
      switch (e.func()) {
        case Func::sin: return std::sin(u);
        case Func::cos: return std::cos(u);
        case Func::exp: return std::exp(u);
        case Func::log:
          if (u <= 0) throw Error(ErrorCode::domain, "log of non-positive value");
          return std::log(u);
        case Func::sqrt:
          if (u < 0) throw Error(ErrorCode::domain, "sqrt of negative value");
          return std::sqrt(u);
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Structural helpers

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == Kind::variable) {
    out.insert(e.name());
    return;
  }
  for (const Expr& a : e.args()) collect(a, out);
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& bindings) {
  switch (e.kind()) {
    case Kind::constant:
      return e;
    case Kind::variable: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    case Kind::sum:
    case Kind::product: {
      std::vector<Expr> parts;
      parts.reserve(e.args().size());
      for (const Expr& a : e.args()) parts.push_back(substitute(a, bindings));
      return e.kind() == Kind::sum ? sum(parts) : product(parts);
    }
    case Kind::power:
      return pow(substitute(e.args()[0], bindings), e.exponent());
    case Kind::quotient:
      return substitute(e.args()[0], bindings) / substitute(e.args()[1], bindings);
    case Kind::function:
      return apply(e.func(), substitute(e.args()[0], bindings));
  }
  return e;
}

}  // namespace jetflag::sym
