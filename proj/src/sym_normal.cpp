// Rational normal form over opaque atoms.

#include <cmath>
#include <random>

#include "jetflag/error.hpp"
#include "jetflag/sym.hpp"

namespace jetflag::sym {
namespace {

// Sorted (atom key, exponent > 0) pairs.
using Monomial = std::vector<std::pair<std::string, int>>;
using Poly = std::map<Monomial, mpq_class>;

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

void add_term(Poly& p, const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = p.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

Poly poly_const(const mpq_class& c) {
  Poly p;
  add_term(p, {}, c);
  return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) add_term(out, m, c);
  return out;
}

Poly poly_scale(const Poly& a, const mpq_class& s) {
  Poly out;
  if (s == 0) return out;
  for (const auto& [m, c] : a) out.emplace(m, c * s);
  return out;
}

bool is_const(const Poly& p) { return p.empty() || (p.size() == 1 && p.begin()->first.empty()); }
mpq_class const_value(const Poly& p) { return p.empty() ? mpq_class(0) : p.begin()->second; }

struct Frac {
  Poly num;
  Poly den;
};

class Normalizer {
 public:
  Frac to_frac(const Expr& e) {
    switch (e.kind()) {
      case Kind::constant:
        return {poly_const(e.value()), poly_const(1)};
      case Kind::variable:
        return atom(e.name(), e);
      case Kind::sum: {
        Frac acc{Poly{}, poly_const(1)};
        for (const Expr& t : e.args()) acc = add(acc, to_frac(t));
        return acc;
      }
      case Kind::product: {
        Frac acc{poly_const(1), poly_const(1)};
        for (const Expr& f : e.args()) acc = mul(acc, to_frac(f));
        return acc;
      }
      case Kind::quotient: {
        Frac a = to_frac(e.args()[0]);
        Frac b = to_frac(e.args()[1]);
        if (b.num.empty()) throw Error(ErrorCode::domain, "division by an expression that is identically zero");
        return canonical({mul(a.num, b.den), mul(a.den, b.num)});
      }
      case Kind::power: {
        Frac b = to_frac(e.args()[0]);
        int n = e.exponent();
        if (n < 0) {
          if (b.num.empty()) throw Error(ErrorCode::domain, "zero raised to a negative power");
          std::swap(b.num, b.den);
          n = -n;
        }
        Frac acc{poly_const(1), poly_const(1)};
        for (int i = 0; i < n; ++i) acc = {mul(acc.num, b.num), mul(acc.den, b.den)};
        return canonical(acc);
      }
      case Kind::function: {
        Frac inner = to_frac(e.args()[0]);
        Expr arg = to_expr(inner);
        Expr applied = apply(e.func(), arg);
        if (applied.kind() != Kind::function) return to_frac(applied);
        std::string key = std::string(func_name(e.func())) + "(" + to_string(arg) + ")";
        if (e.func() == Func::sqrt && is_const(inner.den)) {
          radicands_.emplace(key, poly_scale(inner.num, mpq_class(1) / const_value(inner.den)));
        }
        return atom(key, applied);
      }
    }
    return {Poly{}, poly_const(1)};
  }

  Expr to_expr(const Frac& f) {
    if (is_const(f.den)) return poly_expr(poly_scale(f.num, mpq_class(1) / const_value(f.den)));
    if (f.num.empty()) return Expr(0);
    // Proportional numerator and denominator collapse to a constant.
    const auto& [lead_m, lead_c] = *f.den.begin();
    auto it = f.num.find(lead_m);
    if (it != f.num.end() && f.num.size() == f.den.size()) {
      mpq_class ratio = it->second / lead_c;
      if (poly_add(f.num, poly_scale(f.den, -ratio)).empty()) return Expr(ratio);
    }
    return poly_expr(f.num) / poly_expr(f.den);
  }

 private:
  Frac atom(const std::string& key, const Expr& e) {
    atoms_.emplace(key, e);
    Poly p;
    p.emplace(Monomial{{key, 1}}, mpq_class(1));
    return {p, poly_const(1)};
  }

  // Product with even powers of sqrt(P) folded into powers of P.
  Poly mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a) {
      for (const auto& [mb, cb] : b) add_term(out, mono_mul(ma, mb), ca * cb);
    }
    return reduce(out);
  }

  Poly reduce(const Poly& p) {
    if (radicands_.empty()) return p;
    bool changed = false;
    Poly out;
    for (const auto& [m, c] : p) {
      Monomial rest;
      Poly factor = poly_const(1);
      bool hit = false;
      for (const auto& [key, e] : m) {
        auto r = radicands_.find(key);
        if (r != radicands_.end() && e >= 2) {
          hit = true;
          for (int i = 0; i < e / 2; ++i) factor = mul_plain(factor, r->second);
          if (e % 2) rest.emplace_back(key, 1);
        } else {
          rest.emplace_back(key, e);
        }
      }
      if (!hit) {
        add_term(out, m, c);
        continue;
      }
      changed = true;
      for (const auto& [fm, fc] : factor) add_term(out, mono_mul(rest, fm), c * fc);
    }
    return changed ? reduce(out) : out;
  }

  static Poly mul_plain(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a) {
      for (const auto& [mb, cb] : b) add_term(out, mono_mul(ma, mb), ca * cb);
    }
    return out;
  }

  Frac add(const Frac& a, const Frac& b) {
    if (a.den == b.den) return canonical({poly_add(a.num, b.num), a.den});
    return canonical({poly_add(mul(a.num, b.den), mul(b.num, a.den)), mul(a.den, b.den)});
  }

  Frac mul(const Frac& a, const Frac& b) { return canonical({mul(a.num, b.num), mul(a.den, b.den)}); }

  // Constant denominators fold into the numerator; otherwise the leading
  // denominator coefficient is scaled to 1.
  static Frac canonical(Frac f) {
    if (f.den.empty()) throw Error(ErrorCode::domain, "denominator is identically zero");
    if (f.num.empty()) return {Poly{}, poly_const(1)};
    mpq_class lead = f.den.begin()->second;
    if (is_const(f.den)) return {poly_scale(f.num, mpq_class(1) / lead), poly_const(1)};
    if (lead != 1) {
      f.num = poly_scale(f.num, mpq_class(1) / lead);
      f.den = poly_scale(f.den, mpq_class(1) / lead);
    }
    return f;
  }

  Expr poly_expr(const Poly& p) {
    std::vector<Expr> terms;
    terms.reserve(p.size());
    for (const auto& [m, c] : p) {
      std::vector<Expr> factors{Expr(c)};
      for (const auto& [key, e] : m) factors.push_back(pow(atoms_.at(key), e));
      terms.push_back(product(factors));
    }
    return sum(terms);
  }

  std::map<std::string, Expr> atoms_;
  std::map<std::string, Poly> radicands_;
};

}  // namespace

Expr normalize(const Expr& e) {
  Normalizer n;
  return n.to_expr(n.to_frac(e));
}

bool is_zero(const Expr& e) {
  Normalizer n;
  return n.to_frac(e).num.empty();
}

std::string_view to_string(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::symbolic_zero: return "symbolically zero";
    case ZeroVerdict::numeric_zero: return "numerically zero";
    case ZeroVerdict::nonzero: return "nonzero";
  }
  return "?";
}

ZeroVerdict zero_verdict(const Expr& e, std::uint64_t seed) {
  if (is_zero(e)) return ZeroVerdict::symbolic_zero;
  const auto vars = free_variables(e);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.2, 1.8);
  int good = 0;
  for (int attempt = 0; attempt < 400 && good < 20; ++attempt) {
    Env env;
    for (const auto& v : vars) env[v] = dist(rng);
    double value;
    try {
      value = eval(e, env);
    } catch (const Error&) {
      continue;
    }
    if (!(std::abs(value) <= 1e-9)) return ZeroVerdict::nonzero;
    ++good;
  }
  return good == 20 ? ZeroVerdict::numeric_zero : ZeroVerdict::nonzero;
}

}  // namespace jetflag::sym
