#include "jetflag/cli.hpp"

#include <CLI11.hpp>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "jetflag/error.hpp"
#include "jetflag/io.hpp"

namespace jetflag::cli {

namespace {

using io::json;

struct Common {
  int n = 2;
  int m = 1;
  int k = 2;
  int K = 4;
  double tol = -1;  // per-command default when negative
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string json_source;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "'" + item + "' is not a number");
    }
  }
  return out;
}

sym::Env parse_bindings(const std::vector<std::string>& items) {
  sym::Env env;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, "binding '" + item + "' must be name=value");
    const auto v = parse_list(item.substr(eq + 1));
    if (v.size() != 1) throw Error(ErrorCode::invalid_argument, "binding '" + item + "' needs one value");
    env[item.substr(0, eq)] = v[0];
  }
  return env;
}

MultiIndex index_arg(const std::string& text, int length) {
  if (text.empty() || text == "0") return MultiIndex(static_cast<std::size_t>(length));
  MultiIndex a = MultiIndex::parse(text);
  if (static_cast<int>(a.length()) != length) {
    throw Error(ErrorCode::dimension_mismatch,
                "multi-index '" + text + "' must have length n-1 = " + std::to_string(length));
  }
  return a;
}

json document(const Common& c) {
  if (c.json_source.empty()) throw Error(ErrorCode::invalid_argument, "this command needs --json <path|->");
  return io::read_document(c.json_source);
}

double tol_or(const Common& c, double fallback) { return c.tol > 0 ? c.tol : fallback; }

// Builds the command tree; `action` receives the result of the chosen leaf.
class Commands {
 public:
  explicit Commands(CLI::App& app) : app_(app) {
    app_.fallthrough();
    app_.require_subcommand(1);
    app_.add_option("--n", c_.n, "number of independent variables");
    app_.add_option("--m", c_.m, "number of dependent variables");
    app_.add_option("--k", c_.k, "jet order");
    app_.add_option("--K", c_.K, "truncation order of Cauchy-data charts");
    app_.add_option("--tol", c_.tol, "tolerance");
    app_.add_option("--seed", c_.seed, "random seed");
    app_.add_option("--jobs", c_.jobs, "worker threads for sampled checks");
    app_.add_option("--json", c_.json_source, "JSON input: path, '-' for stdin, or inline");
    multiindex();
    expr();
    jet();
    involutive();
    flag();
    cauchy();
    variational();
    check();
  }

  const json& result() const { return result_; }

 private:
  CLI::App* group(const std::string& name, const std::string& help) {
    CLI::App* g = app_.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  }

  void leaf(CLI::App* parent, const std::string& name, const std::string& help, std::function<json()> body) {
    parent->add_subcommand(name, help)->callback([this, body] { result_ = body(); });
  }

  void multiindex() {
    auto* g = group("mi", "multi-index combinatorics");
    auto* cmd = g->add_subcommand("partitions", "block partitions of a multi-index");
    cmd->add_option("--index", index_, "dot-separated exponents, e.g. 2.0")->required();
    cmd->callback([this] {
      json out = json::array();
      for (const auto& bp : block_partitions(MultiIndex::parse(index_))) out.push_back(io::to_json(bp));
      result_ = out;
    });
  }

  void expr() {
    auto* g = group("expr", "symbolic expressions");
    auto* d = g->add_subcommand("diff", "partial derivative");
    d->add_option("--expr", expr_, "expression")->required();
    d->add_option("--var", var_, "variable")->required();
    d->callback([this] {
      const sym::Expr e = sym::diff(sym::parse(expr_), var_);
      result_ = {{"expr", sym::to_string(e)}, {"normalized", sym::to_string(sym::normalize(e))}};
    });
    auto* e = g->add_subcommand("eval", "numeric evaluation");
    e->add_option("--expr", expr_, "expression")->required();
    e->add_option("--at", bindings_, "name=value bindings");
    e->callback([this] { result_ = {{"value", sym::eval(sym::parse(expr_), parse_bindings(bindings_))}}; });
  }

  void jet() {
    auto* g = group("jet", "jet charts");
    auto* p = g->add_subcommand("prolong", "k-jet of a section at a point");
    p->add_option("--section", components_, "component expressions in x1..xn");
    p->add_option("--at", at_, "comma-separated base point");
    p->callback([this] {
      jet::SectionSpec s;
      if (!components_.empty()) {
        s.n = c_.n;
        for (const auto& comp : components_) s.components.push_back(sym::parse(comp));
      } else {
        s = io::section_from_json(document(c_));
      }
      const auto x0 = parse_list(at_);
      result_ = io::to_json(jet::prolong_section(s, c_.k, x0));
    });
  }

  void involutive() {
    auto* g = group("inv", "involutive planes of a distribution");
    auto* eqs = g->add_subcommand("eqs", "local equations f_i, f_ij");
    eqs->add_option("--r", r_, "plane dimension");
    eqs->callback([this] {
      result_ = io::to_json(inv::involutivity_equations(io::distribution_from_json(document(c_)), r_));
    });
    auto* chk = g->add_subcommand("check", "test a plane; input {distribution, r, point}");
    chk->callback([this] {
      const json doc = document(c_);
      const auto omega = io::distribution_from_json(doc.at("distribution"));
      const int r = doc.value("r", r_);
      const auto values = io::values_from_json(doc.at("point"));
      const sym::Env env(values.begin(), values.end());
      const auto res = inv::involutivity_residual(env, inv::involutivity_equations(omega, r));
      const double tol = tol_or(c_, 1e-10);
      json out = io::to_json(res);
      out["involutive"] = res.max_f1 < tol && res.max_f2 < tol;
      result_ = out;
    });
    auto* cons = g->add_subcommand("consequences", "f_ij on the first prolongation");
    cons->add_option("--r", r_, "plane dimension");
    cons->add_option("--samples", samples_, "number of samples");
    cons->callback([this] {
      result_ = io::to_json(inv::differential_consequence_check(io::distribution_from_json(document(c_)), r_,
                                                                samples_, c_.seed, tol_or(c_, 1e-8)));
    });
  }

  void flag() {
    auto* g = group("flag", "flag-jet charts");
    auto* conv = g->add_subcommand("convert", "chart I <-> chart II");
    conv->add_option("--to", to_, "I or II")->required();
    conv->callback([this] {
      const auto values = io::values_from_json(document(c_));
      if (to_ == "II") {
        result_ = io::to_json(flag::flagI_to_flagII(
            flag::Point::from_map(flag::Chart(flag::ChartKind::flag_I, c_.n, c_.m, c_.k), values)));
      } else if (to_ == "I") {
        const auto p = flag::Point::from_map(flag::Chart(flag::ChartKind::flag_II, c_.n, c_.m, c_.k), values);
        json out = io::to_json(flag::flagII_to_flagI(p));
        result_ = {{"point", out}, {"peel_discrepancy", flag::peel_discrepancy(p)}};
      } else {
        throw Error(ErrorCode::invalid_argument, "--to must be I or II");
      }
    });
    auto* proj = g->add_subcommand("project", "structural projections");
    proj->add_option("--to", to_, "flag | n | q | p")->required();
    proj->callback([this] {
      const auto values = io::values_from_json(document(c_));
      const flag::Chart chart_I(flag::ChartKind::flag_I, c_.n, c_.m, c_.k);
      if (to_ == "flag") {
        result_ = io::to_json(flag::project_flag(flag::Point::from_map(chart_I, values)));
      } else if (to_ == "n") {
        result_ = io::to_json(flag::n_project(flag::Point::from_map(chart_I, values)));
      } else if (to_ == "q") {
        result_ = io::to_json(flag::q_project(
            flag::Point::from_map(flag::Chart(flag::ChartKind::inv_plane, c_.n, c_.m, c_.k), values)));
      } else if (to_ == "p") {
        result_ = io::to_json(flag::p_project(flag::Point::from_map(chart_I, values)));
      } else {
        throw Error(ErrorCode::invalid_argument, "--to must be flag, n, q or p");
      }
    });
    leaf(g, "dims", "dimension bookkeeping", [this] {
      json out = {{"flag_dim", flag::flag_dim(c_.n, c_.m, c_.k)},
                  {"chart_I", flag::chart_count(flag::ChartKind::flag_I, c_.n, c_.m, c_.k)},
                  {"jet_dim", jet::JetChart::expected_size(c_.n, c_.m, c_.k)}};
      if (c_.k >= 1) {
        out["chart_II"] = flag::chart_count(flag::ChartKind::flag_II, c_.n, c_.m, c_.k);
        out["normal_fiber_dim"] = flag::normal_fiber_dim(c_.n, c_.m, c_.k);
        out["q_fiber_dim"] = flag::q_fiber_dim(c_.n, c_.m, c_.k);
      }
      return out;
    });
  }

  void cauchy() {
    auto* g = group("cauchy", "truncated Cauchy-data charts");
    auto* ex = g->add_subcommand("expand", "(u_{A,l})_B in Cauchy coordinates");
    ex->add_option("--alpha", alpha_, "dependent variable");
    ex->add_option("--A", a_, "spatial index A");
    ex->add_option("--l", l_, "normal order l");
    ex->add_option("--B", b_, "inner index B");
    ex->callback([this] {
      const sym::Expr e = flag::inner_derivative_expand(alpha_, index_arg(a_, c_.n - 1), l_, index_arg(b_, c_.n - 1), c_.K);
      result_ = {{"expr", sym::to_string(e)}};
    });
    auto* rec = g->add_subcommand("recover", "u_{A,l} in alt-chart coordinates");
    rec->add_option("--alpha", alpha_, "dependent variable");
    rec->add_option("--A", a_, "spatial index A");
    rec->add_option("--l", l_, "normal order l");
    rec->callback([this] {
      result_ = {{"expr", sym::to_string(flag::normal_recover(alpha_, index_arg(a_, c_.n - 1), l_, c_.K))}};
    });
    auto* build = g->add_subcommand("build", "datum from profiles; input {n, f, g, h}");
    build->add_option("--at", at_, "comma-separated base point in x1..x{n-1}");
    build->callback([this] {
      const auto spec = io::datum_from_json(document(c_));
      const auto x0 = parse_list(at_);
      const auto alt = flag::cauchy_alt_from_profiles(spec, c_.K, x0);
      result_ = {{"cauchy", io::to_json(flag::from_alt(alt))}, {"alt", io::to_json(alt)}};
    });
    auto* proj = g->add_subcommand("project", "p or n of a Cauchy chart point");
    proj->add_option("--to", to_, "p | n | alt")->required();
    proj->callback([this] {
      const auto p =
          flag::Point::from_map(flag::Chart(flag::ChartKind::cauchy, c_.n, c_.m, c_.K), io::values_from_json(document(c_)));
      if (to_ == "p") {
        result_ = io::to_json(flag::p_of(p));
      } else if (to_ == "n") {
        result_ = io::to_json(flag::n_of(p));
      } else if (to_ == "alt") {
        result_ = io::to_json(flag::to_alt(p));
      } else {
        throw Error(ErrorCode::invalid_argument, "--to must be p, n or alt");
      }
    });
    auto* tr = g->add_subcommand("transversal", "distinct p-images and full-rank parametrization; input {a, b, samples?}");
    tr->add_option("--samples", samples_, "number of random base points when the input lists none");
    tr->callback([this] {
      const json doc = document(c_);
      const auto a = io::datum_from_json(doc.at("a"));
      const auto b = io::datum_from_json(doc.at("b"));
      std::vector<std::vector<double>> pts;
      if (doc.contains("samples")) {
        pts = doc.at("samples").get<std::vector<std::vector<double>>>();
      } else {
        std::mt19937_64 rng(c_.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int i = 0; i < samples_; ++i) {
          std::vector<double> x(static_cast<std::size_t>(a.n - 1));
          for (auto& v : x) v = dist(rng);
          pts.push_back(std::move(x));
        }
      }
      result_ = io::to_json(flag::transversality_check(a, b, doc.value("K", c_.K), pts, c_.seed));
    });
  }

  void variational() {
    auto* g = group("var", "first-order variational problems");
    auto* el = g->add_subcommand("el", "Euler-Lagrange expression");
    el->add_option("--f", f_, "Lagrangian in x, y, p")->required();
    el->callback([this] {
      const sym::Expr e = var::euler_lagrange({sym::parse(f_)});
      result_ = {{"el", sym::to_string(e)}, {"normalized", sym::to_string(sym::normalize(e))}};
    });
    auto* tc = g->add_subcommand("tc", "transversality condition");
    tc->add_option("--f", f_, "Lagrangian in x, y, p")->required();
    tc->callback([this] { result_ = {{"tc", sym::to_string(var::transversality({sym::parse(f_)}))}}; });
    auto* cyl = g->add_subcommand("tc-cylinder", "boundary term of the cylinder pull-back");
    cyl->add_option("--f", f_, "Lagrangian in x, y, p")->required();
    cyl->add_option("--X", X_, "x as a function of xi, eta")->required();
    cyl->add_option("--Y", Y_, "y as a function of xi, eta")->required();
    cyl->callback([this] {
      result_ = io::to_json(var::cylinder_transversality({sym::parse(f_)}, {sym::parse(X_), sym::parse(Y_)}));
    });
    auto* col = g->add_subcommand("columbus", "shortest segment between two curves");
    col->add_option("--g1", g1_, "curve JSON")->required();
    col->add_option("--g2", g2_, "curve JSON")->required();
    col->add_option("--init", init_, "s1,s2")->required();
    col->add_option("--max-iter", max_iter_, "Newton iteration limit");
    col->callback([this] {
      const auto init = parse_list(init_);
      if (init.size() != 2) throw Error(ErrorCode::invalid_argument, "--init needs two values s1,s2");
      var::ColumbusOptions opts;
      opts.tol = tol_or(c_, 1e-12);
      opts.max_iter = max_iter_;
      result_ = io::to_json(var::columbus_solve(io::curve_from_json(io::read_document(g1_)),
                                                io::curve_from_json(io::read_document(g2_)), {init[0], init[1]},
                                                opts));
    });
  }

  void check() {
    auto* g = group("check", "sampled consistency checks");
    auto* dia = g->add_subcommand("diagram", "commutativity of the projection diagram");
    dia->add_option("--samples", samples_, "number of random points");
    dia->callback([this] {
      result_ = io::to_json(flag::diagram_check(c_.n, c_.m, c_.k, samples_, c_.seed, c_.jobs, tol_or(c_, 1e-12)));
    });
    auto* rt = g->add_subcommand("roundtrip", "chart round trips");
    rt->add_option("--samples", samples_, "number of random points for the flag charts");
    rt->callback([this] {
      json out;
      out["cauchy"] = io::to_json(flag::cauchy_roundtrip_check(c_.n, c_.m, c_.K));
      if (c_.k >= 1) {
        out["flag"] = io::to_json(flag::flag_roundtrip_check(c_.n, c_.m, c_.k, samples_, c_.seed, tol_or(c_, 1e-12)));
      }
      out["passed"] = out["cauchy"]["passed"].get<bool>() && (!out.contains("flag") || out["flag"]["passed"].get<bool>());
      result_ = out;
    });
  }

  CLI::App& app_;
  Common c_;
  json result_;
  std::string index_, expr_, var_, at_, to_, a_, b_, f_, X_, Y_, g1_, g2_, init_;
  std::vector<std::string> bindings_, components_;
  int r_ = 1, samples_ = 20, alpha_ = 1, l_ = 0, max_iter_ = 50;
};

void emit_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Jet, flag-jet and Cauchy-data coordinate calculus", "jetflag");
  Commands commands(app);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return 2;
  } catch (const ParseError& e) {
    emit_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const Error& e) {
    emit_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const json::exception& e) {
    emit_error(err, "invalid_argument", e.what());
    return 1;
  }
  out << commands.result().dump(2) << "\n";
  return 0;
}

}  // namespace jetflag::cli
