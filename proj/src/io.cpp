#include "jetflag/io.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <set>

#include "jetflag/error.hpp"

namespace jetflag::io {

namespace {

json expr_string(const sym::Expr& e) { return sym::to_string(e); }

template <class Map>
json flat(const Map& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

}  // namespace

json to_json(const BlockPartition& bp) {
  json blocks = json::array();
  for (const auto& b : bp.blocks) blocks.push_back(b.str());
  return {{"blocks", blocks}, {"remainder", bp.remainder.str()}, {"multiplicity", bp.multiplicity}};
}

json to_json(const jet::JetPoint& p) { return flat(p.to_map()); }
json to_json(const flag::Point& p) { return flat(p.to_map()); }

json to_json(const grassmann::Plane& p) { return p.rows(); }

json to_json(const inv::InvolutivitySystem& sys) {
  json f1 = json::array(), f2 = json::array();
  for (const auto& row : sys.f1) {
    json r = json::array();
    for (const auto& e : row) r.push_back(expr_string(e));
    f1.push_back(r);
  }
  for (const auto& mat : sys.f2) {
    json m = json::array();
    for (const auto& row : mat) {
      json r = json::array();
      for (const auto& e : row) r.push_back(expr_string(e));
      m.push_back(r);
    }
    f2.push_back(m);
  }
  return {{"r", sys.r}, {"independent", sys.independent}, {"dependent", sys.dependent},
          {"chart", sys.chart_variables()}, {"f1", f1}, {"f2", f2}};
}

json to_json(const inv::InvolutivityResidual& r) {
  return {{"max_f1", r.max_f1}, {"max_f2", r.max_f2}, {"horizontality", r.horizontality}, {"horizontal", r.horizontal}};
}

json to_json(const inv::ConsequenceReport& r) {
  return {{"requested", r.requested}, {"used", r.used}, {"skipped", r.skipped}, {"max_residual", r.max_residual},
          {"max_prolongation_defect", r.max_prolongation_defect}, {"passed", r.passed}, {"notes", r.notes}};
}

json to_json(const flag::DiagramReport& r) {
  return {{"samples", r.samples},
          {"max_q_after_n", r.max_q_after_n},
          {"max_p_after_flag", r.max_p_after_flag},
          {"max_p_after_q", r.max_p_after_q},
          {"max_containment", r.max_containment},
          {"max_residual", r.max_residual},
          {"passed", r.passed}};
}

json to_json(const flag::FlagRoundTripReport& r) {
  return {{"samples", r.samples},       {"max_I_II_I", r.max_I_II_I},
          {"max_II_I_II", r.max_II_I_II}, {"max_peel_discrepancy", r.max_peel_discrepancy},
          {"symbolic_exact", r.symbolic_exact}, {"passed", r.passed}};
}

json to_json(const flag::CauchyRoundTripReport& r) {
  return {{"checked", r.checked}, {"failures", r.failures}, {"failed", r.failed}, {"passed", r.passed}};
}

json to_json(const flag::TransversalityReport& r) {
  return {{"samples", r.samples},
          {"distinct_samples", r.distinct_samples},
          {"max_gap", r.max_gap},
          {"expected_rank", r.expected_rank},
          {"min_rank", r.min_rank},
          {"min_relative_singular", r.min_relative_singular},
          {"resampled", r.resampled},
          {"distinct", r.distinct},
          {"full_rank", r.full_rank},
          {"passed", r.passed}};
}

json to_json(const var::CylinderBoundary& b) {
  return {{"g", expr_string(b.g)}, {"general", expr_string(b.general)}, {"xi0", expr_string(b.at0)},
          {"xi1", expr_string(b.at1)}};
}

json to_json(const var::ColumbusSolution& s) {
  return {{"s1", s.s1},
          {"s2", s.s2},
          {"p1", s.p1},
          {"p2", s.p2},
          {"length", s.length},
          {"residuals", s.residuals},
          {"iterations", s.iterations},
          {"rank_deficient", s.rank_deficient}};
}

sym::Expr expr_from_json(const json& j) {
  if (j.is_string()) return sym::parse(j.get<std::string>());
  if (j.is_number_integer()) return sym::Expr(j.get<long>());
  if (j.is_number()) return sym::parse(j.dump());
  bad("expected an expression string or a number");
}

std::map<std::string, double> values_from_json(const json& j) {
  if (!j.is_object()) bad("a chart point must be a JSON object keyed by coordinate name");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) bad("coordinate '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

inv::DistributionSpec distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vars") || !j.contains("forms")) bad("distribution needs \"vars\" and \"forms\"");
  const auto vars = j.at("vars").get<std::vector<std::string>>();
  std::set<std::string> xset;
  if (j.contains("independent")) {
    for (const auto& v : j.at("independent").get<std::vector<std::string>>()) xset.insert(v);
  } else {
    for (const auto& f : j.at("forms")) {
      if (f.contains("dx")) {
        for (const auto& [k, v] : f.at("dx").items()) xset.insert(k);
      }
    }
  }
  std::vector<std::string> xs, us;
  for (const auto& v : vars) (xset.count(v) ? xs : us).push_back(v);
  for (const auto& v : xset) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) bad("'" + v + "' is not listed in \"vars\"");
  }
  std::vector<inv::OneForm> forms;
  for (const auto& f : j.at("forms")) {
    inv::OneForm w;
    if (f.contains("dx")) {
      for (const auto& [k, v] : f.at("dx").items()) w.dx[k] = expr_from_json(v);
    }
    if (f.contains("du")) {
      for (const auto& [k, v] : f.at("du").items()) w.du[k] = expr_from_json(v);
    }
    forms.push_back(std::move(w));
  }
  return inv::DistributionSpec(std::move(xs), std::move(us), std::move(forms));
}

json to_json(const inv::DistributionSpec& d) {
  json forms = json::array();
  for (const auto& f : d.forms()) {
    json dx = json::object(), du = json::object();
    for (const auto& [k, v] : f.dx) dx[k] = expr_string(v);
    for (const auto& [k, v] : f.du) du[k] = expr_string(v);
    forms.push_back({{"dx", dx}, {"du", du}});
  }
  return {{"vars", d.base_vars()}, {"independent", d.x_vars()}, {"forms", forms}};
}

var::CurveSpec curve_from_json(const json& j) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y")) bad("curve needs \"x\" and \"y\"");
  var::CurveSpec c;
  c.x = expr_from_json(j.at("x"));
  c.y = expr_from_json(j.at("y"));
  if (j.contains("domain")) {
    const auto dom = j.at("domain").get<std::vector<double>>();
    if (dom.size() != 2) bad("curve domain must be [a, b]");
    c.lo = dom[0];
    c.hi = dom[1];
  } else {
    c.lo = -1e6;
    c.hi = 1e6;
  }
  return c;
}

flag::CauchyDatumSpec datum_from_json(const json& j) {
  if (!j.is_object() || !j.contains("f") || !j.contains("g")) bad("Cauchy datum needs \"f\" and \"g\"");
  flag::CauchyDatumSpec s;
  s.n = j.value("n", 2);
  s.f = expr_from_json(j.at("f"));
  if (j.at("g").is_array()) {
    for (const auto& g : j.at("g")) s.g.push_back(expr_from_json(g));
  } else {
    s.g.push_back(expr_from_json(j.at("g")));
  }
  if (j.contains("h")) {
    const json& h = j.at("h");
    // A flat list is the single-component shorthand.
    const bool nested = !h.empty() && h.front().is_array();
    if (nested) {
      for (const auto& row : h) {
        std::vector<sym::Expr> hs;
        for (const auto& e : row) hs.push_back(expr_from_json(e));
        s.h.push_back(std::move(hs));
      }
    } else {
      std::vector<sym::Expr> hs;
      for (const auto& e : h) hs.push_back(expr_from_json(e));
      s.h.push_back(std::move(hs));
    }
  }
  return s;
}

jet::SectionSpec section_from_json(const json& j) {
  jet::SectionSpec s;
  s.n = j.value("n", 1);
  for (const auto& c : j.at("components")) s.components.push_back(expr_from_json(c));
  return s;
}

json read_document(const std::string& source) {
  std::string text;
  const auto first = source.find_first_not_of(" \t\n");
  if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) {
    text = source;
  } else if (source == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(source);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + source + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, "invalid JSON in '" + source + "': " + e.what());
  }
}

}  // namespace jetflag::io
