#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jetflag/cli.hpp"
#include "jetflag/error.hpp"
#include "jetflag/io.hpp"

namespace py = pybind11;
namespace sym = jetflag::sym;
namespace flag = jetflag::flag;
namespace jet = jetflag::jet;
namespace inv = jetflag::inv;
namespace var = jetflag::var;
namespace io = jetflag::io;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
py::object to_py(const io::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

io::json from_py(const py::object& o) {
  return io::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

jetflag::MultiIndex index_of(const std::vector<int>& e) { return jetflag::MultiIndex(e); }

}  // namespace

PYBIND11_MODULE(_jetflag, m) {
  m.doc() = "jet, flag-jet and Cauchy-data calculus";

  static py::exception<jetflag::Error> error(m, "JetflagError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const jetflag::Error& e) {
      py::set_error(error, (std::string(jetflag::to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<sym::Expr>(m, "Expr")
      .def(py::init([](const std::string& s) { return sym::parse(s); }))
      .def("__str__", [](const sym::Expr& e) { return sym::to_string(e); })
      .def("__repr__", [](const sym::Expr& e) { return "Expr('" + sym::to_string(e) + "')"; })
      .def("diff", [](const sym::Expr& e, const std::string& v) { return sym::diff(e, v); })
      .def("eval",
           [](const sym::Expr& e, const std::map<std::string, double>& at) {
             return sym::eval(e, sym::Env(at.begin(), at.end()));
           },
           py::arg("at") = std::map<std::string, double>{})
      .def("normalize", [](const sym::Expr& e) { return sym::normalize(e); })
      .def("is_zero", [](const sym::Expr& e) { return sym::is_zero(e); })
      .def("free_variables", [](const sym::Expr& e) {
        const auto v = sym::free_variables(e);
        return std::vector<std::string>(v.begin(), v.end());
      })
      .def("substitute",
           [](const sym::Expr& e, const std::map<std::string, std::string>& b) {
             std::map<std::string, sym::Expr, std::less<>> sub;
             for (const auto& [k, v] : b) sub.emplace(k, sym::parse(v));
             return sym::substitute(e, sub);
           })
      .def("__add__", [](const sym::Expr& a, const sym::Expr& b) { return a + b; })
      .def("__sub__", [](const sym::Expr& a, const sym::Expr& b) { return a - b; })
      .def("__mul__", [](const sym::Expr& a, const sym::Expr& b) { return a * b; })
      .def("__truediv__", [](const sym::Expr& a, const sym::Expr& b) { return a / b; });

  m.def("block_partitions", [](const std::vector<int>& e) {
    io::json out = io::json::array();
    for (const auto& bp : jetflag::block_partitions(index_of(e))) out.push_back(io::to_json(bp));
    return to_py(out);
  });

  m.def("prolong_section",
        [](const std::vector<std::string>& components, int k, const std::vector<double>& x0) {
          jet::SectionSpec s{static_cast<int>(x0.size()), {}};
          for (const auto& c : components) s.components.push_back(sym::parse(c));
          return jet::prolong_section(s, k, x0).to_map();
        },
        py::arg("components"), py::arg("k"), py::arg("x0"));

  m.def("involutivity_equations",
        [](const py::object& dist, int r) { return to_py(io::to_json(inv::involutivity_equations(io::distribution_from_json(from_py(dist)), r))); });
  m.def("is_involutive", [](const std::map<std::string, double>& point, const py::object& dist, int r, double tol) {
    return inv::is_involutive(sym::Env(point.begin(), point.end()), io::distribution_from_json(from_py(dist)), r, tol);
  }, py::arg("point"), py::arg("distribution"), py::arg("r"), py::arg("tol") = 1e-10);

  m.def("flag_dim", &flag::flag_dim, py::arg("n"), py::arg("m"), py::arg("k"));
  m.def("chart_coordinates", [](const std::string& kind, int n, int m, int k) {
    return flag::Chart(flag::chart_kind_from_string(kind), n, m, k).coordinates();
  });
  m.def("flag_I_to_II", [](int n, int m, int k, const std::map<std::string, double>& v) {
    return flag::flagI_to_flagII(flag::Point::from_map(flag::Chart(flag::ChartKind::flag_I, n, m, k), v)).to_map();
  });
  m.def("flag_II_to_I", [](int n, int m, int k, const std::map<std::string, double>& v) {
    return flag::flagII_to_flagI(flag::Point::from_map(flag::Chart(flag::ChartKind::flag_II, n, m, k), v)).to_map();
  });
  m.def("inner_derivative_expand",
        [](int alpha, const std::vector<int>& a, int l, const std::vector<int>& b, int K) {
          return flag::inner_derivative_expand(alpha, index_of(a), l, index_of(b), K);
        },
        py::arg("alpha"), py::arg("A"), py::arg("l"), py::arg("B"), py::arg("K"));
  m.def("normal_recover",
        [](int alpha, const std::vector<int>& a, int l, int K) { return flag::normal_recover(alpha, index_of(a), l, K); },
        py::arg("alpha"), py::arg("A"), py::arg("l"), py::arg("K"));
  m.def("cauchy_from_profiles", [](const py::object& datum, int K, const std::vector<double>& x0) {
    return flag::cauchy_from_profiles(io::datum_from_json(from_py(datum)), K, x0).to_map();
  }, py::arg("datum"), py::arg("K"), py::arg("x0"));
  m.def("diagram_check", [](int n, int m, int k, int samples, std::uint64_t seed, int jobs) {
    return to_py(io::to_json(flag::diagram_check(n, m, k, samples, seed, jobs)));
  }, py::arg("n"), py::arg("m"), py::arg("k"), py::arg("samples") = 100, py::arg("seed") = 0, py::arg("jobs") = 1);
  m.def("cauchy_roundtrip_check", [](int n, int m, int K) { return to_py(io::to_json(flag::cauchy_roundtrip_check(n, m, K))); });

  m.def("euler_lagrange", [](const std::string& f) { return var::euler_lagrange({sym::parse(f)}); });
  m.def("transversality", [](const std::string& f) { return var::transversality({sym::parse(f)}); });
  m.def("columbus_solve",
        [](const py::object& g1, const py::object& g2, std::array<double, 2> init, double tol, int max_iter) {
          return to_py(io::to_json(var::columbus_solve(io::curve_from_json(from_py(g1)), io::curve_from_json(from_py(g2)),
                                                       init, {tol, max_iter})));
        },
        py::arg("g1"), py::arg("g2"), py::arg("init"), py::arg("tol") = 1e-12, py::arg("max_iter") = 50);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = jetflag::cli::run(args, out, err);
    return py::make_tuple(rc, out.str(), err.str());
  });
}
