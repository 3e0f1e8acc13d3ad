#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypcircle/equi_stats.hpp"
#include "hypcircle/lattice_count.hpp"
#include "hypcircle/spectral.hpp"

namespace py = pybind11;
using namespace hypcircle;

namespace {

LieVec lie_by_name(const std::string& name) {
    if (name == "X") return lie_X;
    if (name == "Theta") return lie_Theta;
    if (name == "U") return lie_U;
    if (name == "V") return lie_V;
    if (name == "Y") return lie_Y;
    throw std::invalid_argument("unknown Lie direction " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "circle averages, spectral expansions and lattice counting on "
              "compact hyperbolic surfaces";

    py::class_<SL2>(m, "SL2")
        .def(py::init<>())
        .def(py::init<double, double, double, double>())
        .def_readonly("a", &SL2::a)
        .def_readonly("b", &SL2::b)
        .def_readonly("c", &SL2::c)
        .def_readonly("d", &SL2::d)
        .def("inverse", &SL2::inverse)
        .def("op_norm", &SL2::op_norm)
        .def("__matmul__", [](const SL2& x, const SL2& y) { return x * y; })
        .def("__mul__", [](const SL2& x, const SL2& y) { return x * y; })
        .def("__repr__", [](const SL2& g) {
            return "SL2(" + std::to_string(g.a) + ", " + std::to_string(g.b) + ", " +
                   std::to_string(g.c) + ", " + std::to_string(g.d) + ")";
        });

    py::class_<HPoint>(m, "HPoint")
        .def(py::init<double, double>())
        .def_readonly("x", &HPoint::x)
        .def_readonly("y", &HPoint::y)
        .def("__repr__", [](const HPoint& z) {
            return "HPoint(" + std::to_string(z.x) + ", " + std::to_string(z.y) + ")";
        });

    m.def("exp_lie", [](const std::string& w, double s) { return exp_lie(lie_by_name(w), s); },
          py::arg("direction"), py::arg("s"));
    m.def("geodesic_flow", &geodesic_flow);
    m.def("rotation_flow", &rotation_flow);
    m.def("iwasawa", &iwasawa, py::arg("x"), py::arg("y"), py::arg("s") = 0.0);
    m.def("cartan", [](const SL2& g) {
        const auto f = cartan(g);
        return py::make_tuple(f.k1, f.t, f.k2);
    });
    m.def("mobius", &mobius);
    m.def("hyp_dist", &hyp_dist);
    m.def("ball_area", &ball_area);
    m.def("circle_length", &circle_length);

    py::class_<FuchsianGroup>(m, "FuchsianGroup")
        .def_readonly("name", &FuchsianGroup::name)
        .def_readonly("covol_surface", &FuchsianGroup::covol_surface)
        .def_readonly("stabilizer_order", &FuchsianGroup::stabilizer_order)
        .def_readonly("covering_radius", &FuchsianGroup::covering_radius)
        .def_readonly("deep_point", &FuchsianGroup::deep_point)
        .def("covol_group", &FuchsianGroup::covol_group)
        .def("counting_ratio", &FuchsianGroup::counting_ratio)
        .def("max_relation_error", &FuchsianGroup::max_relation_error)
        .def("reduce", [](const FuchsianGroup& G, const HPoint& z) {
            const auto [red, gam] = G.reduce(z);
            return py::make_tuple(red, gam);
        });

    m.def("triangle_group", &triangle_group, py::arg("p"), py::arg("q"), py::arg("r"));
    m.def("group_from_preset", &group_from_preset);
    m.def("sample_quotient", &sample_quotient, py::arg("group"), py::arg("n"),
          py::arg("seed"));

    py::class_<Observable>(m, "Observable")
        .def("__call__", [](const Observable& f, const SL2& g) { return f.eval_fn(g); })
        .def("lie", [](const Observable& f, const std::string& w, const SL2& g) {
            return f.lie(lie_by_name(w), g);
        })
        .def("c1_norm_proxy", &Observable::c1_norm_proxy)
        .def_readonly("gamma_invariant", &Observable::gamma_invariant);

    m.def("model_eigenfunction", &model_eigenfunction, py::arg("nu"));
    m.def("surface_bump", &surface_bump, py::arg("group"), py::arg("center"),
          py::arg("width"), py::arg("profile_pow") = 4);
    m.def("gamma_bump", &gamma_bump, py::arg("group"), py::arg("center"),
          py::arg("width"), py::arg("profile_pow") = 4);
    m.def("unfolded_average", &unfolded_average);

    py::class_<CircleAverageResult>(m, "CircleAverageResult")
        .def_readonly("value", &CircleAverageResult::value)
        .def_readonly("error_estimate", &CircleAverageResult::error_estimate)
        .def_readonly("nodes_used", &CircleAverageResult::nodes_used)
        .def_readonly("converged", &CircleAverageResult::converged);

    m.def("k_theta", &k_theta, py::arg("f"), py::arg("p"), py::arg("theta"), py::arg("t"),
          py::arg("tol") = 1e-9, py::arg("t_cap") = 12.0);
    m.def("boundary_terms", [](const Observable& f, const SL2& p, double theta, double t) {
        const auto bt = boundary_terms(f, p, theta, t);
        return py::make_tuple(bt.A, bt.B);
    });
    m.def("g_coefficient",
          [](const Observable& f, const SL2& p, double mu, int n, double theta, double t,
             double tol) {
              return g_coefficient(f, p, SpectralParams::from_mu(mu, n, theta), t, tol);
          },
          py::arg("f"), py::arg("p"), py::arg("mu"), py::arg("n"), py::arg("theta"),
          py::arg("t"), py::arg("tol") = 1e-9);

    m.def("solve_cauchy",
          [](double mu, const std::function<cplx(double)>& G, cplx y1, cplx y1p, double t,
             double tol) { return solve_cauchy(mu, G, y1, y1p, t, tol); },
          py::arg("mu"), py::arg("G"), py::arg("y1"), py::arg("y1p"), py::arg("t"),
          py::arg("tol") = 1e-10);

    py::class_<CountReport>(m, "CountReport")
        .def_readonly("R", &CountReport::R)
        .def_readonly("N", &CountReport::N)
        .def_readonly("Sigma", &CountReport::Sigma)
        .def_readonly("E", &CountReport::E)
        .def_readonly("covol_ratio", &CountReport::covol_ratio)
        .def_readonly("valid", &CountReport::valid);

    py::class_<LatticeCounter>(m, "LatticeCounter")
        .def(py::init<FuchsianGroup, HPoint, std::size_t>(), py::arg("group"),
             py::arg("base"), py::arg("visited_cap") = 20'000'000)
        .def("count", &LatticeCounter::count)
        .def("count_grid", &LatticeCounter::count_grid);

    m.def("count", [](const FuchsianGroup& G, double R) { return count(G, R); });
    m.def("translate_average",
          [](const Observable& f, const SL2& p, const SL2& g, double tol) {
              return translate_average(f, p, g, tol);
          },
          py::arg("f"), py::arg("p"), py::arg("g"), py::arg("tol") = 1e-8);
    m.def("translate_average_cartan",
          [](const Observable& f, const SL2& p, const SL2& g, double tol) {
              return translate_average_cartan(f, p, g, tol);
          },
          py::arg("f"), py::arg("p"), py::arg("g"), py::arg("tol") = 1e-8);

    m.def("levy_prokhorov", [](std::vector<double> a, std::vector<double> b) {
        EmpiricalLaw la, lb;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        la.samples = std::move(a);
        lb.samples = std::move(b);
        return levy_prokhorov(la, lb);
    });

    m.attr("PI") = pi;
    m.attr("FULL_CIRCLE") = full_circle;
}
