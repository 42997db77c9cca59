#include <optional>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sshock/errors.hpp"
#include "sshock/full_profile.hpp"
#include "sshock/inner_layer.hpp"
#include "sshock/outer_layers.hpp"
#include "sshock/pde_lf.hpp"
#include "sshock/weak_limit.hpp"

namespace py = pybind11;
using namespace sshock;

namespace {

State2 state(const std::array<double, 2>& u) { return {u[0], u[1]}; }
std::array<double, 2> pair(const State2& u) { return {u.u1, u.u2}; }

std::array<double, 6> point(const CompactPoint& p) { return {p.beta, p.r, p.kappa, p.w1, p.w2, p.xi}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Singular-shock profiles of the Keyfitz-Kranzer system";
  m.attr("__version__") = "0.1.0";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto hypothesis = py::register_exception<HypothesisError>(m, "HypothesisError", error.ptr());
  py::register_exception<DegenerateData>(m, "DegenerateData", hypothesis.ptr());
  py::register_exception<HypothesisViolated>(m, "HypothesisViolated", hypothesis.ptr());
  py::register_exception<NonpositiveU2>(m, "NonpositiveU2", hypothesis.ptr());
  auto solver = py::register_exception<SolverError>(m, "SolverError", error.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", solver.ptr());
  py::register_exception<SectionMiss>(m, "SectionMiss", solver.ptr());
  py::register_exception<MissedTarget>(m, "MissedTarget", solver.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", solver.ptr());
  py::register_exception<UnstableBlowup>(m, "UnstableBlowup", solver.ptr());

  // flux_core
  m.def("flux", [](std::array<double, 2> u) { return flux(state(u)); }, py::arg("u"));
  m.def("eigenvalues", [](std::array<double, 2> u) { return eigenvalues(state(u)); }, py::arg("u"));
  py::class_<RiemannAnalysis>(m, "RiemannAnalysis")
      .def_property_readonly("uL", [](const RiemannAnalysis& a) { return pair(a.uL); })
      .def_property_readonly("uR", [](const RiemannAnalysis& a) { return pair(a.uR); })
      .def_readonly("s", &RiemannAnalysis::s)
      .def_readonly("wL", &RiemannAnalysis::wL)
      .def_readonly("wR", &RiemannAnalysis::wR)
      .def_readonly("e0", &RiemannAnalysis::e0)
      .def_readonly("h1_holds", &RiemannAnalysis::h1_holds)
      .def_readonly("h2_holds", &RiemannAnalysis::h2_holds)
      .def("__repr__", [](const RiemannAnalysis& a) {
        return "RiemannAnalysis(s=" + std::to_string(a.s) + ", e0=" + std::to_string(a.e0) + ")";
      });
  m.def("analyze", [](std::array<double, 2> uL, std::array<double, 2> uR) {
    return analyze({state(uL), state(uR)});
  }, py::arg("uL"), py::arg("uR"));

  // inner_layer
  m.def("rho3", &rho3);
  py::class_<IotaTable>(m, "IotaTable")
      .def_readonly("grid", &IotaTable::grid)
      .def_readonly("iota1", &IotaTable::iota1)
      .def_readonly("iota2", &IotaTable::iota2)
      .def_readonly("iota3", &IotaTable::iota3)
      .def_readonly("sigma0", &IotaTable::sigma0)
      .def_readonly("iota3_at_0", &IotaTable::iota3_at_0)
      .def("at", [](const IotaTable& t, double s) {
        const IotaValues v = t.at(s);
        return std::array<double, 3>{v.iota1, v.iota2, v.iota3};
      }, py::arg("sigma"));
  m.def("build_iota_table", &build_iota_table, py::arg("Sigma") = 25.0, py::arg("tol") = 1e-10,
        py::arg("grid_step") = 1e-3);
  py::class_<InnerConstants>(m, "InnerConstants")
      .def_readonly("rho", &InnerConstants::rho)
      .def_readonly("kappa0", &InnerConstants::kappa0)
      .def_readonly("omega0", &InnerConstants::omega0)
      .def_readonly("sigma0", &InnerConstants::sigma0)
      .def_readonly("iota3_at_0", &InnerConstants::iota3_at_0);
  m.def("matching_constants", &matching_constants, py::arg("analysis"), py::arg("table"));
  py::class_<Gamma0Trajectory>(m, "Gamma0Trajectory")
      .def_readonly("sigma", &Gamma0Trajectory::sigma)
      .def_readonly("beta", &Gamma0Trajectory::beta)
      .def_readonly("kappa", &Gamma0Trajectory::kappa)
      .def_readonly("w2", &Gamma0Trajectory::w2)
      .def_readonly("w2_minus_inf", &Gamma0Trajectory::w2_minus_inf)
      .def_readonly("w2_plus_inf", &Gamma0Trajectory::w2_plus_inf)
      .def_readonly("max_beta_kappa", &Gamma0Trajectory::max_beta_kappa)
      .def_readonly("sigma_at_max", &Gamma0Trajectory::sigma_at_max);
  m.def("build_gamma0", &build_gamma0, py::arg("analysis"), py::arg("constants"), py::arg("table"),
        py::arg("tol") = 1e-10);

  // outer_layers
  m.def("compactify", [](std::array<double, 2> u, double shift) { return compactify(state(u), shift); },
        py::arg("u"), py::arg("shift") = 0.0);
  m.def("decompactify", [](double b, double r, double shift) { return pair(decompactify(b, r, shift)); },
        py::arg("beta"), py::arg("r"), py::arg("shift") = 0.0);
  m.def("corner_eigenvalues", [](const std::string& which, double xi) {
    if (which != "L" && which != "R") throw py::value_error("which must be 'L' or 'R'");
    return jacobian_at_P(which == "L" ? CornerPoint::P_L : CornerPoint::P_R, xi).eigenvalues;
  }, py::arg("which"), py::arg("xi"));
  py::class_<HeteroclinicResult>(m, "HeteroclinicResult")
      .def_readonly("endpoint_error", &HeteroclinicResult::endpoint_error)
      .def_readonly("frozen_drift", &HeteroclinicResult::frozen_drift)
      .def_readonly("r0", &HeteroclinicResult::r0)
      .def_property_readonly("end_point", [](const HeteroclinicResult& h) { return point(h.end_point); })
      .def_property_readonly("target", [](const HeteroclinicResult& h) { return point(h.target); });
  m.def("compute_gamma1", [](const RiemannAnalysis& a) { return compute_gamma1(a); }, py::arg("analysis"));
  m.def("compute_gamma2", [](const RiemannAnalysis& a) { return compute_gamma2(a); }, py::arg("analysis"));
  m.def("transversality", [](const RiemannAnalysis& a, const InnerConstants& c, const IotaTable& t) {
    const TransversalityReport r = transversality_frames(a, c, t);
    return py::dict(py::arg("rank") = r.rank, py::arg("intersection_dim") = r.intersection_dim,
                    py::arg("rank_L") = r.rank_L, py::arg("rank_R") = r.rank_R);
  }, py::arg("analysis"), py::arg("constants"), py::arg("table"));

  // full_profile
  py::class_<ShootConfig>(m, "ShootConfig")
      .def(py::init<>())
      .def_readwrite("newton_tol", &ShootConfig::newton_tol)
      .def_readwrite("max_newton", &ShootConfig::max_newton)
      .def_readwrite("settle_tol", &ShootConfig::settle_tol)
      .def_readwrite("boundary_tol", &ShootConfig::boundary_tol)
      .def_readwrite("samples_per_step", &ShootConfig::samples_per_step)
      .def_readwrite("parallel_jacobian", &ShootConfig::parallel_jacobian);
  py::class_<GammaPoint>(m, "GammaPoint")
      .def(py::init<double, double, double, double>(), py::arg("kappa"), py::arg("w1"), py::arg("w2"),
           py::arg("xi"))
      .def_readonly("kappa", &GammaPoint::kappa)
      .def_readonly("w1", &GammaPoint::w1)
      .def_readonly("w2", &GammaPoint::w2)
      .def_readonly("xi", &GammaPoint::xi);
  m.def("singular_guess", &singular_guess, py::arg("analysis"), py::arg("constants"));
  py::class_<ProfileMaxima>(m, "ProfileMaxima")
      .def_readonly("max_u2", &ProfileMaxima::max_u2)
      .def_readonly("argmax_u2", &ProfileMaxima::argmax_u2)
      .def_readonly("max_u1_plus", &ProfileMaxima::max_u1_plus)
      .def_readonly("argmax_u1", &ProfileMaxima::argmax_u1)
      .def_readonly("beta_at_max_u1", &ProfileMaxima::beta_at_max_u1)
      .def_readonly("max_u1_minus", &ProfileMaxima::max_u1_minus)
      .def_readonly("argmin_u1", &ProfileMaxima::argmin_u1);
  py::class_<ProfileSolution>(m, "ProfileSolution")
      .def_readonly("epsilon", &ProfileSolution::epsilon)
      .def_readonly("xi", &ProfileSolution::xi)
      .def_readonly("u1", &ProfileSolution::u1)
      .def_readonly("u2", &ProfileSolution::u2)
      .def_readonly("w1", &ProfileSolution::w1)
      .def_readonly("w2", &ProfileSolution::w2)
      .def_readonly("xi_in", &ProfileSolution::xi_in)
      .def_readonly("xi_out", &ProfileSolution::xi_out)
      .def_readonly("xi_gamma", &ProfileSolution::xi_gamma)
      .def_readonly("maxima", &ProfileSolution::maxima)
      .def_readonly("gamma", &ProfileSolution::gamma)
      .def_readonly("match_residual", &ProfileSolution::match_residual)
      .def_readonly("surface_drift", &ProfileSolution::surface_drift)
      .def_property_readonly("T_layer", &ProfileSolution::T_layer)
      .def_property_readonly("xi_width", &ProfileSolution::xi_width)
      .def_property_readonly("inner_xi_width", &ProfileSolution::inner_xi_width);
  m.def("shoot_match", [](const RiemannAnalysis& a, const InnerConstants& c, double eps,
                          std::optional<GammaPoint> guess, const ShootConfig& cfg) {
    return shoot_match(a, c, eps, guess ? *guess : singular_guess(a, c), cfg);
  }, py::arg("analysis"), py::arg("constants"), py::arg("epsilon"), py::arg("guess") = py::none(),
        py::arg("config") = ShootConfig{});
  py::class_<ScalingRow>(m, "ScalingRow")
      .def_readonly("epsilon", &ScalingRow::epsilon)
      .def_readonly("eps2_max_u2", &ScalingRow::eps2_max_u2)
      .def_readonly("eps_max_u1_plus", &ScalingRow::eps_max_u1_plus)
      .def_readonly("eps_max_u1_minus", &ScalingRow::eps_max_u1_minus)
      .def_readonly("T_layer", &ScalingRow::T_layer)
      .def_readonly("xi_width", &ScalingRow::xi_width)
      .def_readonly("inner_xi_width", &ScalingRow::inner_xi_width)
      .def_readonly("match_residual", &ScalingRow::match_residual)
      .def_readonly("surface_drift", &ScalingRow::surface_drift)
      .def_readonly("w2_drop", &ScalingRow::w2_drop);
  py::class_<ScalingReport>(m, "ScalingReport")
      .def_readonly("epsilons", &ScalingReport::epsilons)
      .def_readonly("rows", &ScalingReport::rows)
      .def_readonly("profiles", &ScalingReport::profiles)
      .def_readonly("kappa0_sq_ref", &ScalingReport::kappa0_sq_ref)
      .def_readonly("omega0_ref", &ScalingReport::omega0_ref)
      .def_readonly("failure", &ScalingReport::failure);
  m.def("geometric_eps", &geometric_eps, py::arg("start"), py::arg("ratio"), py::arg("end"));
  m.def("measure_scaling", &measure_scaling, py::arg("analysis"), py::arg("constants"), py::arg("eps_list"),
        py::arg("config") = ShootConfig{}, py::arg("keep_profiles") = false,
        py::call_guard<py::gil_scoped_release>());

  // weak_limit
  py::class_<TestFunction>(m, "TestFunction")
      .def(py::init([](std::function<double(double)> f, double lo, double hi, std::string name) {
             return TestFunction{std::move(f), lo, hi, std::move(name)};
           }), py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("name") = "psi")
      .def_readonly("lo", &TestFunction::lo)
      .def_readonly("hi", &TestFunction::hi)
      .def_readonly("name", &TestFunction::name)
      .def("__call__", [](const TestFunction& t, double x) { return t.f(x); });
  py::class_<TestFunction2D>(m, "TestFunction2D")
      .def_readonly("name", &TestFunction2D::name)
      .def("__call__", [](const TestFunction2D& t, double x, double tt) { return t.f(x, tt); });
  m.def("bump", &bump, py::arg("x"), py::arg("center"), py::arg("radius"));
  m.def("bump_function", &bump_function, py::arg("center"), py::arg("radius"), py::arg("name") = "bump");
  m.def("separable_bump", &separable_bump, py::arg("xc"), py::arg("xr"), py::arg("tc"), py::arg("tr"),
        py::arg("name") = "bump2d");
  py::class_<LayerIntegrals>(m, "LayerIntegrals")
      .def_readonly("epsilon", &LayerIntegrals::epsilon)
      .def_readonly("I_u1", &LayerIntegrals::I_u1)
      .def_readonly("I_abs_u1", &LayerIntegrals::I_abs_u1)
      .def_readonly("I_u2", &LayerIntegrals::I_u2)
      .def_readonly("tail_L", &LayerIntegrals::tail_L)
      .def_readonly("tail_R", &LayerIntegrals::tail_R);
  m.def("layer_integrals", &layer_integrals, py::arg("profile"));
  py::class_<PairingReport>(m, "PairingReport")
      .def_readonly("epsilon", &PairingReport::epsilon)
      .def_readonly("computed", &PairingReport::computed)
      .def_readonly("predicted", &PairingReport::predicted)
      .def_readonly("discrepancy", &PairingReport::discrepancy)
      .def_readonly("name", &PairingReport::name);
  m.def("pair_1d", &pair_1d, py::arg("profile"), py::arg("analysis"), py::arg("psi"));
  m.def("pair_2d", &pair_2d, py::arg("profile"), py::arg("analysis"), py::arg("phi"));

  // pde_lf
  py::class_<GridConfig>(m, "GridConfig")
      .def(py::init<>())
      .def_readwrite("x_min", &GridConfig::x_min)
      .def_readwrite("x_max", &GridConfig::x_max)
      .def_readwrite("cells", &GridConfig::cells)
      .def_readwrite("cfl", &GridConfig::cfl)
      .def_readwrite("steps", &GridConfig::steps)
      .def_readwrite("snapshot_every", &GridConfig::snapshot_every)
      .def_readwrite("fixed_dt", &GridConfig::fixed_dt)
      .def_readwrite("periodic", &GridConfig::periodic)
      .def_readwrite("window_fraction", &GridConfig::window_fraction);
  py::class_<FieldSnapshot>(m, "FieldSnapshot")
      .def_readonly("step", &FieldSnapshot::step)
      .def_readonly("t", &FieldSnapshot::t)
      .def_readonly("x", &FieldSnapshot::x)
      .def_readonly("u1", &FieldSnapshot::u1)
      .def_readonly("u2", &FieldSnapshot::u2)
      .def_readonly("max_u1", &FieldSnapshot::max_u1)
      .def_readonly("max_u2", &FieldSnapshot::max_u2)
      .def_readonly("spike_mass_u2", &FieldSnapshot::spike_mass_u2);
  m.def("run_lf", [](std::array<double, 2> uL, std::array<double, 2> uR, const GridConfig& cfg) {
    return run_lf({state(uL), state(uR)}, cfg);
  }, py::arg("uL"), py::arg("uR"), py::arg("config") = GridConfig{}, py::call_guard<py::gil_scoped_release>());
  py::class_<GrowthFit>(m, "GrowthFit")
      .def_readonly("slope", &GrowthFit::slope)
      .def_readonly("intercept", &GrowthFit::intercept)
      .def_readonly("r_squared", &GrowthFit::r_squared)
      .def_readonly("points", &GrowthFit::points);
  m.def("fit_spike_growth", &fit_spike_growth, py::arg("snapshots"));
}
