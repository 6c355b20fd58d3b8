#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "railbeam/errors.hpp"
#include "railbeam/lyapunov.hpp"
#include "railbeam/oracles.hpp"
#include "railbeam/runner.hpp"

namespace py = pybind11;
using namespace railbeam;

namespace {

void bind_model(py::module_& m) {
  py::enum_<Convention>(m, "Convention")
      .value("corrected", Convention::Corrected)
      .value("published", Convention::Published);

  py::class_<BeamParams>(m, "BeamParams")
      .def(py::init([](double EI, double rho_a, double ell, double k, double alpha, double mu, double Cd) {
             return validate_params({EI, rho_a, ell, k, alpha, mu, Cd});
           }),
           py::kw_only(), py::arg("EI"), py::arg("rho_a"), py::arg("ell"), py::arg("k"), py::arg("alpha"),
           py::arg("mu"), py::arg("Cd") = 0.0)
      .def_property_readonly("EI", &BeamParams::EI)
      .def_property_readonly("rho_a", &BeamParams::rho_a)
      .def_property_readonly("ell", &BeamParams::ell)
      .def_property_readonly("k", &BeamParams::k)
      .def_property_readonly("alpha", &BeamParams::alpha)
      .def_property_readonly("mu", &BeamParams::mu)
      .def_property_readonly("Cd", &BeamParams::Cd);

  m.def("admissible_c_max", &admissible_c_max, py::arg("params"), py::arg("convention") = Convention::Corrected);

  m.def(
      "modal_solution",
      [](const BeamParams& p, int n, double w_amp, double v_amp, double force_amp, double t) {
        const ModalState s = modal_solution(p, {n, w_amp, v_amp, force_amp}, t);
        return py::make_tuple(s.w, s.v);
      },
      py::arg("params"), py::arg("n"), py::arg("w_amp"), py::arg("v_amp") = 0.0, py::arg("force_amp") = 0.0,
      py::arg("t"));

  m.def(
      "convergence_order",
      [](const std::vector<std::pair<double, double>>& errors) { return convergence_order(errors); },
      py::arg("errors"));
}

void bind_fem(py::module_& m) {
  py::class_<FemOperators>(m, "FemOperators")
      .def(py::init([](double ell, int n_el) { return assemble_operators(build_mesh(ell, n_el)); }), py::arg("ell"),
           py::arg("n_el"))
      .def_property_readonly("dofs", &FemOperators::dofs)
      .def_property_readonly("mass", [](const FemOperators& o) { return SparseMatrix(o.mass()); })
      .def_property_readonly("bending", [](const FemOperators& o) { return SparseMatrix(o.bending()); })
      .def("evaluate", &FemOperators::evaluate, py::arg("dofs"), py::arg("xi"));

  m.def(
      "energy_norm_sq",
      [](const Vector& w, const Vector& v, const BeamParams& p, const FemOperators& ops) {
        return energy_norm_sq({w, v}, p, ops);
      },
      py::arg("w"), py::arg("v"), py::arg("params"), py::arg("ops"));
}

py::dict certificate_dict(const LyapunovCertificate& c) {
  py::dict d;
  d["convention"] = c.convention;
  for (const auto& [key, value] :
       std::initializer_list<std::pair<const char*, double>>{{"c_max", c.c_max},
                                                             {"c", c.c},
                                                             {"eps_b", c.eps_b},
                                                             {"eps1", c.eps1},
                                                             {"eps2", c.eps2},
                                                             {"eps3", c.eps3},
                                                             {"omega0", c.omega0},
                                                             {"eps_r", c.eps_r},
                                                             {"r", c.r},
                                                             {"omega", c.omega},
                                                             {"c_l", c.c_l},
                                                             {"c_u", c.c_u},
                                                             {"c_h", c.c_h},
                                                             {"c_e", c.c_e},
                                                             {"input_gain", c.input_gain},
                                                             {"decay_gain", c.decay_gain},
                                                             {"mild_gain", c.mild_gain}})
    d[key] = value;
  return d;
}

void bind_certificate(py::module_& m) {
  m.def(
      "select_constants",
      [](const BeamParams& p, double c_fraction, int n_el, Convention conv) {
        const FemOperators ops = assemble_operators(build_mesh(p.ell(), n_el));
        return certificate_dict(select_constants(p, c_fraction, ops, conv));
      },
      py::arg("params"), py::arg("c_fraction") = 0.5, py::arg("n_el") = 32,
      py::arg("convention") = Convention::Corrected);

  m.def(
      "lyapunov_value",
      [](const Vector& w, const Vector& v, double c, const BeamParams& p, const FemOperators& ops) {
        return lyapunov_value({w, v}, c, p, ops);
      },
      py::arg("w"), py::arg("v"), py::arg("c"), py::arg("params"), py::arg("ops"));
}

void bind_runner(py::module_& m) {
  // Runs the trajectory part of a JSON config and returns the sampled records.
  m.def(
      "simulate_config",
      [](const std::string& config_json, const std::string& base_dir) {
        const RunConfig cfg = parse_config(nlohmann::json::parse(config_json), base_dir);
        const BeamParams p = validate_params(cfg.params);
        const FemOperators ops = assemble_operators(build_mesh(p.ell(), cfg.n_el));
        SimulateOptions opt;
        opt.state_stride = 0;
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = simulate(build_initial(cfg, ops), build_input(cfg), cfg.t_final, step_control(cfg), p, ops, opt);
        }
        py::dict d;
        d["t"] = t.times;
        d["norm_sq"] = t.energy_norm_sq;
        d["input_norm_sq"] = t.input_norm_sq;
        return d;
      },
      py::arg("config_json"), py::arg("base_dir") = ".");

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config, std::optional<std::string> out_dir,
         std::optional<std::uint64_t> seed, std::optional<double> dt) {
        py::gil_scoped_release release;
        return run_command(command, config, CliOverrides{out_dir, seed, dt}, true);
      },
      py::arg("command"), py::arg("config"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(),
      py::arg("dt") = py::none());
}

}  // namespace

PYBIND11_MODULE(_railbeam, m) {
  m.doc() = "Pinned semilinear beam: FEM simulation and Lyapunov certificates";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const SolverError& e) {
      py::set_error(solver_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  bind_model(m);
  bind_fem(m);
  bind_certificate(m);
  bind_runner(m);
}
