#include "nemytskii/analysis.hpp"
#include "nemytskii/closed_form.hpp"
#include "nemytskii/coefficients.hpp"
#include "nemytskii/config.hpp"
#include "nemytskii/error.hpp"
#include "nemytskii/fpe_solver.hpp"
#include "nemytskii/grid_field.hpp"
#include "nemytskii/particle_sim.hpp"
#include "nemytskii/scenarios.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace nemytskii;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Degenerate nonlinear Fokker-Planck solver, particle simulator and diagnostics";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());
    py::register_exception<SimulationError>(m, "SimulationError", base.ptr());

    // Coefficients
    py::class_<NonlinearitySpec>(m, "Nonlinearity")
        .def_static("power_law", &NonlinearitySpec::power_law, py::arg("m"), py::arg("zeta") = 0.0)
        .def_static(
            "custom",
            [](const py::array_t<double, py::array::c_style | py::array::forcecast>& samples, double r_max,
               double m, double zeta) { return NonlinearitySpec::custom(to_vector(samples), r_max, m, zeta); },
            py::arg("samples"), py::arg("r_max"), py::arg("m"), py::arg("zeta") = 0.0)
        .def_property_readonly("m", &NonlinearitySpec::m)
        .def_property_readonly("zeta", &NonlinearitySpec::zeta)
        .def("beta", &NonlinearitySpec::beta)
        .def("beta_prime", &NonlinearitySpec::beta_prime)
        .def("beta_inverse", &NonlinearitySpec::beta_inverse);

    py::class_<VectorField>(m, "VectorField")
        .def_static("zero", &VectorField::zero)
        .def_static("tanh_profile", &VectorField::tanh_profile, py::arg("strength"))
        .def_static("gaussian_dipole", &VectorField::gaussian_dipole, py::arg("amplitude"), py::arg("width"))
        .def("__call__", [](const VectorField& e, double x) { return e.value(x); })
        .def_readonly("name", &VectorField::name);

    py::class_<ScalarResponse>(m, "ScalarResponse")
        .def_static("zero", &ScalarResponse::zero)
        .def_static("constant", &ScalarResponse::constant, py::arg("c"))
        .def_static("monomial", &ScalarResponse::monomial, py::arg("l"), py::arg("r_sat") = 1.0)
        .def_static("clipped_identity", &ScalarResponse::clipped_identity)
        .def("__call__", [](const ScalarResponse& b, double r) { return b.value(r); })
        .def_readonly("name", &ScalarResponse::name);

    py::class_<DriftSpec>(m, "Drift")
        .def(py::init([](VectorField E, ScalarResponse b) { return DriftSpec{std::move(E), std::move(b)}; }),
             py::arg("E") = VectorField::zero(), py::arg("b") = ScalarResponse::zero())
        .def_property_readonly("drift_bound", &DriftSpec::drift_bound);

    m.def("sigma_squared", &sigma_squared, py::arg("spec"), py::arg("r"));
    m.def("entropy_psi", &entropy_Psi, py::arg("spec"), py::arg("r"));
    m.def("lambda_zero", &lambda_zero, py::arg("drift"));
    m.def("check_hypotheses", [](const NonlinearitySpec& spec, const DriftSpec& drift) {
        py::list out;
        for (const auto& c : check_hypotheses(spec, drift).clauses) {
            out.append(py::dict(py::arg("id") = c.id, py::arg("passed") = c.passed,
                                py::arg("advisory") = c.advisory, py::arg("witness") = c.witness));
        }
        return out;
    });

    // Closed forms
    py::class_<BarenblattParams>(m, "Barenblatt")
        .def(py::init(&make_barenblatt), py::arg("d"), py::arg("m"), py::arg("x0") = 0.0)
        .def_readonly("d", &BarenblattParams::d)
        .def_readonly("m", &BarenblattParams::m)
        .def_readonly("alpha", &BarenblattParams::alpha)
        .def_readonly("k", &BarenblattParams::k)
        .def_readonly("beta_ss", &BarenblattParams::beta_ss)
        .def_readonly("c_norm", &BarenblattParams::c_norm)
        .def("__call__", &barenblatt_eval, py::arg("t"), py::arg("x"))
        .def("mass", &barenblatt_mass, py::arg("t"))
        .def("moment2", &barenblatt_moment2, py::arg("t"))
        .def("support_radius", &BarenblattParams::support_radius, py::arg("t"));

    m.def("regularity_threshold", [](double mm, double p) {
        const auto r = regularity_threshold(mm, p);
        return py::make_tuple(r.s_max, r.density_condition);
    });
    m.def("time_integrability_exponent", [](const BarenblattParams& bb, double p, double s) {
        const auto r = time_integrability_exponent(bb, p, s);
        return py::make_tuple(r.exponent, r.integrable);
    });

    // Grid solver
    py::class_<GridField>(m, "GridField")
        .def(py::init([](double lo, double hi, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                 return GridField(lo, hi, to_vector(v));
             }),
             py::arg("lo"), py::arg("hi"), py::arg("values"))
        .def_static("sample", &GridField::sample, py::arg("lo"), py::arg("hi"), py::arg("n_cells"), py::arg("f"))
        .def_property_readonly("lo", &GridField::lo)
        .def_property_readonly("hi", &GridField::hi)
        .def_property_readonly("n_cells", &GridField::n_cells)
        .def_property_readonly("cell_width", &GridField::cell_width)
        .def_property_readonly("values", [](const GridField& g) { return to_array(g.values()); })
        .def_property_readonly("centers", [](const GridField& g) {
            py::array_t<double> out(static_cast<py::ssize_t>(g.n_cells()));
            for (std::size_t i = 0; i < g.n_cells(); ++i) {
                out.mutable_at(i) = g.center(i);
            }
            return out;
        })
        .def("mass", &GridField::mass)
        .def("linf_norm", &GridField::linf_norm)
        .def("normalized", &GridField::normalized);
    m.def("l1_distance", &l1_distance);

    py::enum_<BoundaryPolicy>(m, "BoundaryPolicy")
        .value("zero_flux", BoundaryPolicy::zero_flux)
        .value("dirichlet_zero", BoundaryPolicy::dirichlet_zero);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("lambda_step", &SolverConfig::lambda_step)
        .def_readwrite("epsilon_reg", &SolverConfig::epsilon_reg)
        .def_readwrite("newton_tol", &SolverConfig::newton_tol)
        .def_readwrite("newton_max_iter", &SolverConfig::newton_max_iter)
        .def_readwrite("boundary", &SolverConfig::boundary)
        .def_readwrite("max_clipped_mass", &SolverConfig::max_clipped_mass);

    m.def(
        "resolvent_solve",
        [](const GridField& f, double lambda, const NonlinearitySpec& spec, const DriftSpec& drift,
           const SolverConfig& cfg) { return resolvent_solve(f, lambda, spec, drift, cfg).field; },
        py::arg("f"), py::arg("lam"), py::arg("spec"), py::arg("drift"), py::arg("config"));
    m.def(
        "run_chain",
        [](const GridField& nu, double T, const SolverConfig& cfg, const NonlinearitySpec& spec,
           const DriftSpec& drift) {
            py::gil_scoped_release release;
            return run_chain(nu, T, cfg, spec, drift);
        },
        py::arg("nu"), py::arg("T"), py::arg("config"), py::arg("spec"), py::arg("drift"));
    m.def("semigroup_distance", &semigroup_distance, py::arg("nu1"), py::arg("nu2"), py::arg("T"),
          py::arg("config"), py::arg("spec"), py::arg("drift"));
    m.def(
        "entropy_audit",
        [](const GridField& nu, double T, const SolverConfig& cfg, const NonlinearitySpec& spec,
           const DriftSpec& drift) {
            const auto traj = step_chain(nu, T, cfg, spec, drift);
            std::vector<double> audit;
            for (const auto& r : nemytskii::entropy_audit(traj, spec)) {
                audit.push_back(r.audit_value);
            }
            return to_array(audit);
        },
        py::arg("nu"), py::arg("T"), py::arg("config"), py::arg("spec"), py::arg("drift"));

    // Particles
    py::enum_<KernelType>(m, "KernelType")
        .value("gaussian", KernelType::gaussian)
        .value("epanechnikov", KernelType::epanechnikov);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("n_particles", &SimConfig::n_particles)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t0", &SimConfig::t0)
        .def_readwrite("T", &SimConfig::T)
        .def_readwrite("kde", &SimConfig::kde)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("domain_bound", &SimConfig::domain_bound);

    m.def(
        "seed_from_density",
        [](const std::function<double(double)>& density, double lo, double hi, std::size_t n,
           std::uint64_t seed) { return to_array(seed_from_density(density, lo, hi, n, seed).positions); },
        py::arg("density"), py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("seed"));
    m.def(
        "simulate",
        [](const SimConfig& cfg, const NonlinearitySpec& spec, const DriftSpec& drift,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& initial) {
            ParticleEnsemble ens;
            ens.positions = to_vector(initial);
            ens.t = cfg.t0;
            SimResult res;
            {
                py::gil_scoped_release release;
                res = run(cfg, spec, drift, std::move(ens));
            }
            py::dict out;
            out["positions"] = to_array(res.final_ensemble.positions);
            std::vector<double> t, var;
            for (const auto& r : res.series) {
                t.push_back(r.t);
                var.push_back(r.variance);
            }
            out["t"] = to_array(t);
            out["variance"] = to_array(var);
            out["variance_slope"] = variance_loglog_slope(res.series);
            return out;
        },
        py::arg("config"), py::arg("spec"), py::arg("drift"), py::arg("initial"));

    // Analysis
    m.def(
        "w1_distance",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& samples, const GridField& nu) {
            const auto v = to_vector(samples);
            return w1_distance(v, nu);
        },
        py::arg("samples"), py::arg("nu"));
    m.def(
        "maximal_function",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values, double x_first,
           double spacing, double R, double x) {
            return maximal_function(SampledFunction(x_first, spacing, to_vector(values)), R, x);
        },
        py::arg("values"), py::arg("x_first"), py::arg("spacing"), py::arg("R"), py::arg("x"));
    m.def(
        "gagliardo_seminorm",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values, double x_first,
           double spacing, double s, double p) {
            const auto est = gagliardo_seminorm(SampledFunction(x_first, spacing, to_vector(values)), s, p);
            return py::make_tuple(est.value, est.converged);
        },
        py::arg("values"), py::arg("x_first"), py::arg("spacing"), py::arg("s"), py::arg("p"));

    // Scenarios
    m.def("scenario_names", &scenario_names);
    m.def(
        "run_config",
        [](const std::string& text, const std::filesystem::path& output_dir, std::optional<std::uint64_t> seed) {
            const auto sc = parse_config(text);
            RunOutcome out;
            {
                py::gil_scoped_release release;
                out = run_scenario(sc, {output_dir, seed});
            }
            return py::make_tuple(out.exit_code, out.artifacts, out.error);
        },
        py::arg("text"), py::arg("output_dir"), py::arg("seed") = py::none());
}
