#include <collapse_lab/analysis.hpp>
#include <collapse_lab/dynamics.hpp>
#include <collapse_lab/ensemble.hpp>
#include <collapse_lab/errors.hpp>
#include <collapse_lab/scenarios.hpp>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace collapse_lab;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

// Entropy records as a dict of column arrays, keyed like the CSV header.
py::dict records_to_columns(const std::vector<EntropyRecord>& recs) {
    std::vector<double> t, s_td, s_ent, s_sum, s_int, a2, se_td, se_ent, se_sum, se_int, se_a2;
    std::vector<std::complex<double>> coh;
    for (const auto& r : recs) {
        t.push_back(r.t);
        s_td.push_back(r.s_td);
        s_ent.push_back(r.s_ent_avg);
        s_sum.push_back(r.s_sum);
        s_int.push_back(r.s_td_int);
        a2.push_back(r.mean_alpha2);
        coh.push_back(r.coherence);
        se_td.push_back(r.se_s_td);
        se_ent.push_back(r.se_s_ent_avg);
        se_sum.push_back(r.se_s_sum);
        se_int.push_back(r.se_s_td_int);
        se_a2.push_back(r.se_mean_alpha2);
    }
    py::dict d;
    d["tJ"] = to_array(t);
    d["s_td"] = to_array(s_td);
    d["s_ent_avg"] = to_array(s_ent);
    d["s_sum"] = to_array(s_sum);
    d["s_td_int"] = to_array(s_int);
    d["mean_alpha2"] = to_array(a2);
    d["coherence"] = to_array(coh);
    d["se_s_td"] = to_array(se_td);
    d["se_s_ent_avg"] = to_array(se_ent);
    d["se_s_sum"] = to_array(se_sum);
    d["se_s_td_int"] = to_array(se_int);
    d["se_mean_alpha2"] = to_array(se_a2);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Monte Carlo simulator for objective state reduction of an entangled qubit pair";
    m.attr("__version__") = version();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidStateError>(m, "InvalidStateError", PyExc_ValueError);
    py::register_exception<InvalidDensityMatrixError>(m, "InvalidDensityMatrixError", PyExc_ValueError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<TrajectoryFailure>(m, "TrajectoryFailure", PyExc_RuntimeError);

    py::enum_<Outcome>(m, "Outcome")
        .value("ket00", Outcome::ket00)
        .value("ket11", Outcome::ket11)
        .value("unresolved", Outcome::unresolved);
    py::enum_<NoiseKind>(m, "NoiseKind")
        .value("frozen", NoiseKind::frozen)
        .value("ou", NoiseKind::ou)
        .value("white", NoiseKind::white);

    py::class_<PairState>(m, "PairState")
        .def(py::init<>())
        .def(py::init([](Complex a, Complex b) { return PairState{a, b}; }), py::arg("alpha"), py::arg("beta"))
        .def_static("from_weight", &PairState::from_weight, py::arg("weight"))
        .def_readwrite("alpha", &PairState::alpha)
        .def_readwrite("beta", &PairState::beta)
        .def_property_readonly("weight0", &PairState::weight0)
        .def_property_readonly("weight1", &PairState::weight1)
        .def_property_readonly("coherence", &PairState::coherence)
        .def(py::self == py::self)
        .def("__repr__", [](const PairState& s) {
            return "PairState(alpha=" + py::repr(py::cast(s.alpha)).cast<std::string>() +
                   ", beta=" + py::repr(py::cast(s.beta)).cast<std::string>() + ")";
        });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("coupling_j", &ModelParams::coupling_j)
        .def_readwrite("coupling_g", &ModelParams::coupling_g)
        .def_readwrite("dt", &ModelParams::dt)
        .def_readwrite("collapse_rate", &ModelParams::collapse_rate)
        .def_readwrite("collapse_threshold", &ModelParams::collapse_threshold)
        .def_readwrite("max_norm_correction", &ModelParams::max_norm_correction)
        .def_static("born_consistent", &ModelParams::born_consistent, py::arg("j") = 1.0)
        .def("validate", &ModelParams::validate);

    m.def("sigma_expect", &sigma_expect, py::arg("state"));
    m.def("classify", &classify, py::arg("state"), py::arg("threshold") = 1e-9);
    m.def("step_deterministic", &step_deterministic, py::arg("state"), py::arg("xi"),
          py::arg("params") = ModelParams{});
    m.def("step_white", &step_white, py::arg("state"), py::arg("dW"), py::arg("params") = ModelParams{});
    m.def(
        "simulate_trajectory",
        [](const PairState& initial, double xi, const ModelParams& p, double t_max, double record_every) {
            const Trajectory t = simulate_trajectory(initial, [xi](double) { return xi; }, p, t_max, record_every);
            std::vector<double> w;
            for (const auto& s : t.states) w.push_back(s.weight0());
            py::dict d;
            d["tJ"] = to_array(t.times);
            d["alpha2"] = to_array(w);
            d["outcome"] = t.outcome;
            d["collapse_tJ"] = t.collapse_time;
            return d;
        },
        py::arg("initial"), py::arg("xi"), py::arg("params") = ModelParams{}, py::arg("t_max") = 6.0,
        py::arg("record_every") = 0.01, "Trajectory under a frozen noise value xi.");

    py::class_<DensityMatrix2>(m, "DensityMatrix2")
        .def(py::init([](double r00, double r11, Complex r01) { return DensityMatrix2{r00, r11, r01}; }),
             py::arg("rho00"), py::arg("rho11"), py::arg("rho01") = Complex{})
        .def_static("pure", &DensityMatrix2::pure)
        .def_readwrite("rho00", &DensityMatrix2::rho00)
        .def_readwrite("rho11", &DensityMatrix2::rho11)
        .def_readwrite("rho01", &DensityMatrix2::rho01)
        .def_property_readonly("trace", &DensityMatrix2::trace)
        .def_property_readonly("purity", &DensityMatrix2::purity)
        .def("validate", &DensityMatrix2::validate);

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def("eigenvalues", &eigenvalues, py::arg("rho"));
    m.def("von_neumann_entropy", &von_neumann_entropy, py::arg("rho"));
    m.def("entanglement_entropy", &entanglement_entropy, py::arg("state"));
    m.def("interrupt_entropy", &interrupt_entropy, py::arg("p0"), py::arg("p1"));
    m.def(
        "avg_entanglement", [](const std::vector<PairState>& states) { return avg_entanglement(states); },
        py::arg("states"));

    m.def(
        "run_ensemble",
        [](std::size_t n_traj, double alpha0_sq, NoiseKind noise, double t_max, double record_every,
           std::uint64_t seed, unsigned workers, const ModelParams& model, double tau, double g0, bool stratified) {
            EnsembleConfig c;
            c.n_traj = n_traj;
            c.initial_alpha2 = alpha0_sq;
            c.noise.kind = noise;
            c.noise.tau = tau;
            c.noise.g0 = g0;
            c.noise.stratified = stratified;
            c.t_max = t_max;
            c.record_every = record_every;
            c.master_seed = seed;
            c.workers = workers;
            c.model = model;
            MomentSeries series;
            {
                py::gil_scoped_release release;
                series = run_ensemble(c);
            }
            py::dict d = records_to_columns(entropy_series(series));
            const auto& o = series.outcomes().back();
            d["outcomes"] = py::dict(py::arg("00") = o.n00, py::arg("11") = o.n11, py::arg("unresolved") = o.unresolved);
            return d;
        },
        py::arg("n_traj") = 10000, py::arg("alpha0_sq") = 0.75, py::arg("noise") = NoiseKind::frozen,
        py::arg("t_max") = 6.0, py::arg("record_every") = 0.01, py::arg("seed") = 1, py::arg("workers") = 0,
        py::arg("model") = ModelParams{}, py::arg("tau") = 1.0, py::arg("g0") = NoiseSpec{}.g0,
        py::arg("stratified") = false,
        "Runs an ensemble and returns its entropy time series as column arrays.");

    m.def(
        "_run_scenario",
        [](const std::string& name, const std::string& config_json) {
            nlohmann::json j = ScenarioConfig{};
            j.update(nlohmann::json::parse(config_json));
            const ScenarioConfig cfg = j.get<ScenarioConfig>();
            ScenarioResult r;
            {
                py::gil_scoped_release release;
                r = run_scenario(name, cfg);
            }
            nlohmann::json out{{"scenario", r.scenario}, {"passed", r.passed()}, {"summary", r.summary}};
            for (const auto& p : r.outputs) out["outputs"].push_back(p.string());
            for (const auto& c : r.checks) out["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            return out.dump();
        },
        py::arg("name"), py::arg("config_json"));
}
