#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdd/divergence.hpp"
#include "sdd/error.hpp"
#include "sdd/harness.hpp"
#include "sdd/histogram.hpp"
#include "sdd/mgof.hpp"
#include "sdd/sdde.hpp"
#include "sdd/sddr.hpp"
#include "sdd/threshold.hpp"

namespace py = pybind11;
using namespace sdd;

namespace {

DetectorConfig detector(int level, const std::string& metric) {
  DetectorConfig c;
  c.features.level = parse_level(level);
  c.metric = DivergenceMetric(parse_metric(metric));
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Seller-level detection of farmed transaction days";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SeparationError>(m, "SeparationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<DataCollection>(m, "DataCollection")
      .def(py::init<>())
      .def(py::init([](std::string entity, std::int64_t day, std::vector<std::int32_t> events) {
             return DataCollection{std::move(entity), day, std::move(events)};
           }),
           py::arg("entity_id"), py::arg("day"), py::arg("events"))
      .def_readwrite("entity_id", &DataCollection::entity_id)
      .def_readwrite("day", &DataCollection::day)
      .def_readwrite("events", &DataCollection::events)
      .def_property_readonly("id", &DataCollection::id)
      .def("__eq__", [](const DataCollection& a, const DataCollection& b) { return a == b; });

  py::class_<Verdict>(m, "Verdict")
      .def_readonly("id", &Verdict::id)
      .def_readonly("divergence", &Verdict::divergence)
      .def_readonly("flagged", &Verdict::flagged)
      .def_property_readonly("rule", [](const Verdict& v) { return std::string(to_string(v.rule)); })
      .def("__repr__", [](const Verdict& v) { return verdict_json(v); });

  py::class_<Scores>(m, "Scores")
      .def_readonly("precision", &Scores::precision)
      .def_readonly("recall", &Scores::recall)
      .def_readonly("f1", &Scores::f1);

  m.def("kl", [](std::vector<double> p, std::vector<double> q) { return kl(p, q); });
  m.def("jsd", [](std::vector<std::vector<double>> ps) { return jsd_multi(ps); },
        "Jensen-Shannon divergence of equally weighted distributions, in bits");

  m.def("first_level", [](const DataCollection& c) { return build_first_level(c).counts; });
  m.def("second_level", [](const DataCollection& c) { return build_second_level(build_first_level(c)).counts; });

  m.def("optimal_threshold",
        [](double mu_n, double sigma_n, double mu_a, double sigma_a, double alpha) {
          return optimal_threshold({{mu_n, sigma_n}, {mu_a, sigma_a}, alpha});
        },
        py::arg("mu_normal"), py::arg("sigma_normal"), py::arg("mu_anomalous"), py::arg("sigma_anomalous"),
        py::arg("alpha"));

  m.def("detect_sddr",
        [](const std::vector<DataCollection>& cs, int level, const std::string& metric) {
          return detect_sddr(cs, detector(level, metric));
        },
        py::arg("collections"), py::arg("level") = 1, py::arg("metric") = "jsd");
  m.def("detect_sddr_plus",
        [](const std::vector<DataCollection>& cs, double alpha, int level, const std::string& metric) {
          return detect_sddr_plus(cs, detector(level, metric), alpha);
        },
        py::arg("collections"), py::arg("alpha"), py::arg("level") = 1, py::arg("metric") = "jsd");

  m.def("sdde",
        [](const std::vector<DataCollection>& cs, const std::vector<DataCollection>& normal,
           const std::vector<DataCollection>& anomalous, double alpha, int level, const std::string& metric) {
          auto state =
              SddeState::from_collections(normal, anomalous, alpha, detector(level, metric), EvidencePolicy::kStatic);
          return state.classify_batch(cs);
        },
        py::arg("collections"), py::arg("evidence_normal"), py::arg("evidence_anomalous"), py::arg("alpha") = 0.5,
        py::arg("level") = 1, py::arg("metric") = "jsd", "Static SDD-E against fixed evidence");

  m.def("mgof",
        [](const std::vector<DataCollection>& cs, std::uint64_t c_th, double significance, int level) {
          MgofConfig cfg;
          cfg.c_th = c_th;
          cfg.significance = significance;
          FeatureConfig f;
          f.level = parse_level(level);
          return mgof_run(cs, cfg, f);
        },
        py::arg("collections"), py::arg("c_th") = 3, py::arg("significance") = 0.05, py::arg("level") = 1);

  m.def("metrics", [](const std::vector<bool>& predicted, const std::vector<bool>& actual) {
    return metrics(predicted, actual);
  });

  m.def("make_dataset",
        [](const std::string& farm, double alpha, double nu, std::size_t days, std::uint64_t seed) {
          ExperimentConfig c;
          c.farm = parse_farm(farm);
          c.alpha = alpha;
          c.fraction_anomalous = alpha;
          c.nu = nu;
          c.days = days;
          c.validate();
          auto d = make_dataset(c, seed);
          py::dict out;
          out["collections"] = d.collections;
          out["farmed"] = d.farmed;
          out["evidence_normal"] = d.evidence_normal;
          out["evidence_anomalous"] = d.evidence_anomalous;
          return out;
        },
        py::arg("farm") = "centralized", py::arg("alpha") = 0.2, py::arg("nu") = 1.0, py::arg("days") = 200,
        py::arg("seed") = 1);

  m.def("run_experiment",
        [](const std::string& algo, const std::string& farm, int level, double alpha, double nu,
           std::vector<std::uint64_t> seeds, std::size_t days, int jobs) {
          ExperimentConfig c;
          c.algo = parse_algo(algo);
          c.farm = parse_farm(farm);
          c.level = parse_level(level);
          c.alpha = alpha;
          c.fraction_anomalous = alpha;
          c.nu = nu;
          c.seeds = std::move(seeds);
          c.days = days;
          c.jobs = jobs;
          py::gil_scoped_release release;
          return run_experiment(c).scores;
        },
        py::arg("algo") = "sddr+", py::arg("farm") = "centralized", py::arg("level") = 1, py::arg("alpha") = 0.2,
        py::arg("nu") = 1.0, py::arg("seeds") = std::vector<std::uint64_t>{1, 2, 3, 4, 5}, py::arg("days") = 200,
        py::arg("jobs") = 1);
}
