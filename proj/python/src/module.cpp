#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "pfield/config.hpp"
#include "pfield/distributions.hpp"
#include "pfield/fbs.hpp"
#include "pfield/fields.hpp"
#include "pfield/partition1d.hpp"
#include "pfield/renewal.hpp"
#include "pfield/rng.hpp"
#include "pfield/stats.hpp"

namespace py = pybind11;
using namespace pfield;

namespace {

py::array_t<double> to_array(const std::vector<double>& v, std::size_t m1, std::size_t m2) {
  py::array_t<double> out({m1, m2});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ModelSpec make_spec(const std::string& kind, std::vector<double> alphas, std::vector<std::int64_t> n,
                    std::vector<std::int64_t> depth) {
  auto k = parse_model_kind(kind);
  if (!k) throw std::invalid_argument("unknown model kind: " + kind);
  ModelSpec spec;
  spec.kind = *k;
  spec.alphas = std::move(alphas);
  spec.n = std::move(n);
  spec.forest_depth = std::move(depth);
  spec.validate();
  return spec;
}

py::dict sample_dict(const FieldSample& s) {
  py::dict d;
  d["raw"] = to_array(s.raw, s.m1, s.m2);
  d["normalized"] = to_array(s.normalized, s.m1, s.m2);
  d["corner1"] = s.corner1;
  d["corner2"] = s.corner2;
  d["normalization"] = s.normalization;
  d["sigma"] = s.sigma;
  d["truncation_error_bound"] = s.truncation_error_bound;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = PFIELD_VERSION;

  m.def(
      "simulate",
      [](const std::string& kind, std::vector<double> alphas, std::vector<std::int64_t> n,
         std::vector<double> t1, std::vector<double> t2, const std::string& seed,
         std::vector<std::int64_t> forest_depth) {
        const ModelSpec spec = make_spec(kind, std::move(alphas), std::move(n), std::move(forest_depth));
        CornerGrid grid{std::move(t1), std::move(t2)};
        FieldSample s;
        {
          py::gil_scoped_release release;
          s = pfield::simulate(spec, grid, Seed128::from_hex(seed));
        }
        return sample_dict(s);
      },
      py::arg("kind"), py::arg("alphas"), py::arg("n"), py::arg("t1"), py::arg("t2") = std::vector<double>{},
      py::arg("seed") = "0", py::arg("forest_depth") = std::vector<std::int64_t>{});

  m.def(
      "exact_variance",
      [](const std::string& kind, std::vector<double> alphas, std::vector<std::int64_t> n) {
        return exact_variance(make_spec(kind, std::move(alphas), std::move(n), {}));
      },
      py::arg("kind"), py::arg("alphas"), py::arg("n"));

  m.def(
      "renewal_q",
      [](double alpha, std::size_t kmax) {
        const RenewalSequence rs = renewal_sequence(make_hs_pmf(alpha), kmax);
        return py::array_t<double>(rs.q().size(), rs.q().data());
      },
      py::arg("alpha"), py::arg("kmax"));

  m.def(
      "weights",
      [](double alpha, std::int64_t n, std::size_t kmax) {
        const WeightProfile w = weights(renewal_sequence(make_hs_pmf(alpha), kmax), n);
        py::dict d;
        d["j_min"] = w.j_min;
        d["b"] = py::array_t<double>(w.b.size(), w.b.data());
        d["b_n_sq"] = w.b_n_sq;
        return d;
      },
      py::arg("alpha"), py::arg("n"), py::arg("kmax"));

  m.def("c_alpha", &c_alpha, py::arg("alpha"));
  m.def("hs_exact_variance", &hs_exact_variance, py::arg("alpha"), py::arg("n"));
  m.def("sum_q_sq", [](double alpha) { return renewal_summary(alpha).sum_sq; }, py::arg("alpha"));
  m.def("forest_truncation_bound", &forest_truncation_bound, py::arg("alpha"), py::arg("depth"));

  m.def(
      "expected_occupancy",
      [](double alpha, std::uint64_t n) {
        const ExpectedOccupancy e = expected_occupancy(make_karlin_pmf(alpha), n);
        return py::make_tuple(e.Phi_n, e.EK_odd);
      },
      py::arg("alpha"), py::arg("n"));

  m.def(
      "pmf",
      [](const std::string& family, double alpha, std::uint64_t k) {
        if (family == "karlin") return make_karlin_pmf(alpha).pmf_at(k);
        if (family == "hs") return make_hs_pmf(alpha).pmf_at(k);
        throw std::invalid_argument("family must be 'karlin' or 'hs'");
      },
      py::arg("family"), py::arg("alpha"), py::arg("k"));

  m.def(
      "sample_fbs",
      [](double H1, double H2, std::vector<double> t1, std::vector<double> t2, const std::string& seed) {
        const HurstPair H{H1, H2};
        H.validate();
        CornerGrid grid{std::move(t1), std::move(t2)};
        grid.validate(true);
        FbsSampler sampler(H, grid);
        RandomStream rng(Seed128::from_hex(seed));
        return to_array(sampler.sample(rng), grid.t1.size(), grid.t2.size());
      },
      py::arg("H1"), py::arg("H2"), py::arg("t1"), py::arg("t2"), py::arg("seed") = "0");

  m.def(
      "ks_normal",
      [](std::vector<double> x, double sigma) {
        const KsResult r = ks_normal(x, sigma);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("samples"), py::arg("sigma") = 1.0);

  // Runs a verify config given as JSON text; returns (all_pass, report JSON text).
  m.def(
      "verify",
      [](const std::string& config_json) {
        const RunConfig cfg = parse_run_config_text(config_json);
        VerifyResult r;
        {
          py::gil_scoped_release release;
          r = run_verify(cfg);
        }
        return py::make_tuple(r.all_pass(), r.report.dump());
      },
      py::arg("config_json"));

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
