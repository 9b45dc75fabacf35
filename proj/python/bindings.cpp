#include "cli.hpp"
#include "ruinkit/cascade.hpp"
#include "ruinkit/errors.hpp"
#include "ruinkit/fragility.hpp"
#include "ruinkit/inference_pitfalls.hpp"
#include "ruinkit/random.hpp"
#include "ruinkit/ruin_engine.hpp"
#include "ruinkit/sensitivity.hpp"
#include "ruinkit/serialize.hpp"
#include "ruinkit/tail_diagnostics.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ruinkit;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
  }
}

json from_py(const py::handle& h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    json out = json::object();
    for (const auto& [k, v] : h.cast<py::dict>()) out[py::str(k).cast<std::string>()] = from_py(v);
    return out;
  }
  if (py::isinstance<py::sequence>(h)) {
    json out = json::array();
    for (const auto& v : h.cast<py::sequence>()) out.push_back(from_py(v));
    return out;
  }
  throw ConfigError("unsupported value of type " + py::str(py::type::of(h)).cast<std::string>());
}

// A distribution is a shorthand string ("pareto:alpha=2") or a dict with the
// same keys as the JSON form.
DistributionSpec dist(const py::handle& h) {
  DistributionSpec spec;
  if (py::isinstance<py::str>(h)) {
    spec = cli::parse_distribution_spec(h.cast<std::string>());
  } else {
    spec = from_py(h).get<DistributionSpec>();
  }
  spec.validate();
  return spec;
}

template <class T>
py::object report(const T& value) {
  return to_py(json(value));
}

}  // namespace

PYBIND11_MODULE(_ruinkit, m) {
  m.doc() = "Ruin, tail-risk and fragility diagnostics";

  auto base = py::register_exception<Error>(m, "RuinkitError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InsufficientTailData>(m, "InsufficientTailData", base.ptr());
  py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
  py::register_exception<DivergentMoment>(m, "DivergentMoment", base.ptr());
  py::register_exception<AmbiguousClassification>(m, "AmbiguousClassification", base.ptr());

  m.def("set_threads", &set_default_threads, py::arg("threads"),
        "Default worker count for simulations; 0 uses hardware concurrency.");

  // distributions
  m.def("distribution", [](const py::object& d) { return report(dist(d)); }, py::arg("dist"),
        "Normalized dict form of a distribution.");
  m.def("survival", [](const py::object& d, double x) { return survival(dist(d), x); }, py::arg("dist"), py::arg("x"));
  m.def("cdf", [](const py::object& d, double x) { return cdf(dist(d), x); }, py::arg("dist"), py::arg("x"));
  m.def("quantile", [](const py::object& d, double q) { return quantile(dist(d), q); }, py::arg("dist"),
        py::arg("q"));
  m.def(
      "sample",
      [](const py::object& d, std::size_t n, std::uint64_t seed) {
        const auto spec = dist(d);
        py::gil_scoped_release nogil;
        return sample(spec, n, seed).values;
      },
      py::arg("dist"), py::arg("n"), py::arg("seed") = 0);

  // ruin
  m.def(
      "repeated_exposure_ruin", [](double p, std::uint64_t n) { return repeated_exposure_ruin({p, n}); }, py::arg("p"),
      py::arg("n"));
  m.def("exposures_to_ruin_level", &exposures_to_ruin_level, py::arg("p"), py::arg("target"));
  m.def("gambler_ruin", &gambler_ruin_closed_form, py::arg("start"), py::arg("upper"), py::arg("p_up"));
  m.def(
      "simulate_exposure",
      [](double p, std::uint64_t n, std::uint64_t replicates, std::uint64_t seed) {
        RuinReport r;
        {
          py::gil_scoped_release nogil;
          r = simulate_repeated_exposure({p, n}, replicates, seed);
        }
        return report(r);
      },
      py::arg("p"), py::arg("n"), py::arg("replicates") = 10000, py::arg("seed") = 0);
  m.def(
      "simulate_walk",
      [](double start, const py::object& step, double barrier, std::optional<double> upper,
         std::optional<std::uint64_t> horizon, std::uint64_t max_steps, std::uint64_t replicates,
         std::uint64_t seed) {
        WalkSpec spec{start, dist(step), barrier, upper, horizon, max_steps};
        RuinReport r;
        {
          py::gil_scoped_release nogil;
          r = simulate_absorbing_walk(spec, replicates, seed);
        }
        return report(r);
      },
      py::arg("start"), py::arg("step"), py::arg("barrier") = 0.0, py::arg("upper") = py::none(),
      py::arg("horizon") = py::none(), py::arg("max_steps") = 1'000'000, py::arg("replicates") = 10000,
      py::arg("seed") = 0);

  // tails
  m.def(
      "convolution_ratio",
      [](const py::object& d, std::vector<double> xs, std::uint64_t replicates, std::uint64_t seed) {
        const auto spec = dist(d);
        TailDiagnosticsReport r;
        {
          py::gil_scoped_release nogil;
          r.convolution_ratios = convolution_ratio(spec, xs, replicates, seed);
        }
        return to_py(json(r)["convolution_ratios"]);
      },
      py::arg("dist"), py::arg("xs"), py::arg("replicates") = 1'000'000, py::arg("seed") = 0);
  m.def(
      "sum_max_ratio",
      [](const py::object& d, int n, std::vector<double> xs, std::uint64_t replicates, std::uint64_t seed) {
        const auto spec = dist(d);
        TailDiagnosticsReport r;
        {
          py::gil_scoped_release nogil;
          r.sum_max_ratios = sum_max_ratio(spec, n, xs, replicates, seed);
        }
        return to_py(json(r)["sum_max_ratios"]);
      },
      py::arg("dist"), py::arg("n"), py::arg("xs"), py::arg("replicates") = 1'000'000, py::arg("seed") = 0);
  m.def(
      "max_to_sum",
      [](const std::vector<double>& xs, double p) {
        std::vector<std::pair<std::size_t, double>> out;
        for (const auto& pt : max_to_sum(xs, p)) out.emplace_back(pt.n, pt.r);
        return out;
      },
      py::arg("sample"), py::arg("p") = 1.0, "Running max-to-sum ratio as (n, R_n(p)) pairs.");
  m.def(
      "hill",
      [](const std::vector<double>& xs, std::optional<std::size_t> k) {
        const auto h = hill_estimator(xs, k);
        py::dict out;
        out["alpha"] = h.alpha;
        out["stderr"] = h.stderr_;
        out["k"] = h.k;
        return out;
      },
      py::arg("sample"), py::arg("k") = py::none());
  m.def(
      "analyze_sample",
      [](std::vector<double> xs, double moment_order, std::optional<std::size_t> hill_k, std::uint64_t seed) {
        SampleAnalysisOptions opt;
        opt.moment_order = moment_order;
        opt.hill_k = hill_k;
        opt.seed = seed;
        TailDiagnosticsReport r;
        {
          py::gil_scoped_release nogil;
          r = analyze_sample({std::move(xs), seed, std::nullopt}, opt);
        }
        return report(r);
      },
      py::arg("sample"), py::arg("moment_order") = 1.0, py::arg("hill_k") = py::none(), py::arg("seed") = 0);
  m.def(
      "classify_quadrant",
      [](const std::string& tail, const std::string& scope) {
        const auto t = tail == "fat" ? TailClass::subexponential : tail_class_from_string(tail);
        return report(classify_quadrant(t, scope_from_string(scope)));
      },
      py::arg("tail"), py::arg("scope"));

  // sensitivity
  m.def(
      "per_period_ruin",
      [](const py::object& family, double mu, double sigma, double barrier) {
        return per_period_ruin(dist(family), mu, sigma, barrier);
      },
      py::arg("family"), py::arg("mu"), py::arg("sigma"), py::arg("barrier"));
  m.def(
      "sweep",
      [](const py::object& families, double benefit, std::vector<double> sigmas, std::vector<double> irs,
         double ir_sigma, double barrier, std::uint64_t horizon) {
        SweepConfig cfg;
        if (!families.is_none()) {
          cfg.families.clear();
          for (const auto& f : families.cast<py::sequence>()) cfg.families.push_back(dist(f));
        }
        cfg.benefit = benefit;
        cfg.uncertainty_grid = std::move(sigmas);
        cfg.ir_grid = std::move(irs);
        cfg.ir_sigma = ir_sigma;
        cfg.barrier = barrier;
        cfg.horizon = horizon;
        cfg.validate();
        auto rows = scale_sweep(cfg);
        const auto ir_rows = information_ratio_sweep(cfg);
        rows.insert(rows.end(), ir_rows.begin(), ir_rows.end());
        py::dict out;
        out["rows"] = to_py(json(rows));
        out["skepticism"] = to_py(json(skepticism_report(cfg)));
        return out;
      },
      py::arg("families") = py::none(), py::arg("benefit") = 1.0,
      py::arg("sigmas") = std::vector<double>{0.5, 1.0, 2.0, 4.0},
      py::arg("irs") = std::vector<double>{0.0, 0.5, 1.0, 2.0, 5.0, 10.0}, py::arg("ir_sigma") = 1.0,
      py::arg("barrier") = 10.0, py::arg("horizon") = 1000);

  // fragility
  m.def(
      "harm", [](const std::string& h, double x) { return HarmFunction::parse(h)(x); }, py::arg("harm"),
      py::arg("x"));
  m.def(
      "concentration_compare",
      [](const std::string& h, double total, long long k) {
        const auto r = concentration_compare(HarmFunction::parse(h), total, k);
        return std::make_pair(r.concentrated, r.distributed);
      },
      py::arg("harm"), py::arg("total"), py::arg("k"));
  m.def(
      "fragility_measure",
      [](const std::string& h, const py::object& d, double sigma_lo, double sigma_hi, int resolution) {
        return fragility_measure(HarmFunction::parse(h), dist(d), sigma_lo, sigma_hi, resolution);
      },
      py::arg("harm"), py::arg("dist"), py::arg("sigma_lo"), py::arg("sigma_hi"), py::arg("resolution") = 200);
  m.def(
      "one_over_n_ruin",
      [](int n, double q, double theta, const std::string& correlation, double rho) {
        PortfolioSpec s{.n = n, .q = q, .theta = theta};
        if (correlation == "common_shock") {
          s.correlation = PortfolioSpec::Correlation::common_shock;
          s.rho = rho;
        } else if (correlation != "independent") {
          throw ConfigError("correlation must be 'independent' or 'common_shock'");
        }
        return one_over_n_ruin(s);
      },
      py::arg("n"), py::arg("q"), py::arg("theta") = 1.0, py::arg("correlation") = "independent",
      py::arg("rho") = 0.0);

  // cascades
  m.def("borel_pmf", &borel_pmf, py::arg("m"), py::arg("n"));
  m.def(
      "branching_cascade",
      [](double mean, std::uint64_t replicates, std::uint64_t seed, std::uint64_t node_cap) {
        CascadeConfig cfg;
        cfg.offspring_mean = mean;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.node_cap = node_cap;
        CascadeSample s;
        {
          py::gil_scoped_release nogil;
          s = run_branching(cfg);
        }
        py::dict out;
        out["sizes"] = s.sizes;
        out["capped"] = s.capped;
        return out;
      },
      py::arg("m"), py::arg("replicates") = 10000, py::arg("seed") = 0, py::arg("node_cap") = 10'000'000);
  m.def(
      "network_cascade",
      [](std::size_t nodes, const std::string& edges, double edge_probability,
         std::vector<std::pair<std::size_t, std::size_t>> edge_list, double transmission, int blocks,
         std::uint64_t replicates, std::uint64_t seed) {
        CascadeConfig cfg;
        cfg.model = CascadeModel::network;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.network.nodes = nodes;
        cfg.network.edges = edge_model_from_string(edges);
        cfg.network.edge_probability = edge_probability;
        cfg.network.edge_list = std::move(edge_list);
        cfg.network.transmission = transmission;
        if (blocks > 1) cfg.network.partition = block_partition(nodes, blocks);
        CascadeSample s;
        std::size_t cap = 0;
        {
          py::gil_scoped_release nogil;
          s = run_network_contagion(cfg);
          cap = largest_barrier_component(cfg.network, seed);
        }
        py::dict out;
        out["sizes"] = s.sizes;
        out["largest_barrier_component"] = cap;
        return out;
      },
      py::arg("nodes") = 100, py::arg("edges") = "ring", py::arg("edge_probability") = 0.05,
      py::arg("edge_list") = std::vector<std::pair<std::size_t, std::size_t>>{}, py::arg("transmission") = 0.5,
      py::arg("blocks") = 1, py::arg("replicates") = 10000, py::arg("seed") = 0);

  // inference pitfalls
  m.def(
      "difference_stats",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& pairing, std::uint64_t seed) {
        PairingMode mode = PairingMode::paired;
        if (pairing == "independent") {
          mode = PairingMode::independent;
        } else if (pairing != "paired") {
          throw ConfigError("pairing must be 'paired' or 'independent'");
        }
        return report(difference_stats(x, y, mode, seed));
      },
      py::arg("x"), py::arg("y"), py::arg("pairing") = "paired", py::arg("seed") = 0);
  m.def(
      "two_test_fallacy",
      [](double effect_x, double effect_y, int n_per_group, double alpha, std::uint64_t replicates,
         std::uint64_t seed) {
        TwoTestReport r;
        {
          py::gil_scoped_release nogil;
          r = two_test_fallacy_sim(effect_x, effect_y, n_per_group, alpha, replicates, seed);
        }
        return report(r);
      },
      py::arg("effect_x"), py::arg("effect_y"), py::arg("n_per_group") = 50, py::arg("alpha") = 0.05,
      py::arg("replicates") = 100000, py::arg("seed") = 0);
  m.def("effect_for_power", &effect_for_power, py::arg("power"), py::arg("n_per_group"), py::arg("alpha") = 0.05);
  m.def(
      "luck_quadrants",
      [](double p_luck, std::uint64_t replicates, std::uint64_t seed, double luck_size) {
        return report(luck_quadrant_sim(p_luck, replicates, seed, luck_size));
      },
      py::arg("p_luck") = 0.5, py::arg("replicates") = 100000, py::arg("seed") = 0, py::arg("luck_size") = 1.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release nogil;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI command in-process and returns (exit_code, stdout, stderr).");
}
