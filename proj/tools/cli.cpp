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

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace ruinkit::cli {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

enum class Kind { real, integer, text, real_list, distribution, distribution_list };

struct Param {
  std::string name;
  Kind kind;
  json fallback;  // null: unset unless supplied
  std::string help;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Result {
  json body;
  Table table;
};

struct Command {
  std::string name;
  std::string help;
  json replicates;  // default replicate count, null when the command draws nothing
  std::vector<Param> params;
  std::function<Result(const json&)> handler;
};

std::string type_name(Kind k) {
  switch (k) {
    case Kind::real:
      return "NUM";
    case Kind::integer:
      return "INT";
    case Kind::text:
      return "TEXT";
    case Kind::real_list:
      return "NUM,...";
    case Kind::distribution:
      return "DIST";
    case Kind::distribution_list:
      return "DIST,...";
  }
  return "";
}

std::string flag_name(std::string_view key) {
  std::string s = "--";
  for (char c : key) s += c == '_' ? '-' : c;
  return s;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(where + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t integral(double v, const std::string& where) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.007199254740992e15) {
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::uint64_t parse_integer(const std::string& text, const std::string& where) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (!text.empty() && r.ec == std::errc() && r.ptr == text.data() + text.size()) return v;
  return integral(parse_real(text, where), where);
}

json checked_distribution(const json& object, const std::string& where) {
  DistributionSpec spec;
  try {
    from_json(object, spec);
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

// family[:key=value...], e.g. student_t:alpha=3:scale=2, or a JSON object.
json parse_distribution(const std::string& text, const std::string& where) {
  if (!text.empty() && text.front() == '{') {
    try {
      return checked_distribution(json::parse(text), where);
    } catch (const json::parse_error&) {
      throw ConfigError(where + ": malformed JSON distribution");
    }
  }
  const auto parts = split(text, ':');
  if (parts.empty() || parts[0].empty()) throw ConfigError(where + ": empty distribution");
  json object{{"family", parts[0]}};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + parts[i] + "'");
    const std::string key = parts[i].substr(0, eq);
    object[key] = parse_real(parts[i].substr(eq + 1), where + "." + key);
  }
  return checked_distribution(object, where);
}

json from_flag(const Param& p, const std::string& text) {
  const std::string where = flag_name(p.name);
  switch (p.kind) {
    case Kind::real:
      return parse_real(text, where);
    case Kind::integer:
      return parse_integer(text, where);
    case Kind::text:
      return text;
    case Kind::real_list: {
      json out = json::array();
      for (const auto& item : split(text, ',')) out.push_back(parse_real(item, where));
      return out;
    }
    case Kind::distribution:
      return parse_distribution(text, where);
    case Kind::distribution_list: {
      json out = json::array();
      for (const auto& item : split(text, ',')) out.push_back(parse_distribution(item, where));
      return out;
    }
  }
  return nullptr;
}

json from_config(const Param& p, const json& v) {
  const std::string& where = p.name;
  if (v.is_null()) {
    if (!p.fallback.is_null()) throw ConfigError(where + ": may not be null");
    return nullptr;
  }
  auto real = [&](const json& x) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError(where + ": expected a finite number");
    return x.get<double>();
  };
  switch (p.kind) {
    case Kind::real:
      return real(v);
    case Kind::integer:
      if (v.is_number_unsigned()) return v.get<std::uint64_t>();
      return integral(real(v), where);
    case Kind::text:
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
      return v;
    case Kind::real_list: {
      if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
      json out = json::array();
      for (const auto& x : v) out.push_back(real(x));
      return out;
    }
    case Kind::distribution:
      if (v.is_string()) return parse_distribution(v.get<std::string>(), where);
      return checked_distribution(v, where);
    case Kind::distribution_list: {
      if (!v.is_array()) throw ConfigError(where + ": expected an array of distributions");
      json out = json::array();
      for (const auto& x : v) out.push_back(x.is_string() ? parse_distribution(x.get<std::string>(), where)
                                                          : checked_distribution(x, where));
      return out;
    }
  }
  return nullptr;
}

// Typed access to the resolved configuration.
class Args {
 public:
  explicit Args(const json& c) : c_(c) {}

  bool has(const std::string& key) const { return !c_.at(key).is_null(); }
  double real(const std::string& key) const { return required(key).get<double>(); }
  std::uint64_t integer(const std::string& key) const { return required(key).get<std::uint64_t>(); }
  int small_int(const std::string& key) const {
    const auto v = integer(key);
    if (v > 1'000'000'000) throw ConfigError(key + ": value too large");
    return static_cast<int>(v);
  }
  std::string text(const std::string& key) const { return required(key).get<std::string>(); }
  std::vector<double> reals(const std::string& key) const { return required(key).get<std::vector<double>>(); }
  DistributionSpec distribution(const std::string& key) const {
    DistributionSpec s;
    from_json(required(key), s);
    return s;
  }
  std::vector<DistributionSpec> distributions(const std::string& key) const {
    std::vector<DistributionSpec> out;
    for (const auto& item : required(key)) {
      DistributionSpec s;
      from_json(item, s);
      out.push_back(s);
    }
    return out;
  }
  template <class T>
  std::optional<T> maybe(const std::string& key, T (Args::*get)(const std::string&) const) const {
    if (!has(key)) return std::nullopt;
    return (this->*get)(key);
  }

 private:
  const json& required(const std::string& key) const {
    const json& v = c_.at(key);
    if (v.is_null()) throw ConfigError(key + ": required (" + flag_name(key) + ")");
    return v;
  }
  const json& c_;
};

template <class F>
void as_config(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string choice(const Args& a, const std::string& key, std::initializer_list<std::string_view> allowed) {
  auto v = a.text(key);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (auto s : allowed) list += (list.empty() ? "" : "|") + std::string(s);
    throw ConfigError(key + ": expected one of " + list + ", got '" + v + "'");
  }
  return v;
}

std::vector<double> read_values(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError(key + ": cannot read '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string cell = line.substr(0, line.find(','));
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) {
      if (out.empty() && lineno == 1) continue;  // header row
      throw ConfigError(key + ": '" + path + "' line " + std::to_string(lineno) + " is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(key + ": '" + path + "' holds no values");
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> read_edges(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError(key + ": cannot read '" + path + "'");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    std::size_t u = 0, v = 0;
    bool ok = cells.size() == 2;
    if (ok) {
      auto r1 = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), u);
      auto r2 = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), v);
      ok = r1.ec == std::errc() && r2.ec == std::errc() && r1.ptr == cells[0].data() + cells[0].size() &&
           r2.ptr == cells[1].data() + cells[1].size();
    }
    if (!ok) {
      if (out.empty() && lineno == 1) continue;
      throw ConfigError(key + ": '" + path + "' line " + std::to_string(lineno) + " is not an edge u,v");
    }
    out.emplace_back(u, v);
  }
  return out;
}

// ---------------------------------------------------------------- ruin

Result run_ruin(const json& c) {
  const Args a(c);
  const auto seed = a.integer("seed");
  const auto reps = a.integer("replicates");
  Result res;
  RuinReport rep;
  std::optional<double> closed;
  std::string mode;
  if (a.has("p") || a.has("n")) {
    const ExposurePolicy policy{.p = a.real("p"), .n = a.integer("n")};
    as_config("p", [&] { policy.validate(); });
    closed = repeated_exposure_ruin(policy);
    rep = simulate_repeated_exposure(policy, reps, seed);
    mode = "exposure";
  } else {
    WalkSpec walk;
    if (a.has("p_up")) {
      const double start = a.real("start");
      if (start != std::floor(start)) throw ConfigError("start: unit-step walks need an integer start");
      std::optional<long long> upper;
      if (a.has("upper")) {
        const double u = a.real("upper");
        if (u != std::floor(u)) throw ConfigError("upper: unit-step walks need an integer upper barrier");
        upper = static_cast<long long>(u);
      }
      if (a.real("barrier") != 0.0) throw ConfigError("barrier: unit-step walks absorb at 0");
      as_config("p_up", [&] { walk = unit_step_walk(static_cast<long long>(start), upper, a.real("p_up")); });
      if (!a.has("horizon")) closed = gambler_ruin_closed_form(static_cast<long long>(start), upper, a.real("p_up"));
    } else if (a.has("step")) {
      walk.start = a.real("start");
      walk.step = a.distribution("step");
      walk.barrier = a.real("barrier");
      if (a.has("upper")) walk.upper_barrier = a.real("upper");
    } else {
      throw ConfigError("ruin needs --p and --n, --p-up, or --step");
    }
    if (a.has("horizon")) walk.horizon = a.integer("horizon");
    walk.max_steps = a.integer("max_steps");
    as_config("walk", [&] { walk.validate(); });
    rep = simulate_absorbing_walk(walk, reps, seed);
    mode = "walk";
  }
  res.body = rep;
  res.body["mode"] = mode;
  res.body["closed_form"] = closed ? json(*closed) : json(nullptr);
  res.table.header = {"ruin_probability", "ci95_lo", "ci95_hi", "replicates", "seed", "ruined", "closed_form"};
  res.table.rows.push_back({num(rep.ruin_probability), num(rep.ci95_lo), num(rep.ci95_hi), num(rep.replicates),
                            num(rep.seed), num(rep.ruined), closed ? num(*closed) : ""});
  return res;
}

// ---------------------------------------------------------------- tails

Result run_tails(const json& c) {
  const Args a(c);
  const auto seed = a.integer("seed");
  const auto reps = a.integer("replicates");
  const auto table = choice(a, "table", {"convolution", "sum_max", "max_to_sum"});
  if (a.has("dist") == a.has("input")) throw ConfigError("tails needs exactly one of --dist and --input");

  SampleSeries series;
  std::optional<DistributionSpec> spec;
  if (a.has("dist")) {
    spec = a.distribution("dist");
    series = sample(*spec, a.integer("n"), seed);
  } else {
    series.values = read_values(a.text("input"), "input");
    series.seed = seed;
  }
  const double order = a.real("moment_order");
  const auto eps = a.reals("epsilons");
  std::optional<std::size_t> hill_k;
  if (a.has("hill_k")) hill_k = a.integer("hill_k");

  TailDiagnosticsReport report;
  report.moment_order = order;
  report.max_to_sum_path = max_to_sum(series.values, order);
  report.hill = hill_estimator(series.values, hill_k);
  report.exp_moment_probe = exp_moment_probe(series.values, eps);
  if (spec) {
    std::vector<double> xs = a.has("xs") ? a.reals("xs")
                                         : std::vector<double>{quantile(*spec, 0.99), quantile(*spec, 0.999)};
    report.convolution_ratios = convolution_ratio(*spec, xs, reps, seed);
    report.sum_max_ratios = sum_max_ratio(*spec, a.small_int("sum_n"), xs, reps, seed);
  } else if (a.has("xs")) {
    report.convolution_ratios = convolution_ratio(series, a.reals("xs"), seed);
  } else {
    try {
      const double xs[] = {deepest_feasible_x(series, seed)};
      report.convolution_ratios = convolution_ratio(series, xs, seed);
    } catch (const InsufficientTailData&) {
    }
  }

  std::optional<std::string> ambiguity;
  try {
    report.tail_class = classify_tail(classification_inputs(report));
  } catch (const AmbiguousClassification& e) {
    ambiguity = e.what();
  }

  Result res;
  res.body = report;
  res.body["sample_size"] = series.values.size();
  res.body["classification_error"] = ambiguity ? json(*ambiguity) : json(nullptr);
  if (table == "convolution") {
    res.table.header = {"x", "ratio", "stderr"};
    for (const auto& p : report.convolution_ratios) res.table.rows.push_back({num(p.x), num(p.ratio), num(p.stderr_)});
  } else if (table == "sum_max") {
    res.table.header = {"n", "x", "ratio_a", "ratio_b"};
    for (const auto& p : report.sum_max_ratios) {
      res.table.rows.push_back({num(static_cast<std::uint64_t>(p.n)), num(p.x), num(p.ratio_a), num(p.ratio_b)});
    }
  } else {
    res.table.header = {"n", "r_np"};
    for (const auto& p : report.max_to_sum_path) res.table.rows.push_back({num(std::uint64_t{p.n}), num(p.r)});
  }
  return res;
}

// ---------------------------------------------------------------- sweep

Result run_sweep(const json& c) {
  const Args a(c);
  SweepConfig cfg;
  cfg.families = a.distributions("families");
  cfg.benefit = a.real("benefit");
  cfg.uncertainty_grid = a.reals("sigmas");
  cfg.ir_grid = a.reals("irs");
  cfg.ir_sigma = a.real("ir_sigma");
  cfg.barrier = a.real("barrier");
  cfg.horizon = a.integer("horizon");
  as_config("sweep", [&] { cfg.validate(); });
  const auto which = choice(a, "sweep", {"both", "scale", "ir"});

  SweepResult rows;
  if (which != "ir") rows = scale_sweep(cfg);
  if (which != "scale") {
    auto ir_rows = information_ratio_sweep(cfg);
    rows.insert(rows.end(), ir_rows.begin(), ir_rows.end());
  }
  Result res;
  res.body["rows"] = rows;
  res.body["skepticism"] = which != "ir" ? json(skepticism_report(cfg)) : json::array();
  res.table.header = {"family", "mu", "sigma", "ir", "k", "per_period_ruin", "horizon_ruin"};
  for (const auto& r : rows) {
    res.table.rows.push_back(
        {r.family, num(r.mu), num(r.sigma), num(r.ir), num(r.k), num(r.per_period_ruin), num(r.horizon_ruin)});
  }
  return res;
}

// ---------------------------------------------------------------- fragility

Result run_fragility(const json& c) {
  const Args a(c);
  HarmFunction harm = HarmFunction::power(1.0);
  as_config("harm", [&] { harm = HarmFunction::parse(a.text("harm")); });
  const auto spec = a.distribution("dist");
  const double sigma_lo = a.real("sigma_lo");
  const double sigma_hi = a.real("sigma_hi");
  const int resolution = a.small_int("resolution");

  Result res;
  auto& b = res.body;
  b["harm"] = harm.describe();
  const double probe_x = a.real("probe_x");
  const double probe_delta = a.real("probe_delta");
  const double convexity = convexity_probe(harm, probe_x, probe_delta);
  b["convexity"] = {{"x", probe_x}, {"delta", probe_delta}, {"value", convexity}};

  const double total = a.real("total");
  const auto pieces = static_cast<long long>(a.integer("pieces"));
  const auto conc = concentration_compare(harm, total, pieces);
  b["concentration"] = {
      {"total", total}, {"pieces", pieces}, {"concentrated", conc.concentrated}, {"distributed", conc.distributed}};

  DistributionSpec lo = spec, hi = spec;
  lo.scale = sigma_lo;
  hi.scale = sigma_hi;
  const double harm_lo = expected_harm(harm, lo, resolution);
  const double harm_hi = expected_harm(harm, hi, resolution);
  const double measure = fragility_measure(harm, spec, sigma_lo, sigma_hi, resolution);
  b["fragility"] = {{"dist", spec},
                    {"sigma_lo", sigma_lo},
                    {"sigma_hi", sigma_hi},
                    {"expected_harm_lo", harm_lo},
                    {"expected_harm_hi", harm_hi},
                    {"measure", measure}};

  std::optional<double> one_over_n;
  if (a.has("sources") || a.has("q")) {
    PortfolioSpec p;
    p.n = a.small_int("sources");
    p.q = a.real("q");
    const auto corr = choice(a, "correlation", {"independent", "common_shock"});
    p.correlation = corr == "independent" ? PortfolioSpec::Correlation::independent
                                          : PortfolioSpec::Correlation::common_shock;
    p.rho = a.real("rho");
    p.theta = a.real("theta");
    as_config("portfolio", [&] { p.validate(); });
    one_over_n = one_over_n_ruin(p);
    b["one_over_n"] = {{"sources", p.n},          {"q", p.q},         {"correlation", corr},
                       {"rho", p.rho},            {"theta", p.theta}, {"ruin_probability", *one_over_n}};
  } else {
    b["one_over_n"] = nullptr;
  }

  res.table.header = {"metric", "value"};
  res.table.rows = {{"convexity", num(convexity)},
                    {"concentrated", num(conc.concentrated)},
                    {"distributed", num(conc.distributed)},
                    {"expected_harm_lo", num(harm_lo)},
                    {"expected_harm_hi", num(harm_hi)},
                    {"fragility_measure", num(measure)}};
  if (one_over_n) res.table.rows.push_back({"one_over_n_ruin", num(*one_over_n)});
  return res;
}

// ---------------------------------------------------------------- cascade

Result run_cascade_cmd(const json& c) {
  const Args a(c);
  CascadeConfig cfg;
  const auto model = choice(a, "model", {"branching", "network"});
  cfg.model = model == "branching" ? CascadeModel::branching : CascadeModel::network;
  cfg.offspring_mean = a.real("m");
  cfg.node_cap = a.integer("node_cap");
  cfg.replicates = a.integer("replicates");
  cfg.seed = a.integer("seed");
  auto& net = cfg.network;
  net.nodes = a.integer("nodes");
  as_config("edges", [&] { net.edges = edge_model_from_string(a.text("edges")); });
  net.edge_probability = a.real("edge_probability");
  net.transmission = a.real("transmission");
  if (net.edges == EdgeModel::explicit_edges) net.edge_list = read_edges(a.text("edge_file"), "edge_file");
  const auto blocks = a.small_int("blocks");
  if (blocks < 1) throw ConfigError("blocks: must be at least 1");
  if (blocks > 1) as_config("blocks", [&] { net.partition = block_partition(net.nodes, blocks); });
  as_config("cascade", [&] { cfg.validate(); });

  const CascadeSample s = run_cascade(cfg);
  Result res;
  auto& b = res.body;
  double sum = 0.0;
  std::uint64_t largest = 0;
  for (auto v : s.sizes) {
    sum += static_cast<double>(v);
    largest = std::max(largest, v);
  }
  b["model"] = model;
  b["replicates"] = s.sizes.size();
  b["seed"] = s.seed;
  b["capped"] = s.capped;
  b["mean_size"] = s.sizes.empty() ? 0.0 : sum / static_cast<double>(s.sizes.size());
  b["max_size"] = largest;
  b["tail_report"] = nullptr;
  b["tail_report_error"] = nullptr;
  if (s.sizes.size() >= 1000) {
    try {
      b["tail_report"] = aggregate_tail_report(s);
    } catch (const Error& e) {
      b["tail_report_error"] = e.what();
    }
  } else {
    b["tail_report_error"] = "tail report needs at least 1000 cascades";
  }
  if (cfg.model == CascadeModel::network) b["largest_barrier_component"] = largest_barrier_component(net, cfg.seed);
  b["sizes"] = s.sizes;
  res.table.header = {"size"};
  for (auto v : s.sizes) res.table.rows.push_back({num(v)});
  return res;
}

// ---------------------------------------------------------------- compare

Result run_compare(const json& c) {
  const Args a(c);
  const auto seed = a.integer("seed");
  const auto procedure = choice(a, "procedure", {"difference", "two_test", "luck"});
  Result res;
  if (procedure == "difference") {
    auto values = [&](const char* file_key, const char* dist_key) {
      if (a.has(file_key) == a.has(dist_key)) {
        throw ConfigError(std::string(file_key) + ": give exactly one of " + flag_name(file_key) + " and " +
                          flag_name(dist_key));
      }
      if (a.has(file_key)) return read_values(a.text(file_key), file_key);
      return sample(a.distribution(dist_key), a.integer("n"), derive_key(seed, hash_label(file_key))).values;
    };
    const auto x = values("x", "x_dist");
    const auto y = values("y", "y_dist");
    const auto pairing = choice(a, "pairing", {"paired", "independent"});
    ComparisonReport rep;
    as_config("pairing", [&] {
      rep = difference_stats(x, y, pairing == "paired" ? PairingMode::paired : PairingMode::independent, seed);
    });
    res.body = rep;
    res.body["procedure"] = procedure;
    res.body["pairing"] = pairing;
    res.table.header = {"block", "mean", "variance", "cv"};
    for (const auto& [name, blk] : {std::pair{"correct", rep.correct}, std::pair{"naive", rep.naive}}) {
      res.table.rows.push_back({name, num(blk.mean), num(blk.variance), blk.cv ? num(*blk.cv) : ""});
    }
  } else if (procedure == "two_test") {
    const int n = a.small_int("n_per_group");
    const double alpha = a.real("alpha");
    double ex = a.real("effect_x");
    double ey = a.real("effect_y");
    if (a.has("power")) {
      as_config("power", [&] { ex = ey = effect_for_power(a.real("power"), n, alpha); });
    }
    TwoTestReport rep;
    as_config("two_test", [&] { rep = two_test_fallacy_sim(ex, ey, n, alpha, a.integer("replicates"), seed); });
    res.body = rep;
    res.body["procedure"] = procedure;
    res.table.header = {"effect_x", "effect_y", "incorrect_rate", "correct_rate", "power_x", "power_y"};
    res.table.rows.push_back({num(rep.effect_x), num(rep.effect_y), num(rep.incorrect_rate), num(rep.correct_rate),
                              num(rep.power_x), num(rep.power_y)});
  } else {
    LuckReport rep;
    as_config("p_luck", [&] {
      rep = luck_quadrant_sim(a.real("p_luck"), a.integer("replicates"), seed, a.real("luck_size"));
    });
    res.body = rep;
    res.body["procedure"] = procedure;
    res.table.header = {"outcome", "frequency", "mean_gap", "count"};
    for (const auto& q : rep.quadrants) {
      res.table.rows.push_back({q.name, num(q.frequency), num(q.mean_gap), num(q.count)});
    }
  }
  return res;
}

// ---------------------------------------------------------------- quadrant

Result run_quadrant(const json& c) {
  const Args a(c);
  const auto tail = a.text("tail");
  TailClass cls = TailClass::thin;
  if (tail == "fat") {
    cls = TailClass::subexponential;
  } else {
    as_config("tail", [&] { cls = tail_class_from_string(tail); });
  }
  Scope scope = Scope::local;
  as_config("scope", [&] { scope = scope_from_string(a.text("scope")); });
  const auto v = classify_quadrant(cls, scope);
  Result res;
  res.body = v;
  res.body["tail_class"] = tail == "fat" ? std::string("fat") : std::string(to_string(cls));
  res.table.header = {"quadrant", "tail_class", "scope", "pp_applies"};
  res.table.rows.push_back({std::string(to_string(v.quadrant)), res.body["tail_class"].get<std::string>(),
                            std::string(to_string(scope)), v.pp_applies ? "true" : "false"});
  return res;
}

json default_families() {
  return json::array({json(DistributionSpec::gaussian()), json(DistributionSpec::student_t(2.0)),
                      json(DistributionSpec::cauchy())});
}

std::vector<Command> commands() {
  const json none = nullptr;
  return {
      {"ruin",
       "Ruin probability of repeated exposures or of an absorbing random walk",
       10000,
       {{"p", Kind::real, none, "Per-exposure ruin probability"},
        {"n", Kind::integer, none, "Number of exposures"},
        {"start", Kind::real, 5.0, "Starting wealth of the walk"},
        {"step", Kind::distribution, none, "Step distribution, e.g. gaussian:loc=0.1:scale=1"},
        {"p_up", Kind::real, none, "Up-step probability of a unit-step walk"},
        {"barrier", Kind::real, 0.0, "Absorbing lower barrier"},
        {"upper", Kind::real, none, "Upper exit barrier"},
        {"horizon", Kind::integer, none, "Step horizon (unbounded when absent)"},
        {"max_steps", Kind::integer, 1000000, "Step cap for unbounded horizons"}},
       run_ruin},
      {"tails",
       "Tail diagnostics and classification for a distribution or a sample file",
       1000000,
       {{"dist", Kind::distribution, none, "Distribution to analyse"},
        {"input", Kind::text, none, "Sample file, one value per line"},
        {"n", Kind::integer, 100000, "Sample size drawn from --dist"},
        {"xs", Kind::real_list, none, "Thresholds for the ratio diagnostics"},
        {"sum_n", Kind::integer, 10, "Number of summands for the sum/max ratios"},
        {"moment_order", Kind::real, 1.0, "Order p of the max-to-sum ratio"},
        {"hill_k", Kind::integer, none, "Hill order statistics (default n^0.6)"},
        {"epsilons", Kind::real_list, json::array({0.1, 0.5, 1.0}), "Exponential-moment probe rates"},
        {"table", Kind::text, "max_to_sum", "CSV table: convolution, sum_max or max_to_sum"}},
       run_tails},
      {"sweep",
       "Per-period and horizon ruin across scale and information-ratio grids",
       none,
       {{"families", Kind::distribution_list, default_families(), "Family templates"},
        {"benefit", Kind::real, 1.0, "Expected benefit mu for the scale sweep"},
        {"sigmas", Kind::real_list, json::array({0.5, 1.0, 2.0, 4.0}), "Scale grid"},
        {"irs", Kind::real_list, json::array({0.0, 0.5, 1.0, 2.0, 5.0, 10.0}), "Information-ratio grid"},
        {"ir_sigma", Kind::real, 1.0, "Scale used by the information-ratio sweep"},
        {"barrier", Kind::real, 10.0, "Single-period ruin barrier K"},
        {"horizon", Kind::integer, 1000, "Periods for the horizon ruin"},
        {"sweep", Kind::text, "both", "scale, ir or both"}},
       run_sweep},
      {"fragility",
       "Convexity, concentration and fragility of a harm function",
       none,
       {{"harm", Kind::text, "power:2", "power:p, linear:a, threshold:t or table:path"},
        {"dist", Kind::distribution, json(DistributionSpec::gaussian()), "Stressor distribution"},
        {"sigma_lo", Kind::real, 1.0, "Baseline scale"},
        {"sigma_hi", Kind::real, 2.0, "Spread scale"},
        {"resolution", Kind::integer, 200, "Quadrature panels per segment"},
        {"probe_x", Kind::real, 1.0, "Convexity probe point"},
        {"probe_delta", Kind::real, 0.5, "Convexity probe half-width"},
        {"total", Kind::real, 10.0, "Total stressor for the concentration comparison"},
        {"pieces", Kind::integer, 10, "Number of pieces for the concentration comparison"},
        {"sources", Kind::integer, none, "Sources in the 1/n portfolio"},
        {"q", Kind::real, none, "Per-source failure probability"},
        {"correlation", Kind::text, "independent", "independent or common_shock"},
        {"rho", Kind::real, 0.0, "Common-shock probability"},
        {"theta", Kind::real, 1.0, "Failed fraction that constitutes ruin"}},
       run_fragility},
      {"cascade",
       "Branching or network cascade sizes and their tail report",
       10000,
       {{"model", Kind::text, "branching", "branching or network"},
        {"m", Kind::real, 0.5, "Mean Poisson offspring"},
        {"node_cap", Kind::integer, 10000000, "Branching size cap"},
        {"nodes", Kind::integer, 100, "Network nodes"},
        {"edges", Kind::text, "ring", "ring, lattice, complete, random or explicit"},
        {"edge_probability", Kind::real, 0.05, "Edge probability of random graphs"},
        {"edge_file", Kind::text, none, "CSV of u,v edges for explicit graphs"},
        {"transmission", Kind::real, 0.5, "Per-edge transmission probability"},
        {"blocks", Kind::integer, 1, "Equal partitions separated by barriers"}},
       run_cascade_cmd},
      {"compare",
       "Differences of random variables and the two-separate-tests error",
       100000,
       {{"procedure", Kind::text, "difference", "difference, two_test or luck"},
        {"x", Kind::text, none, "Sample file for X"},
        {"y", Kind::text, none, "Sample file for Y"},
        {"x_dist", Kind::distribution, none, "Distribution for X"},
        {"y_dist", Kind::distribution, none, "Distribution for Y"},
        {"n", Kind::integer, 10000, "Sample size drawn from --x-dist / --y-dist"},
        {"pairing", Kind::text, "paired", "paired or independent"},
        {"effect_x", Kind::real, 0.0, "True effect of experiment X"},
        {"effect_y", Kind::real, 0.0, "True effect of experiment Y"},
        {"power", Kind::real, none, "Set both effects to give this per-test power"},
        {"n_per_group", Kind::integer, 50, "Observations per group"},
        {"alpha", Kind::real, 0.05, "Test level"},
        {"p_luck", Kind::real, 0.5, "Probability of being lucky"},
        {"luck_size", Kind::real, 1.0, "Outcome shift from luck"}},
       run_compare},
      {"quadrant",
       "Tail class and exposure scope to decision quadrant",
       none,
       {{"tail", Kind::text, none, "thin, subexp, inf-var, inf-mean or fat"},
        {"scope", Kind::text, none, "local or systemic"}},
       run_quadrant},
  };
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON");
  }
}

void emit(const json& echo, const Result& result, const std::string& format, std::ostream& out) {
  if (format == "json") {
    ojson top;
    top["config"] = ojson::parse(echo.dump());
    for (const auto& [key, value] : result.body.items()) top[key] = ojson::parse(value.dump());
    out << top.dump(2) << '\n';
    return;
  }
  out << "# ruinkit config: " << echo.dump() << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(result.table.header);
  for (const auto& row : result.table.rows) line(row);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  CLI::App app{"ruinkit: ruin problems under thin and fat tails", "ruinkit"};
  app.fallthrough();
  app.require_subcommand(1);

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> global_opts;
  const std::vector<Param> globals = {
      {"seed", Kind::integer, 0, "Root seed"},
      {"replicates", Kind::integer, nullptr, "Monte Carlo replicates"},
      {"format", Kind::text, "json", "json or csv"},
      {"output", Kind::text, "-", "Output path, - for standard output"},
      {"threads", Kind::integer, 0, "Worker threads, 0 for all cores"},
  };
  for (const auto& p : globals) global_opts[p.name] = app.add_option(flag_name(p.name), raw["g." + p.name], p.help)->type_name(type_name(p.kind));
  std::string config_path;
  auto* config_opt =
      app.add_option("--config", config_path, "JSON file of parameters; flags take precedence")->type_name("PATH");

  std::vector<std::pair<CLI::App*, std::map<std::string, CLI::Option*>>> subs;
  for (const auto& cmd : cmds) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    std::map<std::string, CLI::Option*> opts;
    for (const auto& p : cmd.params) opts[p.name] = sub->add_option(flag_name(p.name), raw[cmd.name + "." + p.name], p.help)->type_name(type_name(p.kind));
    subs.emplace_back(sub, std::move(opts));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  }

  std::size_t chosen = 0;
  while (!subs[chosen].first->parsed()) ++chosen;
  const Command& cmd = cmds[chosen];
  const auto& sub_opts = subs[chosen].second;

  json resolved = json::object();
  std::vector<Param> all = globals;
  all[1].fallback = cmd.replicates;
  all.insert(all.end(), cmd.params.begin(), cmd.params.end());
  for (const auto& p : all) resolved[p.name] = p.fallback;

  if (config_opt->count() > 0) {
    const json file = load_config_file(config_path);
    if (!file.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (key == "subcommand") {
        if (value != cmd.name) throw ConfigError("subcommand: config is for '" + value.dump() + "'");
        continue;
      }
      auto it = std::find_if(all.begin(), all.end(), [&](const Param& p) { return p.name == key; });
      if (it == all.end()) throw ConfigError("config: unknown key '" + key + "' for " + cmd.name);
      resolved[key] = from_config(*it, value);
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Param& p = all[i];
    const bool global = i < globals.size();
    CLI::Option* opt = global ? global_opts.at(p.name) : sub_opts.at(p.name);
    if (opt->count() > 0) resolved[p.name] = from_flag(p, raw[(global ? "g." : cmd.name + ".") + p.name]);
  }
  if (cmd.replicates.is_null() && !resolved["replicates"].is_null()) {
    throw ConfigError("replicates: " + cmd.name + " draws no random numbers");
  }
  const auto format = resolved["format"].get<std::string>();
  if (format != "json" && format != "csv") throw ConfigError("format: expected json or csv, got '" + format + "'");
  const auto output = resolved["output"].get<std::string>();
  const auto threads = resolved["threads"].get<std::uint64_t>();
  if (threads > 4096) throw ConfigError("threads: value too large");

  // The echo omits settings that cannot change the numbers.
  json echo = resolved;
  echo.erase("output");
  echo.erase("threads");
  echo["subcommand"] = cmd.name;

  set_default_threads(static_cast<unsigned>(threads));
  const Result result = cmd.handler(resolved);

  if (output == "-") {
    emit(echo, result, format, out);
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) throw ConfigError("output: cannot write '" + output + "'");
    emit(echo, result, format, file);
  }
  return 0;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

DistributionSpec parse_distribution_spec(const std::string& text) {
  return parse_distribution(text, "distribution").get<DistributionSpec>();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const CLI::ParseError& e) {
    err << "ruinkit: error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "ruinkit: error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "ruinkit: " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace ruinkit::cli
