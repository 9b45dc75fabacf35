#include "ruinkit/serialize.hpp"

#include "ruinkit/errors.hpp"

#include <algorithm>

namespace ruinkit {

using nlohmann::json;

namespace {

double number_at(const json& j, const char* key, std::string_view context) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string(context) + "." + key + " must be a number");
  return v.get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(context));
    }
  }
}

void to_json(json& j, const DistributionSpec& s) {
  j = json{{"family", to_string(s.family)}, {"loc", s.location}, {"scale", s.scale}};
  if (s.family == Family::pareto || s.family == Family::student_t) j["alpha"] = s.tail_index;
  if (s.family == Family::pareto) j["xmin"] = s.support_min;
  if (s.family == Family::bernoulli) j["p"] = s.prob;
}

void from_json(const json& j, DistributionSpec& s) {
  reject_unknown_keys(j, {"family", "loc", "scale", "alpha", "xmin", "p"}, "distribution");
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("distribution.family must be a string");
  DistributionSpec out;
  try {
    out.family = family_from_string(j["family"].get<std::string>());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (out.family == Family::cauchy) out.tail_index = 1.0;
  if (j.contains("loc")) out.location = number_at(j, "loc", "distribution");
  if (j.contains("scale")) out.scale = number_at(j, "scale", "distribution");
  if (j.contains("alpha")) out.tail_index = number_at(j, "alpha", "distribution");
  if (j.contains("xmin")) out.support_min = number_at(j, "xmin", "distribution");
  if (j.contains("p")) out.prob = number_at(j, "p", "distribution");
  if (out.family == Family::cauchy && out.tail_index != 1.0) throw ConfigError("cauchy has alpha fixed at 1");
  s = out;
}

void to_json(json& j, const RuinReport& r) {
  json bins = json::array();
  for (const auto& b : r.time_to_ruin) bins.push_back({{"bin_lo", b.lo}, {"bin_hi", b.hi}, {"count", b.count}});
  j = json{{"ruin_probability", r.ruin_probability},
           {"ci95", {r.ci95_lo, r.ci95_hi}},
           {"replicates", r.replicates},
           {"seed", r.seed},
           {"ruined", r.ruined},
           {"exited_upper", r.exited_upper},
           {"surviving_at_cap", r.surviving_at_cap},
           {"time_to_ruin", bins}};
}

void to_json(json& j, const TailDiagnosticsReport& r) {
  json conv = json::array();
  for (const auto& p : r.convolution_ratios) {
    conv.push_back({{"x", p.x}, {"ratio", p.ratio}, {"stderr", p.stderr_}, {"exceedances", p.exceedances}});
  }
  json sum_max = json::array();
  for (const auto& p : r.sum_max_ratios) {
    sum_max.push_back({{"n", p.n},
                       {"x", p.x},
                       {"ratio_a", p.ratio_a},
                       {"stderr_a", p.stderr_a},
                       {"ratio_b", p.ratio_b},
                       {"stderr_b", p.stderr_b},
                       {"exceedances", p.exceedances}});
  }
  json path = json::array();
  for (const auto& p : r.max_to_sum_path) path.push_back({{"n", p.n}, {"r_np", p.r}});
  json probe = json::array();
  for (const auto& p : r.exp_moment_probe) {
    probe.push_back({{"epsilon", p.epsilon}, {"verdict", to_string(p.verdict)}, {"mean", p.mean}});
  }
  j = json{{"convolution_ratios", conv},
           {"sum_max_ratios", sum_max},
           {"moment_order", r.moment_order},
           {"max_to_sum_path", path},
           {"exp_moment_probe", probe},
           {"hill_alpha", r.hill ? json(r.hill->alpha) : json(nullptr)},
           {"hill_stderr", r.hill ? json(r.hill->stderr_) : json(nullptr)},
           {"hill_k", r.hill ? json(r.hill->k) : json(nullptr)},
           {"tail_class", r.tail_class ? json(to_string(*r.tail_class)) : json(nullptr)},
           {"subexponential_band", {r.band_low, r.band_high}}};
}

void to_json(json& j, const QuadrantVerdict& v) {
  j = json{{"quadrant", to_string(v.quadrant)},
           {"tail_class", to_string(v.tail_class)},
           {"scope", to_string(v.scope)},
           {"pp_applies", v.pp_applies}};
}

void to_json(json& j, const SweepRow& r) {
  j = json{{"family", r.family}, {"mu", r.mu},   {"sigma", r.sigma},
           {"ir", r.ir},         {"k", r.k},     {"per_period_ruin", r.per_period_ruin},
           {"horizon_ruin", r.horizon_ruin}};
}

void to_json(json& j, const SkepticismEntry& e) {
  j = json{{"family", e.family},
           {"sigma_lo", e.sigma_lo},
           {"sigma_hi", e.sigma_hi},
           {"per_period_lo", e.per_period_lo},
           {"per_period_hi", e.per_period_hi},
           {"horizon_lo", e.horizon_lo},
           {"horizon_hi", e.horizon_hi},
           {"per_period_ratio", e.per_period_ratio},
           {"horizon_ratio", e.horizon_ratio}};
}

void to_json(json& j, const ComparisonReport& r) {
  auto block = [](const MomentBlock& b) {
    return json{{"mean", b.mean}, {"variance", b.variance}, {"cv", optional_number(b.cv)}};
  };
  j = json{{"correct", block(r.correct)},
           {"naive", block(r.naive)},
           {"pairs", r.pairs},
           {"flags",
            {{"cv_undefined", r.cv_undefined},
             {"naive_variance_negative", r.naive_variance_negative},
             {"variance_mismatch", r.variance_mismatch},
             {"cv_mismatch", r.cv_mismatch}}}};
}

void to_json(json& j, const TwoTestReport& r) {
  j = json{{"effect_x", r.effect_x},         {"effect_y", r.effect_y},
           {"n_per_group", r.n_per_group},   {"alpha", r.alpha},
           {"replicates", r.replicates},     {"seed", r.seed},
           {"incorrect_rate", r.incorrect_rate}, {"correct_rate", r.correct_rate},
           {"power_x", r.power_x},           {"power_y", r.power_y}};
}

void to_json(json& j, const LuckReport& r) {
  json quads = json::array();
  for (const auto& q : r.quadrants) {
    quads.push_back({{"outcome", q.name}, {"frequency", q.frequency}, {"mean_gap", q.mean_gap}, {"count", q.count}});
  }
  j = json{{"p_luck", r.p_luck}, {"replicates", r.replicates}, {"seed", r.seed}, {"quadrants", quads}};
}

}  // namespace ruinkit
