#include <fmt/format.h>

#include "scenario_json.hpp"

namespace sam {

namespace {

using nlohmann::json;

NoiseModel parse_noise(const json& j, NoiseModel base) {
  base.hr_sigma = detail::value_or(j, "hr_sigma", base.hr_sigma, "noise");
  base.ops_sigma = detail::value_or(j, "ops_sigma", base.ops_sigma, "noise");
  base.seed = detail::value_or<std::uint64_t>(j, "seed", base.seed, "noise");
  return base;
}

HitRateCurve parse_curve(const json& j, const std::string& path) {
  HitRateCurve c;
  c.kind = curve_kind_from_string(detail::required<std::string>(j, "kind", path));
  c.h_max = detail::value_or(j, "h_max", c.h_max, path);
  c.scale = detail::value_or(j, "scale", c.scale, path);
  c.midpoint = detail::value_or(j, "midpoint", c.midpoint, path);
  c.floor = detail::value_or(j, "floor", c.floor, path);
  return c;
}

Scenario parse_custom(const json& doc) {
  Scenario s;
  s.name = detail::value_or<std::string>(doc, "name", "custom", "scenario");
  const json& pool = doc.at("pool");
  s.pool.total_pages = detail::required<Pages>(pool, "total_pages", "pool");
  s.pool.fixed_pages = detail::value_or<Pages>(pool, "fixed_pages", 0, "pool");

  const json& tenants = doc.at("tenants");
  if (!tenants.is_array() || tenants.empty()) throw ConfigError("scenario.tenants must be a non-empty array");
  bool any_burst = false;
  for (std::size_t i = 0; i < tenants.size(); ++i) {
    const json& t = tenants[i];
    const std::string path = fmt::format("tenants[{}]", i);
    s.env.curves.push_back(parse_curve(t.at("curve"), path + ".curve"));
    s.env.schedule.base_ops.push_back(detail::value_or(t, "base_ops", 0.0, path));
    s.pool.base_priority.push_back(detail::value_or(t, "priority", 1.0, path));
    s.pool.lower_bound.push_back(detail::value_or<Pages>(t, "lower_bound", 0, path));
    TenantProfile prof;
    prof.name = detail::value_or<std::string>(t, "name", fmt::format("tenant_{}", i), path);
    prof.data_size = detail::value_or(t, "data_size", prof.data_size, path);
    prof.sla_hit_rate = detail::value_or(t, "sla_hit_rate", prof.sla_hit_rate, path);
    s.profiles.push_back(prof);
    if (t.contains("burst")) {
      const json& b = t.at("burst");
      BurstPattern bp;
      bp.start = detail::value_or(b, "start", bp.start, path + ".burst");
      bp.end = detail::value_or(b, "end", bp.end, path + ".burst");
      bp.on = detail::value_or(b, "on", bp.on, path + ".burst");
      bp.off = detail::value_or(b, "off", bp.off, path + ".burst");
      bp.amplitude = detail::value_or(b, "amplitude", bp.amplitude, path + ".burst");
      s.env.schedule.bursts.resize(tenants.size());
      s.env.schedule.bursts[i] = bp;
      any_burst = true;
    }
  }
  if (any_burst) s.env.schedule.bursts.resize(tenants.size());

  const json& phases = doc.at("phases");
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const std::string path = fmt::format("phases[{}]", k);
    Phase p;
    p.duration = detail::required<std::int64_t>(phases[k], "duration", path);
    p.multiplier = detail::value_or(phases[k], "multipliers", std::vector<double>(tenants.size(), 1.0), path);
    s.env.schedule.phases.push_back(std::move(p));
  }
  if (doc.contains("noise")) s.env.noise = parse_noise(doc.at("noise"), s.env.noise);
  if (doc.contains("latency")) {
    s.env.hit_latency_ms = detail::value_or(doc.at("latency"), "hit_ms", s.env.hit_latency_ms, "latency");
    s.env.miss_latency_ms = detail::value_or(doc.at("latency"), "miss_ms", s.env.miss_latency_ms, "latency");
  }
  s.check();
  return s;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario document must be an object");
  try {
    if (doc.contains("scenario")) {
      ScenarioOptions opt;
      if (doc.contains("tenants")) opt.tenants = detail::required<std::size_t>(doc, "tenants", "scenario");
      if (doc.contains("cycles")) opt.cycles = detail::required<std::int64_t>(doc, "cycles", "scenario");
      const auto name = detail::required<std::string>(doc, "scenario", "scenario");
      Scenario s = make_scenario(name, opt);
      if (doc.contains("noise")) s.env.noise = parse_noise(doc.at("noise"), s.env.noise);
      return s;
    }
    return parse_custom(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["pool"] = {{"total_pages", s.pool.total_pages}, {"fixed_pages", s.pool.fixed_pages}};
  json tenants = json::array();
  for (std::size_t i = 0; i < s.tenants(); ++i) {
    const auto& c = s.env.curves[i];
    json t;
    t["name"] = i < s.profiles.size() ? s.profiles[i].name : fmt::format("tenant_{}", i);
    t["curve"] = {{"kind", std::string(to_string(c.kind))},
                  {"h_max", c.h_max},
                  {"scale", c.scale},
                  {"midpoint", c.midpoint},
                  {"floor", c.floor}};
    t["base_ops"] = s.env.schedule.base_ops[i];
    t["priority"] = s.pool.base_priority[i];
    t["lower_bound"] = s.pool.lower_bound[i];
    if (i < s.profiles.size()) {
      t["data_size"] = s.profiles[i].data_size;
      t["sla_hit_rate"] = s.profiles[i].sla_hit_rate;
    }
    if (i < s.env.schedule.bursts.size() && s.env.schedule.bursts[i]) {
      const auto& b = *s.env.schedule.bursts[i];
      t["burst"] = {{"start", b.start}, {"end", b.end}, {"on", b.on}, {"off", b.off}, {"amplitude", b.amplitude}};
    }
    tenants.push_back(std::move(t));
  }
  doc["tenants"] = std::move(tenants);
  json phases = json::array();
  for (const auto& p : s.env.schedule.phases) phases.push_back({{"duration", p.duration}, {"multipliers", p.multiplier}});
  doc["phases"] = std::move(phases);
  doc["noise"] = {{"hr_sigma", s.env.noise.hr_sigma}, {"ops_sigma", s.env.noise.ops_sigma}, {"seed", s.env.noise.seed}};
  doc["latency"] = {{"hit_ms", s.env.hit_latency_ms}, {"miss_ms", s.env.miss_latency_ms}};
  return doc;
}

Scenario parse_scenario(std::string_view json_text) {
  return scenario_from_json(detail::parse_json(json_text, "scenario"));
}

std::string dump_scenario(const Scenario& scenario) { return scenario_to_json(scenario).dump(); }

}  // namespace sam
