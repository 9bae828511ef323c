#include "ibvs/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "ibvs/errors.hpp"
#include "ibvs/io.hpp"

namespace ibvs {

namespace {

using nlohmann::json;

json interval_to_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

Interval interval_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(key + " must be a [lo, hi] pair");
  }
  Interval iv{j[0].get<double>(), j[1].get<double>()};
  if (!iv.valid()) {
    throw ConfigError(key + " must satisfy lo < hi");
  }
  return iv;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& scope) {
  for (const auto& item : j.items()) {
    if (known.find(item.key()) == known.end()) {
      throw ConfigError("unknown config key " + scope + "." + item.key());
    }
  }
}

template <typename T>
void read_number(const json& j, const char* key, T& out,
                 const std::string& scope) {
  if (!j.contains(key)) return;
  if (!j[key].is_number()) {
    throw ConfigError(scope + "." + key + " must be a number");
  }
  out = j[key].get<T>();
}

void read_count(const json& j, const char* key, std::size_t& out,
                const std::string& scope, std::size_t max_value) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer() ||
      (j[key].is_number_integer() && !j[key].is_number_unsigned() &&
       j[key].get<long long>() < 0)) {
    throw ConfigError(scope + "." + key + " must be a non-negative integer");
  }
  const auto v = j[key].get<std::uint64_t>();
  if (v > max_value) {
    throw ConfigError(scope + "." + key + " exceeds the supported maximum " +
                      std::to_string(max_value));
  }
  out = static_cast<std::size_t>(v);
}

}  // namespace

void PipelineConfig::validate() const {
  if (!roi.valid()) throw ConfigError("roi intervals must satisfy lo < hi with cz > 0");
  if (!(search.eta > 0.0)) throw ConfigError("search.eta must be > 0");
  if (!search.valid()) throw ConfigError("invalid search config");
  if (!train.valid()) throw ConfigError("train.epochs, batch_size, learning_rate must be positive and holdout_fraction in [0,1)");
  if (!grid.valid()) throw ConfigError("grid counts must be >= 2 with valid ranges");
  if (grid.total() > 10'000'000) {
    throw ConfigError("grid resolution exceeds 10M points");
  }
  if (!(violation_threshold >= 0.0 && violation_threshold <= 1.0)) {
    throw ConfigError("violation_threshold must be in [0,1]");
  }
  if (!sim.valid()) throw ConfigError("sim requires dt, t_max, cz_stop, vz > 0 and vz*dt < cz_stop");
  if (!(max_infeasible_fraction >= 0.0 && max_infeasible_fraction <= 1.0)) {
    throw ConfigError("max_infeasible_fraction must be in [0,1]");
  }
  if (initial_states.empty()) throw ConfigError("at least one initial state required");
  for (const SimState& s : initial_states) {
    if (!(s.cz > sim.cz_stop)) {
      throw ConfigError("initial states must start beyond cz_stop");
    }
  }
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["roi"] = {{"px", interval_to_json(cfg.roi.px)},
              {"py", interval_to_json(cfg.roi.py)},
              {"wy", interval_to_json(cfg.roi.wy)},
              {"vz", interval_to_json(cfg.roi.vz)},
              {"cz", interval_to_json(cfg.roi.cz)}};
  j["search"] = {
      {"eta", cfg.search.eta},
      {"input_bounds", interval_to_json(cfg.search.input_bounds)},
      {"tolerance", cfg.search.tolerance},
      {"scheme", cfg.search.scheme == SearchScheme::closed_form ? "closed_form"
                                                                : "numeric"},
      {"samples_per_axis", cfg.samples_per_axis},
      {"sampling", cfg.sampling == SamplingScheme::uniform_random
                       ? "uniform_random"
                       : "grid"},
      {"max_infeasible_fraction", cfg.max_infeasible_fraction}};
  j["train"] = {{"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"learning_rate", cfg.train.learning_rate},
                {"optimizer",
                 cfg.train.optimizer == Optimizer::adam ? "adam" : "sgd"},
                {"shuffle", cfg.train.shuffle},
                {"holdout_fraction", cfg.train.holdout_fraction}};
  j["grid"] = {{"vz", cfg.grid.vz},
               {"wy", cfg.grid.wy},
               {"p_other", cfg.grid.p_other},
               {"p", interval_to_json(cfg.grid.p)},
               {"cz", interval_to_json(cfg.grid.cz)},
               {"p_count", cfg.grid.p_count},
               {"cz_count", cfg.grid.cz_count},
               {"violation_threshold", cfg.violation_threshold}};
  json states = json::array();
  for (const SimState& s : cfg.initial_states) {
    states.push_back(json::array({s.cz, s.px, s.py}));
  }
  j["sim"] = {{"dt", cfg.sim.dt},
              {"t_max", cfg.sim.t_max},
              {"vz", cfg.sim.vz},
              {"cz_stop", cfg.sim.cz_stop},
              {"distance_mode", cfg.sim.distance_mode == DistanceMode::true_cz
                                    ? "true_cz"
                                    : "fabricated"},
              {"cz_fixed", cfg.sim.cz_fixed},
              {"yaw_mode",
               cfg.sim.yaw_mode == YawMode::zero ? "zero" : "proportional"},
              {"yaw_gain", cfg.sim.yaw_gain},
              {"integrator", cfg.sim.integrator == IntegratorKind::rk4
                                 ? "rk4"
                                 : "euler"},
              {"initial_states", states}};
  return j.dump(1) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("config is not valid JSON");
  }
  PipelineConfig cfg;
  reject_unknown_keys(j, {"seed", "out_dir", "roi", "search", "train", "grid", "sim"},
                      "");

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() ||
        (!j["seed"].is_number_unsigned() && j["seed"].get<long long>() < 0)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("out_dir must be a string");
    cfg.out_dir = j["out_dir"].get<std::string>();
  }

  if (j.contains("roi")) {
    const json& r = j["roi"];
    reject_unknown_keys(r, {"px", "py", "wy", "vz", "cz"}, "roi");
    if (r.contains("px")) cfg.roi.px = interval_from_json(r["px"], "roi.px");
    if (r.contains("py")) cfg.roi.py = interval_from_json(r["py"], "roi.py");
    if (r.contains("wy")) cfg.roi.wy = interval_from_json(r["wy"], "roi.wy");
    if (r.contains("vz")) cfg.roi.vz = interval_from_json(r["vz"], "roi.vz");
    if (r.contains("cz")) cfg.roi.cz = interval_from_json(r["cz"], "roi.cz");
  }

  if (j.contains("search")) {
    const json& s = j["search"];
    reject_unknown_keys(s,
                        {"eta", "input_bounds", "tolerance", "scheme",
                         "samples_per_axis", "sampling",
                         "max_infeasible_fraction"},
                        "search");
    read_number(s, "eta", cfg.search.eta, "search");
    if (s.contains("input_bounds")) {
      cfg.search.input_bounds =
          interval_from_json(s["input_bounds"], "search.input_bounds");
    }
    read_number(s, "tolerance", cfg.search.tolerance, "search");
    if (s.contains("scheme")) {
      const std::string scheme = s["scheme"].get<std::string>();
      if (scheme == "closed_form") {
        cfg.search.scheme = SearchScheme::closed_form;
      } else if (scheme == "numeric") {
        cfg.search.scheme = SearchScheme::numeric;
      } else {
        throw ConfigError("search.scheme must be closed_form or numeric");
      }
    }
    read_count(s, "samples_per_axis", cfg.samples_per_axis, "search",
               50'000'000);
    if (s.contains("sampling")) {
      const std::string sampling = s["sampling"].get<std::string>();
      if (sampling == "uniform_random") {
        cfg.sampling = SamplingScheme::uniform_random;
      } else if (sampling == "grid") {
        cfg.sampling = SamplingScheme::grid;
      } else {
        throw ConfigError("search.sampling must be uniform_random or grid");
      }
    }
    read_number(s, "max_infeasible_fraction", cfg.max_infeasible_fraction,
                "search");
  }

  if (j.contains("train")) {
    const json& t = j["train"];
    reject_unknown_keys(t,
                        {"epochs", "batch_size", "learning_rate", "optimizer",
                         "shuffle", "holdout_fraction"},
                        "train");
    read_number(t, "epochs", cfg.train.epochs, "train");
    read_number(t, "batch_size", cfg.train.batch_size, "train");
    read_number(t, "learning_rate", cfg.train.learning_rate, "train");
    if (t.contains("optimizer")) {
      const std::string opt = t["optimizer"].get<std::string>();
      if (opt == "adam") {
        cfg.train.optimizer = Optimizer::adam;
      } else if (opt == "sgd") {
        cfg.train.optimizer = Optimizer::sgd;
      } else {
        throw ConfigError("train.optimizer must be adam or sgd");
      }
    }
    if (t.contains("shuffle")) {
      if (!t["shuffle"].is_boolean()) throw ConfigError("train.shuffle must be a bool");
      cfg.train.shuffle = t["shuffle"].get<bool>();
    }
    read_number(t, "holdout_fraction", cfg.train.holdout_fraction, "train");
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown_keys(g,
                        {"vz", "wy", "p_other", "p", "cz", "p_count",
                         "cz_count", "violation_threshold"},
                        "grid");
    read_number(g, "vz", cfg.grid.vz, "grid");
    read_number(g, "wy", cfg.grid.wy, "grid");
    read_number(g, "p_other", cfg.grid.p_other, "grid");
    if (g.contains("p")) cfg.grid.p = interval_from_json(g["p"], "grid.p");
    if (g.contains("cz")) cfg.grid.cz = interval_from_json(g["cz"], "grid.cz");
    read_number(g, "p_count", cfg.grid.p_count, "grid");
    read_number(g, "cz_count", cfg.grid.cz_count, "grid");
    read_number(g, "violation_threshold", cfg.violation_threshold, "grid");
  }

  if (j.contains("sim")) {
    const json& s = j["sim"];
    reject_unknown_keys(s,
                        {"dt", "t_max", "vz", "cz_stop", "distance_mode",
                         "cz_fixed", "yaw_mode", "yaw_gain", "integrator",
                         "initial_states"},
                        "sim");
    read_number(s, "dt", cfg.sim.dt, "sim");
    read_number(s, "t_max", cfg.sim.t_max, "sim");
    read_number(s, "vz", cfg.sim.vz, "sim");
    read_number(s, "cz_stop", cfg.sim.cz_stop, "sim");
    if (s.contains("distance_mode")) {
      const std::string mode = s["distance_mode"].get<std::string>();
      if (mode == "true_cz") {
        cfg.sim.distance_mode = DistanceMode::true_cz;
      } else if (mode == "fabricated") {
        cfg.sim.distance_mode = DistanceMode::fabricated;
      } else {
        throw ConfigError("sim.distance_mode must be true_cz or fabricated");
      }
    }
    read_number(s, "cz_fixed", cfg.sim.cz_fixed, "sim");
    if (s.contains("yaw_mode")) {
      const std::string mode = s["yaw_mode"].get<std::string>();
      if (mode == "zero") {
        cfg.sim.yaw_mode = YawMode::zero;
      } else if (mode == "proportional") {
        cfg.sim.yaw_mode = YawMode::proportional;
      } else {
        throw ConfigError("sim.yaw_mode must be zero or proportional");
      }
    }
    read_number(s, "yaw_gain", cfg.sim.yaw_gain, "sim");
    if (s.contains("integrator")) {
      const std::string kind = s["integrator"].get<std::string>();
      if (kind == "rk4") {
        cfg.sim.integrator = IntegratorKind::rk4;
      } else if (kind == "euler") {
        cfg.sim.integrator = IntegratorKind::euler;
      } else {
        throw ConfigError("sim.integrator must be rk4 or euler");
      }
    }
    if (s.contains("initial_states")) {
      if (!s["initial_states"].is_array() || s["initial_states"].empty()) {
        throw ConfigError("sim.initial_states must be a non-empty array");
      }
      cfg.initial_states.clear();
      for (const json& st : s["initial_states"]) {
        if (!st.is_array() || st.size() != 3) {
          throw ConfigError("each initial state must be [cz, px, py]");
        }
        cfg.initial_states.push_back(
            {st[0].get<double>(), st[1].get<double>(), st[2].get<double>()});
      }
    }
  }

  cfg.validate();
  return cfg;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("cannot read config: ") + e.what());
  }
  return config_from_json(text);
}

}  // namespace ibvs
