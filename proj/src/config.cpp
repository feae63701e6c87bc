#include "regiolex/config.hpp"

#include <fstream>
#include <set>

namespace regiolex {

using nlohmann::json;

void RunConfig::validate() const {
  if (metrics.empty()) throw ConfigError("metric list is empty");
  if (fractions.empty()) throw ConfigError("fraction list is empty");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep fractions must lie in (0, 1]");
  }
  if (!(log_base == 0.0 || (log_base > 0.0 && log_base != 1.0))) {
    throw ConfigError("log_base must be 0 (natural) or a positive number other than 1");
  }
  if (train_users == 0 || test_users == 0) throw ConfigError("split sizes must be positive");
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be non-negative");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (threads == 0) throw ConfigError("threads must be positive");
  if (sample_capacity == 0) throw ConfigError("sample_capacity must be positive");
}

TrainParams RunConfig::train_params() const {
  TrainParams p;
  p.optimizer.learning_rate = learning_rate;
  p.optimizer.max_epochs = max_epochs;
  p.optimizer.tolerance = tolerance;
  p.l2 = l2;
  p.transform = transform;
  p.seed = seed;
  return p;
}

EstimationOptions RunConfig::estimation() const {
  EstimationOptions o;
  o.log_base = log_base;
  o.normalize_location_size = normalize_location_size;
  return o;
}

json to_json(const RunConfig& c) {
  json metrics = json::array();
  for (auto m : c.metrics) metrics.push_back(std::string(metric_name(m)));
  return {{"posts", c.posts.string()},
          {"locations", c.locations.string()},
          {"output_dir", c.output_dir.string()},
          {"min_occurrences", c.min_occurrences},
          {"min_users", c.min_users},
          {"metrics", metrics},
          {"log_base", c.log_base},
          {"normalize_location_size", c.normalize_location_size},
          {"diff_top_k", c.diff_top_k},
          {"fractions", c.fractions},
          {"train_users", c.train_users},
          {"test_users", c.test_users},
          {"seed", c.seed},
          {"l2", c.l2},
          {"learning_rate", c.learning_rate},
          {"max_epochs", c.max_epochs},
          {"tolerance", c.tolerance},
          {"transform", std::string(transform_name(c.transform))},
          {"threads", c.threads},
          {"samples", c.samples},
          {"sample_capacity", c.sample_capacity},
          {"bind", c.bind},
          {"static_dir", c.static_dir ? json(c.static_dir->string()) : json(nullptr)}};
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = [] {
    std::set<std::string> keys;
    const auto defaults = to_json(RunConfig{});
    for (const auto& [k, _] : defaults.items()) keys.insert(k);
    return keys;
  }();
  for (const auto& [k, _] : j.items()) {
    if (!known.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  try {
    const auto get = [&](const char* key, auto& field) {
      if (const auto it = j.find(key); it != j.end()) it->get_to(field);
    };
    const auto get_path = [&](const char* key, std::filesystem::path& field) {
      if (const auto it = j.find(key); it != j.end()) field = it->get<std::string>();
    };
    get_path("posts", c.posts);
    get_path("locations", c.locations);
    get_path("output_dir", c.output_dir);
    get("min_occurrences", c.min_occurrences);
    get("min_users", c.min_users);
    if (const auto it = j.find("metrics"); it != j.end()) {
      c.metrics.clear();
      for (const auto& name : *it) {
        const auto m = parse_metric(name.get<std::string>());
        if (!m) throw ConfigError("unknown metric '" + name.get<std::string>() + "'");
        c.metrics.push_back(*m);
      }
    }
    get("log_base", c.log_base);
    get("normalize_location_size", c.normalize_location_size);
    get("diff_top_k", c.diff_top_k);
    get("fractions", c.fractions);
    get("train_users", c.train_users);
    get("test_users", c.test_users);
    get("seed", c.seed);
    get("l2", c.l2);
    get("learning_rate", c.learning_rate);
    get("max_epochs", c.max_epochs);
    get("tolerance", c.tolerance);
    if (const auto it = j.find("transform"); it != j.end()) {
      const auto t = parse_transform(it->get<std::string>());
      if (!t) throw ConfigError("unknown transform '" + it->get<std::string>() + "'");
      c.transform = *t;
    }
    get("threads", c.threads);
    get("samples", c.samples);
    get("sample_capacity", c.sample_capacity);
    get("bind", c.bind);
    if (const auto it = j.find("static_dir"); it != j.end()) {
      if (it->is_null()) {
        c.static_dir.reset();
      } else {
        c.static_dir = it->get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  const auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  return run_config_from_json(j);
}

std::string provenance(const RunConfig& c, std::string_view command) {
  return "command: " + std::string(command) + "\nconfig: " + to_json(c).dump();
}

}  // namespace regiolex
