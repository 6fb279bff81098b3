#include <yaml-cpp/yaml.h>

#include <sstream>
#include <string>

#include "recmix/errors.h"
#include "recmix/scenario.h"

namespace recmix {

namespace {

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(ErrorCode::kConfigError, "config key '" + key + "' has an invalid value");
  }
}

// A grid is a YAML sequence of numbers or a string ("a:step:b" or "x,y,z").
std::vector<double> grid_from(const YAML::Node& node, const std::string& key) {
  if (node.IsSequence()) {
    std::vector<double> out;
    for (const auto& item : node) out.push_back(scalar_as<double>(item, key));
    if (out.empty()) fail(ErrorCode::kConfigError, "config key '" + key + "' is empty");
    return out;
  }
  return parse_grid(scalar_as<std::string>(node, key));
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path, ScenarioConfig base) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    fail(ErrorCode::kConfigError, "cannot read config file '" + path + "'");
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::kConfigError, "config file '" + path + "': " + e.what());
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) fail(ErrorCode::kConfigError, "config file must be a flat key-value map");

  ScenarioConfig cfg = std::move(base);
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    const YAML::Node& v = entry.second;
    if (!v.IsScalar() && !(v.IsSequence() && (key == "w_grid" || key == "k_grid"))) {
      fail(ErrorCode::kConfigError, "config key '" + key + "' must hold a scalar");
    }
    if (key == "scenario") {
      cfg.scenario = parse_scenario_kind(scalar_as<std::string>(v, key));
    } else if (key == "model") {
      cfg.model = parse_model_kind(scalar_as<std::string>(v, key));
    } else if (key == "n") {
      cfg.n = scalar_as<int>(v, key);
    } else if (key == "m") {
      cfg.m = scalar_as<int>(v, key);
    } else if (key == "T") {
      cfg.T = scalar_as<int>(v, key);
    } else if (key == "replications") {
      cfg.replications = scalar_as<int>(v, key);
    } else if (key == "w_grid") {
      cfg.w_grid = grid_from(v, key);
    } else if (key == "k_grid") {
      cfg.k_grid = grid_from(v, key);
    } else if (key == "seed") {
      cfg.seed = scalar_as<std::uint64_t>(v, key);
    } else if (key == "tail_len") {
      cfg.tail_len = scalar_as<int>(v, key);
    } else if (key == "output_path") {
      cfg.output_path = scalar_as<std::string>(v, key);
    } else if (key == "dim") {
      cfg.dim = scalar_as<int>(v, key);
    } else if (key == "threads") {
      cfg.threads = scalar_as<int>(v, key);
    } else if (key == "data_path") {
      cfg.data_path = scalar_as<std::string>(v, key);
    } else {
      fail(ErrorCode::kConfigError, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace recmix
