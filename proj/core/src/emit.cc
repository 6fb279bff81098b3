#include "recmix/emit.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "recmix/errors.h"

namespace recmix {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

nlohmann::json config_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = to_string(cfg.scenario);
  j["model"] = to_string(cfg.model);
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["T"] = cfg.T;
  j["replications"] = cfg.replications;
  j["w_grid"] = cfg.w_grid;
  j["k_grid"] = cfg.k_grid;
  j["seed"] = cfg.seed;
  j["tail_len"] = cfg.tail_len;
  j["output_path"] = cfg.output_path;
  j["dim"] = cfg.dim;
  j["threads"] = cfg.threads;
  j["data_path"] = cfg.data_path;
  return j;
}

}  // namespace

std::string version_string() { return RECMIX_VERSION; }

std::string format_csv(const SweepResult& result) {
  std::string text = "grid_value,mean_error,ci_low,ci_high,failed\n";
  for (const auto& p : result.points) {
    text += fmt17(p.grid_value) + ',' + fmt17(p.mean_error) + ',' + fmt17(p.ci_low) + ',' +
            fmt17(p.ci_high) + ',' + std::to_string(p.failed) + '\n';
  }
  return text;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  write_file(path, format_csv(result));
}

std::string format_json(const ScenarioConfig& cfg, const std::vector<SweepResult>& results) {
  nlohmann::json root;
  root["metadata"] = {{"config", config_json(cfg)}, {"seed", cfg.seed}, {"version", version_string()}};
  root["series"] = nlohmann::json::array();
  for (const auto& series : results) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : series.points) {
      points.push_back({{"grid_value", p.grid_value},
                        {"mean_error", p.mean_error},
                        {"ci_low", p.ci_low},
                        {"ci_high", p.ci_high},
                        {"failed", p.failed},
                        {"replications", p.replications},
                        {"m", p.m}});
    }
    root["series"].push_back({{"label", series.label}, {"points", points}});
  }
  return root.dump(2) + "\n";
}

void emit_json(const ScenarioConfig& cfg, const std::vector<SweepResult>& results,
               const std::string& path) {
  write_file(path, format_json(cfg, results));
}

void emit_trajectory_csv(const std::vector<double>& errors, const std::vector<bool>& clamped,
                         const std::string& path) {
  std::string text = "t,error,clamped\n";
  for (std::size_t t = 0; t < errors.size(); ++t) {
    const bool c = t < clamped.size() && clamped[t];
    text += std::to_string(t) + ',' + fmt17(errors[t]) + ',' + (c ? "1" : "0") + '\n';
  }
  write_file(path, text);
}

std::string series_path(const std::string& base, const std::string& label) {
  const std::filesystem::path p(base);
  std::filesystem::path out = p.parent_path() / p.stem();
  out += "." + label;
  out += p.extension();
  return out.string();
}

}  // namespace recmix
