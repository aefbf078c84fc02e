#include "gtsi/manifest.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>

#include "gtsi/errors.hpp"

namespace gtsi {

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version;
  if (!config_digest.empty()) j["config_digest"] = config_digest;
  j["seeds"] = seeds;
  j["outputs"] = outputs;
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& [name, secs] : stage_seconds) stages[name] = secs;
  j["stage_seconds"] = std::move(stages);
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write manifest: " + path.string());
  f << j.dump(2) << '\n';
}

namespace {
std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

StageTimer::StageTimer(RunManifest& man, std::string name)
    : man_(man), name_(std::move(name)), start_ns_(now_ns()) {}

StageTimer::~StageTimer() {
  man_.stage_seconds.emplace_back(name_, static_cast<double>(now_ns() - start_ns_) * 1e-9);
}

}  // namespace gtsi
