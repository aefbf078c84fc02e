#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gtsi {

inline constexpr const char* kVersion = "0.3.0";

// Provenance record written next to every artifact-producing run: enough to
// reproduce the outputs from a clean checkout.
struct RunManifest {
  std::string command;                  // reassembled argv
  std::string config_digest;            // empty when the run takes no config file
  std::vector<std::uint64_t> seeds;
  std::string version = kVersion;
  std::vector<std::string> outputs;     // paths relative to the manifest
  std::vector<std::pair<std::string, double>> stage_seconds;

  void add_output(const std::filesystem::path& p) { outputs.push_back(p.string()); }
  void write(const std::filesystem::path& path) const;  // json
};

// wall-clock helper: records elapsed seconds into the manifest on destruction
class StageTimer {
 public:
  StageTimer(RunManifest& man, std::string name);
  ~StageTimer();
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  RunManifest& man_;
  std::string name_;
  std::int64_t start_ns_;
};

}  // namespace gtsi
