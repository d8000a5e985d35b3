#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace natpert::manifest {

std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string config_json;  // snapshot of the effective configuration
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // path -> sha256:<hex>
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
};

RunManifest make_manifest(const std::string& command, const std::string& config_json,
                          std::uint64_t seed, const std::vector<std::string>& input_paths,
                          const std::string& started_at, const std::string& finished_at);

void write_manifest(const RunManifest& m, const std::filesystem::path& out_file);

}  // namespace natpert::manifest
