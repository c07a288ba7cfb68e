#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace jobprp {

std::uint64_t fnv1a64(std::string_view bytes);
// 16 lowercase hex digits of the file's FNV-1a hash; throws InvalidInput when
// the file cannot be read.
std::string file_hash(const std::string& path);

struct FileRecord {
  std::string path;
  std::string fnv1a;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config = nlohmann::json::object();
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> versions;

  void add_input(const std::string& path);
  // Hashes the output; throws InvalidInput when it does not exist.
  void add_output(const std::string& path);
};

std::map<std::string, std::string> library_versions();

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

}  // namespace jobprp
