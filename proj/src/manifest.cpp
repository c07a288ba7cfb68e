#include "jobprp/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "jobprp/backend.hpp"
#include "jobprp/error.hpp"

namespace jobprp {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void RunManifest::add_input(const std::string& path) { inputs.push_back({path, file_hash(path)}); }

void RunManifest::add_output(const std::string& path) { outputs.push_back({path, file_hash(path)}); }

std::map<std::string, std::string> library_versions() {
  return {{"jobprp", JOBPRP_VERSION},
          {"backend", backend_version()},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

namespace {

nlohmann::json records(const std::vector<FileRecord>& files) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"fnv1a", f.fnv1a}});
  return out;
}

std::vector<FileRecord> parse_records(const nlohmann::json& j) {
  std::vector<FileRecord> out;
  for (const auto& f : j) out.push_back({f.at("path").get<std::string>(), f.at("fnv1a").get<std::string>()});
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"command", m.command},  {"argv", m.argv},
                     {"config", m.config},    {"inputs", records(m.inputs)},
                     {"outputs", records(m.outputs)}, {"versions", m.versions}};
  j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.config = j.at("config");
  m.inputs = parse_records(j.at("inputs"));
  m.outputs = parse_records(j.at("outputs"));
  m.versions = j.at("versions").get<std::map<std::string, std::string>>();
  m.seed.reset();
  if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace jobprp
