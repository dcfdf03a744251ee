#include "metatele/manifest.hpp"

#include <chrono>
#include <fstream>

#include "json.hpp"
#include "metatele/io.hpp"

namespace metatele {

void RunManifest::add_input(const std::string& path) {
  input_hashes[path] = io::hex64(io::hash_file(path));
}

void RunManifest::save(const std::string& path) const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["config"] = config;
  j["input_hashes"] = input_hashes;
  j["outputs"] = outputs;
  if (timestamp.empty()) {
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            now.time_since_epoch())
            .count();
  } else {
    j["timestamp"] = timestamp;
  }
  std::ofstream out(path);
  if (!out) throw IoError("RunManifest: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace metatele
