#pragma once

#include <map>
#include <string>
#include <vector>

#include "metatele/common.hpp"

namespace metatele {

// Reproducibility record written next to every CLI run's artifacts: full
// configuration echo, tool version, seed, and input-file hashes. Every run
// is re-creatable byte-for-byte from its manifest (timestamps live only
// here).
struct RunManifest {
  std::string tool_version = kVersion;
  std::string subcommand;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_hashes;
  std::vector<std::string> outputs;
  std::string timestamp;  // informational only

  void add_input(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace metatele
