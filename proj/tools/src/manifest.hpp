#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace crad::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Run record written next to the outputs. Holds no timestamps or host
/// details so repeated runs produce identical bytes.
class Manifest {
 public:
  Manifest(std::string subcommand, std::uint64_t seed);

  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  void add_input(const std::filesystem::path& path);
  /// `path` relative to the output directory.
  void add_output(const std::filesystem::path& out_dir, const std::string& name);
  nlohmann::ordered_json& extra() { return extra_; }

  void write(const std::filesystem::path& path) const;

 private:
  std::string subcommand_;
  std::uint64_t seed_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json extra_ = nlohmann::ordered_json::object();
};

}  // namespace crad::cli
