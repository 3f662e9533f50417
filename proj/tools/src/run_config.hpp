#pragma once

// Flat key=value run configuration: defaults, then a config file, then
// command-line overrides. Unknown keys and malformed values are usage errors.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace critwave::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunConfig {
 public:
  RunConfig(std::string subcommand, std::map<std::string, std::string> defaults);

  const std::string& subcommand() const { return subcommand_; }
  const std::map<std::string, std::string>& values() const { return values_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Lines "key = value"; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  /// "key=value".
  void set_assignment(const std::string& assignment);

  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key) const;

  nlohmann::json to_json() const;

 private:
  std::string subcommand_;
  std::map<std::string, std::string> values_;
};

}  // namespace critwave::cli
