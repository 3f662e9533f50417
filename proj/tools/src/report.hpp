#pragma once

// Named pass/fail checks plus free-form results, serialised to report.json.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace critwave::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  ///< "<=", ">=" or "=="
  bool passed = false;
};

class Report {
 public:
  void check_le(const std::string& name, double value, double threshold);
  void check_ge(const std::string& name, double value, double threshold);
  void check_true(const std::string& name, bool ok);

  bool passed() const;
  const std::vector<Check>& checks() const { return checks_; }
  std::vector<std::string> failures() const;

  nlohmann::json results = nlohmann::json::object();
  nlohmann::json to_json() const;

 private:
  std::vector<Check> checks_;
};

}  // namespace critwave::cli
