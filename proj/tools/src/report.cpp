#include "report.hpp"

#include <cmath>

namespace critwave::cli {

void Report::check_le(const std::string& name, double value, double threshold) {
  checks_.push_back({name, value, threshold, "<=", value <= threshold});
}

void Report::check_ge(const std::string& name, double value, double threshold) {
  checks_.push_back({name, value, threshold, ">=", value >= threshold});
}

void Report::check_true(const std::string& name, bool ok) {
  checks_.push_back({name, ok ? 1.0 : 0.0, 1.0, "==", ok});
}

bool Report::passed() const {
  for (const auto& c : checks_) {
    if (!c.passed) return false;
  }
  return true;
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks_) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

nlohmann::json Report::to_json() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : checks_) {
    nlohmann::json value = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    checks.push_back({{"name", c.name},
                      {"value", value},
                      {"threshold", c.threshold},
                      {"relation", c.relation},
                      {"passed", c.passed}});
  }
  return {{"passed", passed()}, {"checks", checks}, {"results", results}};
}

}  // namespace critwave::cli
