#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "report.hpp"
#include "run_config.hpp"

namespace critwave::cli {

struct Command {
  std::string name;
  std::string description;
  std::map<std::string, std::string> defaults;
  /// Parses every key up front (UsageError on bad values), then computes.
  std::function<void(const RunConfig&, const std::filesystem::path& artifacts, Report&)> run;
};

const std::vector<Command>& commands();

}  // namespace critwave::cli
