// critwave: batch experiments with JSON/CSV reports.
// Exit codes: 0 all checks pass, 1 a check failed or the computation failed, 2 usage error.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "critwave/error.hpp"
#include "critwave/io.hpp"

namespace fs = std::filesystem;
using namespace critwave::cli;

namespace {

constexpr int kManifestSchema = 1;

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path fresh_dir(const fs::path& base) {
  fs::path dir = base;
  for (int k = 1; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critwave: numerical experiments for the energy-critical wave equation"};
  app.require_subcommand(1);

  struct Bound {
    const Command* cmd;
    CLI::App* sub;
    std::map<std::string, std::string> overrides;
    std::string config;
    std::vector<std::string> sets;
  };
  std::string outdir = "runs";
  std::string stamp;
  app.add_option("--outdir", outdir, "artifact root directory");
  app.add_option("--timestamp", stamp, "run directory name (default: current UTC time)");

  std::vector<Bound> bound;
  bound.reserve(commands().size());
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.description);
    sub->fallthrough();
    bound.push_back({&cmd, sub, {}, {}, {}});
    auto& b = bound.back();
    sub->add_option("--config", b.config, "key = value file");
    sub->add_option("--set", b.sets, "key=value override (repeatable)");
    for (const auto& [key, def] : cmd.defaults) {
      sub->add_option_function<std::string>(
          "--" + key, [&b, key = key](const std::string& v) { b.overrides[key] = v; },
          "default " + def);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& b : bound) {
    if (!b.sub->parsed()) continue;
    RunConfig cfg(b.cmd->name, b.cmd->defaults);
    critwave::cli::Report rep;
    fs::path dir;
    try {
      if (!b.config.empty()) cfg.load_file(b.config);
      for (const auto& [k, v] : b.overrides) cfg.set(k, v);
      for (const auto& s : b.sets) cfg.set_assignment(s);
      dir = fresh_dir(fs::path(outdir) / b.cmd->name / (stamp.empty() ? utc_stamp() : stamp));
      b.cmd->run(cfg, dir, rep);
    } catch (const UsageError& e) {
      if (!dir.empty()) fs::remove_all(dir);
      std::cerr << "usage error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << b.cmd->name << " failed: " << e.what() << '\n';
      rep.results["error"] = e.what();
      rep.check_true("computation completed", false);
    }
    if (dir.empty()) return 2;
    critwave::io::write_json(dir / "report.json", rep.to_json());
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dir).string());
    }
    std::sort(files.begin(), files.end());
    const nlohmann::json manifest{{"schema_version", kManifestSchema},
                                  {"subcommand", b.cmd->name},
                                  {"config", cfg.to_json()},
                                  {"files", files},
                                  {"passed", rep.passed()}};
    critwave::io::write_json(dir / "manifest.json", manifest);
    for (const auto& c : rep.checks()) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' '
                << c.relation << ' ' << c.threshold << '\n';
    }
    std::cout << "artifacts: " << dir.string() << '\n';
    if (!rep.passed()) {
      std::cerr << "failed checks:";
      for (const auto& f : rep.failures()) std::cerr << " [" << f << ']';
      std::cerr << '\n';
      return 1;
    }
    return 0;
  }
  return 2;
}
