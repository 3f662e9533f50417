#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "commands.hpp"
#include "critwave/io.hpp"

using namespace critwave::cli;
namespace fs = std::filesystem;

TEST_CASE("configuration layering and validation") {
  RunConfig cfg("demo", {{"a", "1"}, {"b", "0.5"}, {"list", "1,2,3"}, {"flag", "true"}});
  CHECK(cfg.get_int("a") == 1);
  CHECK(cfg.get_double("b") == 0.5);
  CHECK(cfg.get_doubles("list") == std::vector<double>{1, 2, 3});
  CHECK(cfg.get_bool("flag"));
  const auto path = fs::temp_directory_path() / "critwave_cli_test.cfg";
  std::ofstream(path) << "# comment\na = 7\n\nb=2.5  # trailing\n";
  cfg.load_file(path);
  CHECK(cfg.get_int("a") == 7);
  CHECK(cfg.get_double("b") == 2.5);
  cfg.set_assignment("a=9");
  CHECK(cfg.get("a") == "9");
  CHECK_THROWS_AS(cfg.set("unknown", "1"), UsageError);
  CHECK_THROWS_AS(cfg.set_assignment("novalue"), UsageError);
  cfg.set("b", "x1");
  CHECK_THROWS_AS(cfg.get_double("b"), UsageError);
  cfg.set("a", "-3");
  CHECK_THROWS_AS(cfg.get_size("a"), UsageError);
  CHECK(cfg.to_json().at("a") == "-3");
}

TEST_CASE("report bookkeeping") {
  Report r;
  r.check_le("small", 1.0, 2.0);
  r.check_ge("large", 1.0, 2.0);
  r.check_true("flag", true);
  CHECK_FALSE(r.passed());
  CHECK(r.failures() == std::vector<std::string>{"large"});
  const auto j = r.to_json();
  CHECK(j.at("passed") == false);
  CHECK(j.at("checks").size() == 3);
}

TEST_CASE("every subcommand is registered once with defaults") {
  std::set<std::string> names;
  for (const auto& c : commands()) {
    CHECK(names.insert(c.name).second);
    CHECK_FALSE(c.defaults.empty());
    CHECK(static_cast<bool>(c.run));
  }
  CHECK(names == std::set<std::string>{"spectrum", "stationary-check", "group-check", "modulation-sim",
                                       "evolve", "channel", "boost"});
}

TEST_CASE("small runs of the fast subcommands pass and reject bad keys") {
  auto find = [](const std::string& n) {
    for (const auto& c : commands()) {
      if (c.name == n) return &c;
    }
    return static_cast<const Command*>(nullptr);
  };
  const auto dir = fs::temp_directory_path() / "critwave_cli_runs";
  fs::create_directories(dir);
  {
    const auto* c = find("modulation-sim");
    RunConfig cfg(c->name, c->defaults);
    cfg.set("seeds", "5");
    Report rep;
    c->run(cfg, dir, rep);
    CHECK(rep.passed());
    cfg.set("eps3", "0.5");
    Report bad;
    CHECK_THROWS_AS(c->run(cfg, dir, bad), UsageError);
  }
  {
    const auto* c = find("evolve");
    RunConfig cfg(c->name, c->defaults);
    cfg.set("cells", "2000");
    cfg.set("init", "bump");
    cfg.set("T", "2");
    Report rep;
    c->run(cfg, dir, rep);
    CHECK(rep.passed());
    CHECK(fs::exists(dir / "trajectory.csv"));
    cfg.set("N", "7");
    Report bad;
    CHECK_THROWS_AS(c->run(cfg, dir, bad), UsageError);
  }
}
