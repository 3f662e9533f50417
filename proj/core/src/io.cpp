#include "critwave/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "critwave/error.hpp"

namespace critwave::io {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), Errc::io, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot read " + path.string());
  return in;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  require(ec == std::errc() && ptr == end, Errc::io, "malformed number '" + s + "'");
  return v;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(cell));
  require(out.size() == expected, Errc::io, "unexpected column count in '" + line + "'");
  return out;
}

const char* extension_name(Extension e) {
  switch (e) {
    case Extension::none: return "none";
    case Extension::zero: return "zero";
    case Extension::power_law: return "power_law";
  }
  return "none";
}

Extension extension_from(const std::string& s) {
  if (s == "none") return Extension::none;
  if (s == "zero") return Extension::zero;
  if (s == "power_law") return Extension::power_law;
  fail(Errc::io, "unknown extension '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::io, path.string() + ": " + e.what());
  }
}

json to_json(const GroupParams& A) {
  const auto v = A.flat();
  return json{{"dim", A.dim}, {"flat", std::vector<double>(v.data(), v.data() + v.size())}};
}

GroupParams params_from_json(const json& j) {
  try {
    const auto flat = j.at("flat").get<std::vector<double>>();
    return GroupParams::from_flat(j.at("dim").get<int>(), flat);
  } catch (const json::exception& e) {
    fail(Errc::io, std::string("group parameters: ") + e.what());
  }
}

void write_field_csv(const fs::path& path, const RadialField& f) {
  const auto& g = *f.grid();
  const json meta{{"schema", kSchemaVersion},
                  {"dim", g.dim()},
                  {"cells", g.size()},
                  {"r_max", g.r_max()},
                  {"extension", extension_name(f.extension())}};
  auto out = open_out(path);
  out << "# " << meta.dump() << "\nr,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << format_double(g.node(i)) << ',' << format_double(f[i]) << '\n';
  }
}

RadialField read_field_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  require(line.rfind("# ", 0) == 0, Errc::io, "missing metadata line in " + path.string());
  RadialGridPtr grid;
  Extension ext = Extension::none;
  try {
    const auto meta = json::parse(line.substr(2));
    grid = make_radial_grid(meta.at("dim").get<int>(), meta.at("cells").get<std::size_t>(),
                            meta.at("r_max").get<double>());
    ext = extension_from(meta.at("extension").get<std::string>());
  } catch (const json::exception& e) {
    fail(Errc::io, path.string() + ": " + e.what());
  }
  std::getline(in, line);
  std::vector<double> v;
  v.reserve(grid->size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    v.push_back(parse_row(line, 2)[1]);
  }
  require(v.size() == grid->size(), Errc::io, "row count does not match the grid");
  return RadialField(grid, std::move(v), ext);
}

void write_mode_trajectory(const fs::path& path, const ModeSystemState& st) {
  const std::size_t p = st.freqs.size();
  auto out = open_out(path);
  out << 't';
  for (std::size_t j = 1; j <= p; ++j) out << ",alpha_" << j;
  for (std::size_t j = 1; j <= p; ++j) out << ",beta_" << j;
  out << ",gamma,E_plus,E_minus\n";
  for (std::size_t i = 0; i < st.t.size(); ++i) {
    out << format_double(st.t[i]);
    for (double a : st.alpha[i]) out << ',' << format_double(a);
    for (double b : st.beta[i]) out << ',' << format_double(b);
    out << ',' << format_double(st.gamma[i]) << ',' << format_double(st.e_plus[i]) << ','
        << format_double(st.e_minus[i]) << '\n';
  }
  write_json(fs::path(path.string() + ".json"),
             json{{"schema", kSchemaVersion},
                  {"freqs", st.freqs},
                  {"eps3", st.eps3},
                  {"seed", st.seed},
                  {"backward", st.backward},
                  {"finite_escape", st.finite_escape},
                  {"escape_time", st.escape_time}});
}

void write_trajectory(const fs::path& path, const Trajectory& traj, std::size_t stride,
                      const json& extra) {
  require(stride >= 1, Errc::invalid_argument, "stride must be positive");
  const auto& g = *traj.grid;
  auto out = open_out(path);
  out << "t,r,u,du\n";
  for (std::size_t k = 0; k < traj.t.size(); k += stride) {
    const auto t = format_double(traj.t[k]);
    for (std::size_t i = 0; i < g.size(); ++i) {
      out << t << ',' << format_double(g.node(i)) << ',' << format_double(traj.u[k][i]) << ','
          << format_double(traj.du[k][i]) << '\n';
    }
  }
  json manifest{{"schema", kSchemaVersion},
                {"dim", g.dim()},
                {"cells", g.size()},
                {"r_max", g.r_max()},
                {"dt", traj.dt},
                {"cfl", traj.cfl},
                {"ghost", traj.ghost},
                {"snapshots", traj.t.size()},
                {"stride", stride},
                {"energy_drift", traj.energy_drift},
                {"blowup", traj.blowup},
                {"blowup_time", traj.blowup_time}};
  manifest["run"] = extra;
  write_json(fs::path(path.string() + ".json"), manifest);
}

void write_spacetime(const fs::path& dir, const SpaceTimeField& f) {
  f.validate();
  fs::create_directories(dir);
  const json manifest{{"schema", kSchemaVersion},
                      {"dim", f.dim},
                      {"geometry", f.geometry == SliceGeometry::radial ? "radial" : "axis"},
                      {"t0", f.t0},
                      {"dt", f.dt},
                      {"nt", f.nt},
                      {"x0", f.x0},
                      {"dx", f.dx},
                      {"nx", f.nx}};
  write_json(dir / "manifest.json", manifest);
  char name[32];
  for (std::size_t k = 0; k < f.nt; ++k) {
    std::snprintf(name, sizeof name, "row_%05zu.csv", k);
    auto out = open_out(dir / name);
    out << "x,u,ut\n";
    for (std::size_t i = 0; i < f.nx; ++i) {
      out << format_double(f.coord(i)) << ',' << format_double(f.at(k, i)) << ','
          << format_double(f.dt_at(k, i)) << '\n';
    }
  }
}

SpaceTimeField read_spacetime(const fs::path& dir) {
  const auto m = read_json(dir / "manifest.json");
  SpaceTimeField f;
  try {
    require(m.at("schema").get<int>() == kSchemaVersion, Errc::io, "unsupported schema version");
    f.dim = m.at("dim").get<int>();
    const auto geo = m.at("geometry").get<std::string>();
    require(geo == "radial" || geo == "axis", Errc::io, "unknown geometry '" + geo + "'");
    f.geometry = geo == "radial" ? SliceGeometry::radial : SliceGeometry::axis;
    f.t0 = m.at("t0").get<double>();
    f.dt = m.at("dt").get<double>();
    f.nt = m.at("nt").get<std::size_t>();
    f.x0 = m.at("x0").get<double>();
    f.dx = m.at("dx").get<double>();
    f.nx = m.at("nx").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(Errc::io, std::string("space-time manifest: ") + e.what());
  }
  f.u.reserve(f.nt * f.nx);
  f.ut.reserve(f.nt * f.nx);
  char name[32];
  for (std::size_t k = 0; k < f.nt; ++k) {
    std::snprintf(name, sizeof name, "row_%05zu.csv", k);
    auto in = open_in(dir / name);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto r = parse_row(line, 3);
      f.u.push_back(r[1]);
      f.ut.push_back(r[2]);
      ++rows;
    }
    require(rows == f.nx, Errc::io, std::string(name) + ": row count does not match the manifest");
  }
  f.validate();
  return f;
}

}  // namespace critwave::io
