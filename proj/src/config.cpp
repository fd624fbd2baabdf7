#include "crackdyn/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace crackdyn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const Entry& e, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (trim(e.value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(e.line, key + " expects a number, got '" + e.value + "'");
}

long to_int(const Entry& e, const std::string& key) {
  const double v = to_double(e, key);
  if (v != std::floor(v)) fail(e.line, key + " expects an integer");
  return long(v);
}

VectorExpr to_vector(const Entry& e, const std::string& key) {
  try {
    auto v = parse_vector(e.value);
    if (v.size() != 2) fail(e.line, key + " needs two components");
    return v;
  } catch (const ParseError& err) {
    fail(e.line, key + ": " + err.what());
  }
}

const std::map<std::string, std::set<std::string>> kKeys = {
    {"mesh", {"builtin", "file"}},
    {"material", {"lambda", "mu", "rho"}},
    {"contact", {"gamma", "epsilon", "g"}},
    {"time", {"t_end", "dt", "scheme", "newmark_b", "newmark_g", "newton_tol", "newton_abs",
              "newton_maxit", "max_halvings", "linear_tol"}},
    {"data", {"f", "F", "u0", "v0"}},
    {"output", {"dir", "every"}},
};

}  // namespace

Config parse_config(std::istream& in, const std::string& base_dir) {
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::string section, raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kKeys.count(section)) fail(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    if (section.empty()) fail(lineno, "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKeys.at(section).count(key)) fail(lineno, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) fail(lineno, "empty value for '" + key + "'");
    if (!sections[section].emplace(key, Entry{value, lineno}).second)
      fail(lineno, "duplicate key '" + key + "'");
  }

  Config cfg;
  Scenario& sc = cfg.scenario;
  auto get = [&](const std::string& s, const std::string& k) -> const Entry* {
    const auto it = sections.find(s);
    if (it == sections.end()) return nullptr;
    const auto jt = it->second.find(k);
    return jt == it->second.end() ? nullptr : &jt->second;
  };

  const Entry* builtin = get("mesh", "builtin");
  const Entry* file = get("mesh", "file");
  if (!builtin == !file) throw ConfigError("[mesh] needs exactly one of 'builtin' or 'file'");
  try {
    if (builtin) {
      cfg.mesh_source = "builtin:" + builtin->value;
      sc.mesh = generate_from_spec(builtin->value);
    } else {
      std::filesystem::path p(file->value);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      cfg.mesh_source = p.string();
      sc.mesh = load_mesh(p.string());
    }
  } catch (const Error& e) {
    fail(builtin ? builtin->line : file->line, std::string("mesh: ") + e.what());
  }

  if (auto e = get("material", "lambda")) sc.material.lambda = to_double(*e, "lambda");
  if (auto e = get("material", "mu")) sc.material.mu = to_double(*e, "mu");
  if (auto e = get("material", "rho")) sc.material.rho = to_double(*e, "rho");

  if (auto e = get("contact", "gamma")) sc.contact.gamma = to_double(*e, "gamma");
  if (auto e = get("contact", "epsilon")) sc.contact.epsilon = to_double(*e, "epsilon");
  if (auto e = get("contact", "g")) {
    try {
      sc.contact.g = Expr::parse(e->value);
    } catch (const ParseError& err) {
      fail(e->line, std::string("g: ") + err.what());
    }
  }

  auto& tp = sc.time;
  if (auto e = get("time", "t_end")) tp.t_end = to_double(*e, "t_end");
  if (auto e = get("time", "dt")) tp.dt = to_double(*e, "dt");
  if (auto e = get("time", "scheme")) {
    if (e->value == "midpoint") tp.scheme = Scheme::midpoint;
    else if (e->value == "newmark") tp.scheme = Scheme::newmark;
    else fail(e->line, "scheme must be 'midpoint' or 'newmark'");
  }
  if (auto e = get("time", "newmark_b")) tp.newmark_b = to_double(*e, "newmark_b");
  if (auto e = get("time", "newmark_g")) tp.newmark_g = to_double(*e, "newmark_g");
  if (auto e = get("time", "newton_tol")) tp.newton_tol = to_double(*e, "newton_tol");
  if (auto e = get("time", "newton_abs")) tp.newton_abs = to_double(*e, "newton_abs");
  if (auto e = get("time", "newton_maxit")) tp.newton_maxit = int(to_int(*e, "newton_maxit"));
  if (auto e = get("time", "max_halvings")) tp.max_halvings = int(to_int(*e, "max_halvings"));
  if (auto e = get("time", "linear_tol")) tp.linear_tol = to_double(*e, "linear_tol");

  if (auto e = get("data", "f")) sc.data.f = to_vector(*e, "f");
  if (auto e = get("data", "F")) sc.data.F = to_vector(*e, "F");
  if (auto e = get("data", "u0")) sc.data.u0 = to_vector(*e, "u0");
  if (auto e = get("data", "v0")) sc.data.v0 = to_vector(*e, "v0");

  if (auto e = get("output", "dir")) cfg.output.dir = e->value;
  if (auto e = get("output", "every")) {
    const long every = to_int(*e, "every");
    if (every < 0) fail(e->line, "every must be >= 0");
    cfg.output.every = std::size_t(every);
  }

  // Module invariants, plus g >= 0 sampled on the crack across the run.
  try {
    sc.material.validate();
    sc.contact.validate();
    tp.validate();
    const auto quad = CrackQuadrature::build(sc.mesh);
    for (double t : {0.0, 0.25 * tp.t_end, 0.5 * tp.t_end, 0.75 * tp.t_end, tp.t_end})
      threshold_values(sc.contact, quad, t);
    for (const auto* v : {&sc.data.f, &sc.data.F, &sc.data.u0, &sc.data.v0})
      for (const auto& e : *v)
        for (const auto& p : sc.mesh.vertices) e.eval(0.0, p);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

// ---------------------------------------------------------------------------

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.t, r.kinetic,
                r.strain, r.penetration_L3, r.comp_residual, r.friction_gap, r.stick_slip_residual,
                r.newton_iters);
  out << buf;
}

std::vector<DiagnosticsRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw ParseError("line 1: unexpected header", 1);
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    DiagnosticsRecord r;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ParseError("line " + std::to_string(lineno) + ": expected 8 columns", lineno);
    try {
      r.t = std::stod(cells[0]);
      r.kinetic = std::stod(cells[1]);
      r.strain = std::stod(cells[2]);
      r.penetration_L3 = std::stod(cells[3]);
      r.comp_residual = std::stod(cells[4]);
      r.friction_gap = std::stod(cells[5]);
      r.stick_slip_residual = std::stod(cells[6]);
      r.newton_iters = std::stoi(cells[7]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": bad number", lineno);
    }
    out.push_back(r);
  }
  return out;
}

void write_vtk(std::ostream& out, const CrackedMesh& mesh, const State& s) {
  char buf[160];
  out << "# vtk DataFile Version 3.0\n";
  std::snprintf(buf, sizeof buf, "crackdyn t=%.17g\n", s.t);
  out << buf << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p[0], p[1]);
    out << buf;
  }
  out << "CELLS " << mesh.cells.size() << ' ' << 4 * mesh.cells.size() << '\n';
  for (const auto& c : mesh.cells) out << "3 " << c.v[0] << ' ' << c.v[1] << ' ' << c.v[2] << '\n';
  out << "CELL_TYPES " << mesh.cells.size() << '\n';
  for (std::size_t i = 0; i < mesh.cells.size(); ++i) out << "5\n";
  out << "POINT_DATA " << mesh.vertices.size() << '\n';
  for (const auto* name : {"u", "v"}) {
    const Vector& w = name[0] == 'u' ? s.u : s.v;
    out << "VECTORS " << name << " double\n";
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", w[DofMap::dof(v, 0)], w[DofMap::dof(v, 1)]);
      out << buf;
    }
  }
}

}  // namespace crackdyn
