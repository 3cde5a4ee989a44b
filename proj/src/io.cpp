#include "epicon/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace epicon {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Sub-tolerance negative roundoff is clamped in exported tables only; the
// integrator state itself is never touched.
double log_clamp(double v) {
  return (v < 0.0 && v > -1e-9) ? 0.0 : v;
}

const json& require(const json& j, const std::string& outer, const std::string& key) {
  if (!j.contains(key))
    throw ParseError("missing key \"" + (outer.empty() ? key : outer + "." + key) + "\"");
  return j.at(key);
}

VectorXd to_vector(const json& j, const std::string& name) {
  if (!j.is_array()) throw ParseError("key \"" + name + "\" must be an array");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("key \"" + name + "\" must hold numbers");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }

  Scenario sc;
  const json& model = require(j, "", "model");
  sc.model.n = require(model, "model", "n").get<int>();
  const json& M = require(model, "model", "M");
  if (!M.is_array() || static_cast<int>(M.size()) != sc.model.n)
    throw ParseError("key \"model.M\" must be an n-by-n row-major array of arrays");
  sc.model.M.resize(sc.model.n, sc.model.n);
  for (int i = 0; i < sc.model.n; ++i) {
    const json& row = M[i];
    if (!row.is_array() || static_cast<int>(row.size()) != sc.model.n)
      throw ParseError("key \"model.M\" must be an n-by-n row-major array of arrays");
    for (int k = 0; k < sc.model.n; ++k) sc.model.M(i, k) = row[k].get<double>();
  }
  sc.model.sigma = to_vector(require(model, "model", "sigma"), "model.sigma");
  sc.model.mu = to_vector(require(model, "model", "mu"), "model.mu");
  sc.model.rho = require(model, "model", "rho").get<double>();
  sc.model.beta_bar = to_vector(require(model, "model", "beta_bar"), "model.beta_bar");
  sc.model.u_bar = to_vector(require(model, "model", "u_bar"), "model.u_bar");

  const json& init = require(j, "", "init");
  sc.init.s0 = require(init, "init", "s0").get<double>();
  sc.init.x0 = to_vector(require(init, "init", "x0"), "init.x0");
  sc.init.r0 = require(init, "init", "r0").get<double>();

  const json& cost = require(j, "", "cost");
  sc.cost.w = to_vector(require(cost, "cost", "w"), "cost.w");
  sc.cost.rexp = to_vector(require(cost, "cost", "rexp"), "cost.rexp");
  sc.cost.C = to_vector(require(cost, "cost", "C"), "cost.C");
  sc.cost.q = to_vector(require(cost, "cost", "q"), "cost.q");

  const json& horizon = require(j, "", "horizon");
  sc.t_f = require(horizon, "horizon", "t_f").get<double>();
  sc.grid_points = require(horizon, "horizon", "grid_points").get<int>();

  const ValidationReport rep = validate_scenario(sc);
  if (!rep.ok) {
    std::string msg = "invalid scenario:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return sc;
}

std::string scenario_to_json_text(const Scenario& sc) {
  json j;
  j["model"]["n"] = sc.model.n;
  json M = json::array();
  for (int i = 0; i < sc.model.n; ++i) {
    json row = json::array();
    for (int k = 0; k < sc.model.n; ++k) row.push_back(sc.model.M(i, k));
    M.push_back(row);
  }
  j["model"]["M"] = M;
  j["model"]["sigma"] = std::vector<double>(sc.model.sigma.begin(), sc.model.sigma.end());
  j["model"]["mu"] = std::vector<double>(sc.model.mu.begin(), sc.model.mu.end());
  j["model"]["rho"] = sc.model.rho;
  j["model"]["beta_bar"] =
      std::vector<double>(sc.model.beta_bar.begin(), sc.model.beta_bar.end());
  j["model"]["u_bar"] = std::vector<double>(sc.model.u_bar.begin(), sc.model.u_bar.end());
  j["init"]["s0"] = sc.init.s0;
  j["init"]["x0"] = std::vector<double>(sc.init.x0.begin(), sc.init.x0.end());
  j["init"]["r0"] = sc.init.r0;
  j["cost"]["w"] = std::vector<double>(sc.cost.w.begin(), sc.cost.w.end());
  j["cost"]["rexp"] = std::vector<double>(sc.cost.rexp.begin(), sc.cost.rexp.end());
  j["cost"]["C"] = std::vector<double>(sc.cost.C.begin(), sc.cost.C.end());
  j["cost"]["q"] = std::vector<double>(sc.cost.q.begin(), sc.cost.q.end());
  j["horizon"]["t_f"] = sc.t_f;
  j["horizon"]["grid_points"] = sc.grid_points;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str());
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  open_out(path) << scenario_to_json_text(sc);
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  const int n = static_cast<int>(traj.x.cols());
  out << "t,s";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << ",r,d\n";
  for (int k = 0; k < traj.grid.size(); ++k) {
    out << num(traj.grid(k)) << ',' << num(log_clamp(traj.s(k)));
    for (int i = 0; i < n; ++i) out << ',' << num(log_clamp(traj.x(k, i)));
    out << ',' << num(log_clamp(traj.r(k))) << ',' << num(log_clamp(traj.d(k))) << '\n';
  }
}

void write_control_csv(const ControlTrajectory& u, const std::filesystem::path& path) {
  auto out = open_out(path);
  const int n = static_cast<int>(u.u.cols());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",u" << i;
  out << "\n";
  for (int k = 0; k < u.grid.size(); ++k) {
    out << num(u.grid(k));
    for (int i = 0; i < n; ++i) out << ',' << num(u.u(k, i));
    out << '\n';
  }
}

void write_costates_csv(const Scenario& sc, const Trajectory& traj, const ControlTrajectory& u,
                        const CostateTrajectory& cs, const std::filesystem::path& path) {
  auto out = open_out(path);
  const int n = static_cast<int>(cs.p_x.cols());
  out << "t,p_s";
  for (int i = 1; i <= n; ++i) out << ",p_x" << i;
  out << ",p_r,eta";
  for (int i = 1; i <= n; ++i) out << ",Psi" << i;
  out << ",H\n";
  for (int k = 0; k < cs.grid.size(); ++k) {
    out << num(cs.grid(k)) << ',' << num(cs.p_s(k));
    for (int i = 0; i < n; ++i) out << ',' << num(cs.p_x(k, i));
    out << ',' << num(cs.p_r(k)) << ',' << num(cs.eta(k));
    for (int i = 0; i < n; ++i) out << ',' << num(cs.Psi(k, i));
    const double H = hamiltonian(sc.model, sc.cost, k, u.u.row(k), state_at(traj, k),
                                 costate_at(cs, k));
    out << ',' << num(H) << '\n';
  }
}

ControlTrajectory read_control_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read control file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("control file is empty");
  int cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  if (cols < 2) throw ParseError("control file must have columns t,u1..un");

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    int c = 0;
    while (std::getline(row, cell, ',')) {
      try {
        const double v = std::stod(cell);
        if (c == 0)
          times.push_back(v);
        else
          values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("control file holds a non-numeric cell: " + cell);
      }
      ++c;
    }
    if (c != cols) throw ParseError("control file rows have inconsistent column counts");
  }
  if (times.size() < 2) throw ParseError("control file needs at least two rows");

  ControlTrajectory u;
  const int rows = static_cast<int>(times.size());
  const int n = cols - 1;
  u.grid = Eigen::Map<VectorXd>(times.data(), rows);
  u.u.resize(rows, n);
  for (int k = 0; k < rows; ++k)
    for (int i = 0; i < n; ++i) u.u(k, i) = values[static_cast<size_t>(k) * n + i];
  return u;
}

uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path.string() + " for checksumming");
  uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string checksum_hex(uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  json j;
  j["scenario_source"] = manifest.scenario_source;
  j["command"] = manifest.command;
  j["method"] = manifest.method;
  j["out_dir"] = manifest.out_dir;
  json files = json::object();
  for (const auto& [name, checksum] : manifest.files) files[name] = checksum;
  j["files"] = files;
  const auto now = std::chrono::system_clock::now();
  j["timestamp"] =
      static_cast<long long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                 now.time_since_epoch())
                                 .count());
  open_out(path) << j.dump(2) << "\n";
}

}  // namespace epicon
