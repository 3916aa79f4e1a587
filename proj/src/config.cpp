#include "rigidlid/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rigidlid {

namespace {

std::string line_col(const std::string& text, std::size_t pos) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// Best-effort location of a key in the source text.
std::string locate(const std::string& text, const std::string& key) {
  if (text.empty()) return "";
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return "";
  return line_col(text, pos) + ": ";
}

class Reader {
 public:
  Reader(const json& j, std::string where, const std::string& text)
      : j_(j), where_(std::move(where)), text_(text) {
    if (!j_.is_object()) fail(ErrorCode::Config, where_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) { return j_.at(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::Config, locate(text_, key) + "bad type for " + where_ + "." + key);
    }
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(ErrorCode::Config, locate(text_, key) + where_ + "." + key + " must be a number");
    out = v.get<double>();
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer())
      fail(ErrorCode::Config, locate(text_, key) + where_ + "." + key + " must be an integer");
    out = v.get<int>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        fail(ErrorCode::Config, locate(text_, it.key()) + "unknown key " + where_ + "." + it.key());
  }

  const std::string& text() const { return text_; }

 private:
  const json& j_;
  std::string where_;
  const std::string& text_;
  std::set<std::string> seen_;
};

void read_model(const json& j, ModelSpec& m, const std::string& text) {
  Reader r(j, "model", text);
  if (r.has("kind")) {
    if (!r.at("kind").is_string()) fail(ErrorCode::Config, locate(text, "kind") + "model.kind must be a string");
    try {
      m.kind = model_kind_from_string(r.at("kind").get<std::string>());
    } catch (const Error& e) {
      fail(ErrorCode::Config, locate(text, "kind") + e.what());
    }
  }
  r.integer("dim", m.dim);
  r.number("eps", m.eps);
  r.number("mu", m.mu);
  r.number("h0", m.h0);
  if (r.has("abcd")) {
    Reader a(r.at("abcd"), "model.abcd", text);
    a.number("a", m.abcd.a);
    a.number("b", m.abcd.b);
    a.number("c", m.abcd.c);
    a.number("d", m.abcd.d);
    a.finish();
  }
  r.finish();
}

void read_initial(const json& j, InitialData& d, const std::string& text) {
  Reader r(j, "initial", text);
  r.number("zeta_amp", d.zeta_amp);
  r.number("width", d.width);
  r.number("v_amp", d.v_amp);
  r.number("grad_amp", d.grad_amp);
  r.number("rot_amp", d.rot_amp);
  r.number("vortex_offset", d.vortex_offset);
  r.number("noise", d.noise);
  r.get("seed", d.seed);
  r.finish();
}

void read_solver(const json& j, SolverConfig& c, const std::string& text) {
  Reader r(j, "solver", text);
  r.number("c1", c.c1);
  r.number("c2", c.c2);
  r.get("snapshot_times", c.snapshot_times);
  r.number("gn_tol", c.gn_tol);
  r.integer("gn_max_iter", c.gn_max_iter);
  if (r.has("depth_floor_action")) {
    std::string s;
    r.get("depth_floor_action", s);
    if (s == "abort")
      c.depth_floor_action = DepthFloorAction::Abort;
    else if (s == "warn")
      c.depth_floor_action = DepthFloorAction::Warn;
    else
      fail(ErrorCode::Config, locate(text, "depth_floor_action") + "depth_floor_action must be abort or warn");
  }
  r.get("nonlinear", c.nonlinear);
  r.get("check_boundary", c.check_boundary);
  r.number("boundary_threshold", c.boundary_threshold);
  r.number("boundary_strip", c.boundary_strip);
  r.finish();
}

void read_grid(const json& j, int& n, double& length, const std::string& text) {
  Reader r(j, "grid", text);
  r.integer("n", n);
  r.number("length", length);
  r.finish();
}

NormRequest read_norm(const json& j, const std::string& text) {
  NormRequest n;
  Reader r(j, "norm", text);
  try {
    if (r.has("comparison")) n.comparison = comparison_from_string(r.at("comparison").get<std::string>());
    if (r.has("kind")) n.kind = norm_kind_from_string(r.at("kind").get<std::string>());
    if (r.has("fit")) n.fit = fit_model_from_string(r.at("fit").get<std::string>());
  } catch (const json::exception&) {
    fail(ErrorCode::Config, "norm comparison, kind and fit must be strings");
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  if (r.has("q")) n.q = exponent_from_json(r.at("q"), "norm.q");
  if (r.has("r")) n.r = exponent_from_json(r.at("r"), "norm.r");
  if (r.has("target")) {
    const json& t = r.at("target");
    if (t.is_string())
      n.target_expr = t.get<std::string>();
    else if (t.is_number())
      n.target = t.get<double>();
    else
      fail(ErrorCode::Config, locate(text, "target") + "norm.target must be a string or number");
  }
  r.number("target_value", n.target);
  r.get("mus", n.mus);
  r.get("mu_uniform", n.mu_uniform);
  r.number("flag_floor", n.flag_floor);
  r.finish();
  return n;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    const auto colon = msg.find(": ", msg.find("parse error"));
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    fail(ErrorCode::Config, origin + ":" + line_col(text, pos) + ": " + msg);
  }
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

double exponent_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity"))
    return kInf;
  fail(ErrorCode::Config, what + " must be a number or \"inf\"");
}

json exponent_to_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

void SimulationConfig::validate() const {
  model.validate();
  solver.validate();
  require(n >= 8 && n % 2 == 0, ErrorCode::Config, "grid.n must be even and >= 8");
  require(length > 0.0, ErrorCode::Config, "grid.length must be positive");
  require(t_end >= 0.0 && std::isfinite(t_end), ErrorCode::Config, "t_end must be >= 0");
  require(n_snapshots >= 0, ErrorCode::Config, "n_snapshots must be >= 0");
}

SimulationConfig simulation_from_json(const json& j, const std::string& text) {
  SimulationConfig c;
  Reader r(j, "config", text);
  if (r.has("model")) read_model(r.at("model"), c.model, text);
  if (r.has("grid")) read_grid(r.at("grid"), c.n, c.length, text);
  if (r.has("initial")) read_initial(r.at("initial"), c.init, text);
  if (r.has("solver")) read_solver(r.at("solver"), c.solver, text);
  r.number("t_end", c.t_end);
  r.integer("n_snapshots", c.n_snapshots);
  r.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  return c;
}

Trajectory simulate(const SimulationConfig& c) {
  c.validate();
  const Grid grid(c.model.dim, c.n, c.length);
  const State u0 = make_initial_state(grid, c.init);
  SolverConfig sc = c.solver;
  if (sc.snapshot_times.empty() && c.t_end > 0.0)
    for (int s = 1; s <= c.n_snapshots; ++s) sc.snapshot_times.push_back(c.t_end * s / c.n_snapshots);
  return run(c.model, u0, c.t_end, sc);
}

json to_json(const ModelSpec& m) {
  return json{{"kind", to_string(m.kind)},
              {"dim", m.dim},
              {"eps", m.eps},
              {"mu", m.mu},
              {"h0", m.h0},
              {"abcd", {{"a", m.abcd.a}, {"b", m.abcd.b}, {"c", m.abcd.c}, {"d", m.abcd.d}}}};
}

json to_json(const InitialData& d) {
  return json{{"zeta_amp", d.zeta_amp}, {"width", d.width},
              {"v_amp", d.v_amp},       {"grad_amp", d.grad_amp},
              {"rot_amp", d.rot_amp},   {"vortex_offset", d.vortex_offset},
              {"noise", d.noise},       {"seed", d.seed}};
}

json to_json(const SolverConfig& c) {
  return json{{"c1", c.c1},
              {"c2", c.c2},
              {"snapshot_times", c.snapshot_times},
              {"gn_tol", c.gn_tol},
              {"gn_max_iter", c.gn_max_iter},
              {"depth_floor_action", c.depth_floor_action == DepthFloorAction::Abort ? "abort" : "warn"},
              {"nonlinear", c.nonlinear},
              {"check_boundary", c.check_boundary},
              {"boundary_threshold", c.boundary_threshold},
              {"boundary_strip", c.boundary_strip}};
}

json to_json(const SimulationConfig& c) {
  return json{{"model", to_json(c.model)},
              {"grid", {{"n", c.n}, {"length", c.length}}},
              {"initial", to_json(c.init)},
              {"solver", to_json(c.solver)},
              {"t_end", c.t_end},
              {"n_snapshots", c.n_snapshots}};
}

ExperimentSpec experiment_from_json(const json& j, const std::string& text) {
  ExperimentSpec s;
  Reader r(j, "suite", text);
  r.get("tag", s.tag);
  if (r.has("description")) {
    if (!r.at("description").is_string()) fail(ErrorCode::Config, "suite.description must be a string");
  }
  if (r.has("model")) read_model(r.at("model"), s.model, text);
  if (r.has("grid")) read_grid(r.at("grid"), s.n, s.length, text);
  if (r.has("initial")) read_initial(r.at("initial"), s.init, text);
  if (r.has("solver")) read_solver(r.at("solver"), s.solver, text);
  r.number("t_end", s.t_end);
  r.integer("n_snapshots", s.n_snapshots);
  r.get("eps_list", s.eps_list);
  r.get("mu_list", s.mu_list);
  r.number("mu_power", s.mu_power);
  r.number("tolerance", s.tolerance);
  if (r.has("norms")) {
    if (!r.at("norms").is_array()) fail(ErrorCode::Config, locate(text, "norms") + "suite.norms must be an array");
    for (const auto& n : r.at("norms")) s.norms.push_back(read_norm(n, text));
  }
  r.finish();
  return s;
}

json to_json(const ExperimentSpec& s) {
  json norms = json::array();
  for (const auto& n : s.norms) {
    json o{{"comparison", to_string(n.comparison)},
           {"kind", to_string(n.kind)},
           {"q", exponent_to_json(n.q)},
           {"r", exponent_to_json(n.r)},
           {"target_value", n.target},
           {"fit", to_string(n.fit)},
           {"mus", n.mus},
           {"mu_uniform", n.mu_uniform},
           {"flag_floor", n.flag_floor}};
    if (!n.target_expr.empty()) o["target"] = n.target_expr;
    norms.push_back(o);
  }
  return json{{"tag", s.tag},
              {"model", to_json(s.model)},
              {"grid", {{"n", s.n}, {"length", s.length}}},
              {"initial", to_json(s.init)},
              {"solver", to_json(s.solver)},
              {"t_end", s.t_end},
              {"n_snapshots", s.n_snapshots},
              {"eps_list", s.eps_list},
              {"mu_list", s.mu_list},
              {"mu_power", s.mu_power},
              {"tolerance", s.tolerance},
              {"norms", norms}};
}

}  // namespace rigidlid
