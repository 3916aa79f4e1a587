#include "rigidlid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rigidlid/euler2d.hpp"
#include "rigidlid/multiplier.hpp"
#include "rigidlid/norms.hpp"

namespace rigidlid {

double SolverConfig::dt(double eps) const { return std::min(c1, c2 * eps); }

void SolverConfig::validate() const {
  require(c1 > 0.0 && c2 > 0.0, ErrorCode::InvalidArgument, "dt rule needs c1, c2 > 0");
  require(gn_tol > 0.0, ErrorCode::InvalidArgument, "gn_tol must be positive");
  require(gn_max_iter > 0, ErrorCode::InvalidArgument, "gn_max_iter must be positive");
  require(boundary_strip > 0.0 && boundary_strip < 0.5, ErrorCode::InvalidArgument,
          "boundary strip must lie in (0, 0.5)");
}

NonlinearOptions SolverConfig::nonlinear_options() const {
  NonlinearOptions o;
  o.enabled = nonlinear;
  o.gn_tol = gn_tol;
  o.gn_max_iter = gn_max_iter;
  o.gn_check_floor = depth_floor_action == DepthFloorAction::Abort;
  return o;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  for (const auto& s : snapshots) t.push_back(s.t);
  return t;
}

// --------------------------------------------------------------- Lawson

LawsonStepper::LawsonStepper(const ModelSpec& spec, const Grid& grid, const NonlinearOptions& opt)
    : spec_(spec), grid_(grid), opt_(opt) {}

const LawsonStepper::Pair& LawsonStepper::propagators(double h) {
  // key on h to about 12 significant digits so landing steps reuse the cache
  const long long key = std::llround(h * 1e12 / spec_.eps);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (cache_.size() > 8) cache_.clear();
  Pair p{Propagator(spec_, grid_, 0.5 * h / spec_.eps), Propagator(spec_, grid_, h / spec_.eps)};
  return cache_.emplace(key, std::move(p)).first->second;
}

State LawsonStepper::step(const State& u, double h) {
  const Pair& e = propagators(h);
  auto f = [&](const State& s) { return nonlinearity(spec_, s, opt_); };

  const State k1 = f(u);
  State a = u;
  a.axpy(0.5 * h, k1);
  const State k2 = f(e.half.apply(a));
  const State eu_half = e.half.apply(u);
  State b = eu_half;
  b.axpy(0.5 * h, k2);
  const State k3 = f(b);
  State c = e.half.apply(eu_half);  // E(h) u
  State out = c;
  c.axpy(h, e.half.apply(k3));
  const State k4 = f(c);

  State k23 = k2;
  k23.axpy(1.0, k3);
  out.axpy(h / 6.0, e.full.apply(k1));
  out.axpy(h / 3.0, e.half.apply(k23));
  out.axpy(h / 6.0, k4);
  out.t = u.t + h;
  return out;
}

State step(const ModelSpec& spec, const State& u, double dt, const SolverConfig& config) {
  spec.validate();
  require(dt > 0.0, ErrorCode::InvalidArgument, "step size must be positive");
  LawsonStepper s(spec, u.grid(), config.nonlinear_options());
  return s.step(u, dt);
}

// ---------------------------------------------------------- monitoring

namespace {

bool in_strip(const Grid& g, int i, double strip) {
  const int w = std::max(1, int(std::ceil(strip * g.n())));
  return i < w || i >= g.n() - w;
}

}  // namespace

double boundary_fraction(const State& u, double strip) {
  const Grid& g = u.grid();
  std::vector<double> e(g.physical_size(), 0.0);
  auto add = [&](const SpectralField& f) {
    const auto p = transform_backward(f);
    for (std::size_t i = 0; i < p.size(); ++i) e[i] += p[i] * p[i];
  };
  add(u.zeta);
  for (const auto& c : u.v) add(c);
  double tot = 0.0, edge = 0.0;
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      tot += e[i];
      if (in_strip(g, i, strip)) edge += e[i];
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const bool si = in_strip(g, i, strip);
      for (int j = 0; j < n; ++j) {
        const double v = e[std::size_t(i) * n + j];
        tot += v;
        if (si || in_strip(g, j, strip)) edge += v;
      }
    }
  }
  return tot > 0.0 ? edge / tot : 0.0;
}

namespace {

StepDiagnostics diagnose(const ModelSpec& spec, const State& u, long step, double strip) {
  StepDiagnostics d;
  d.step = step;
  d.t = u.t;
  d.mass = mass(u);
  d.energy = linear_energy(spec, u);
  d.min_depth = min_depth(spec, u);
  d.boundary_mass = boundary_fraction(u, strip);
  return d;
}

std::vector<double> landing_times(const std::vector<double>& requested, double t_end) {
  std::vector<double> t{0.0};
  for (double s : requested) {
    require(std::isfinite(s) && s >= 0.0 && s <= t_end, ErrorCode::InvalidArgument,
            "snapshot times must lie within [0, t_end]");
    t.push_back(s);
  }
  t.push_back(t_end);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double s : t)
    if (out.empty() || s > out.back() + 1e-12 * std::max(1.0, t_end)) out.push_back(s);
  return out;
}

int substeps(double span, double dt) {
  return std::max(1, int(std::ceil(span / dt - 1e-9)));
}

}  // namespace

Trajectory run(const ModelSpec& spec, const State& u0, double t_end, const SolverConfig& config) {
  spec.validate();
  config.validate();
  require(std::isfinite(t_end) && t_end >= 0.0, ErrorCode::InvalidArgument,
          "t_end must be non-negative");
  require(u0.grid().dim() == spec.dim, ErrorCode::ShapeMismatch, "state and model dims differ");

  Trajectory traj;
  traj.model = spec;
  traj.dt = config.dt(spec.eps);
  State u = u0;
  u.t = 0.0;

  StepDiagnostics d0 = diagnose(spec, u, 0, config.boundary_strip);
  if (d0.min_depth < spec.h0) {
    if (config.depth_floor_action == DepthFloorAction::Abort)
      fail(ErrorCode::DepthFloor, "initial depth 1+eps*zeta0 is below h0");
    traj.events.push_back("t=0: initial depth below h0");
  }
  if (config.check_boundary && d0.boundary_mass > config.boundary_threshold)
    fail(ErrorCode::Boundary, "initial datum does not decay before the domain edge");
  traj.diagnostics.push_back(d0);
  traj.snapshots.push_back(u);
  traj.m_bound = x_k_mu_norm(u, 3, spec.mu);

  LawsonStepper stepper(spec, u.grid(), config.nonlinear_options());
  const auto targets = landing_times(config.snapshot_times, t_end);
  long nstep = 0;
  bool warned = false;
  for (std::size_t s = 1; s < targets.size(); ++s) {
    const double t0 = u.t;
    const int n = substeps(targets[s] - t0, traj.dt);
    const double h = (targets[s] - t0) / n;
    for (int k = 0; k < n; ++k) {
      u = stepper.step(u, h);
      u.t = (k + 1 == n) ? targets[s] : t0 + (k + 1) * h;
      ++nstep;
      StepDiagnostics d = diagnose(spec, u, nstep, config.boundary_strip);
      if (!std::isfinite(d.energy))
        fail(ErrorCode::NonFinite, "solution blew up at t=" + num(u.t));
      if (d.min_depth < spec.h0) {
        if (config.depth_floor_action == DepthFloorAction::Abort)
          fail(ErrorCode::DepthFloor, "depth fell below h0 at t=" + num(u.t));
        if (!warned) traj.events.push_back("t=" + num(u.t) + ": depth below h0");
        warned = true;
      }
      if (config.check_boundary && d.boundary_mass > config.boundary_threshold)
        fail(ErrorCode::Boundary,
             "boundary mass " + num(d.boundary_mass) + " exceeds threshold at t=" +
                 num(u.t));
      traj.diagnostics.push_back(d);
    }
    traj.snapshots.push_back(u);
    traj.m_bound = std::max(traj.m_bound, x_k_mu_norm(u, 3, spec.mu));
  }
  return traj;
}

// ---------------------------------------------------------------- Euler

VorticityTrajectory run_euler2d(const SpectralField& omega0, double t_end,
                                const SolverConfig& config) {
  config.validate();
  const Grid& g = omega0.grid();
  require(g.dim() == 2, ErrorCode::InvalidArgument, "Euler solver needs a 2D grid");
  require(std::abs(mean_value(omega0)) <= 1e-12 * std::max(1.0, l2_norm(omega0)),
          ErrorCode::InvalidArgument, "initial vorticity must have zero mean");
  VorticityTrajectory traj;
  traj.grid = g;
  traj.dt = config.c1;
  SpectralField w = omega0;
  w[0] = 0.0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.omega.push_back(w);
    traj.circulation.push_back(mean_value(w) * g.length() * g.length());
    traj.enstrophy.push_back(l2_squared(w));
  };
  auto cfl = [&](double h) {
    const VectorField u = biot_savart(w);
    double umax = 0.0;
    for (const auto& c : u)
      for (double v : transform_backward(c)) umax = std::max(umax, std::abs(v));
    if (umax * h > g.dx())
      fail(ErrorCode::Resolution, "Euler step violates the CFL bound (|u| dt > dx)");
  };
  record(0.0);
  double t = 0.0;
  const auto targets = landing_times(config.snapshot_times, t_end);
  for (std::size_t s = 1; s < targets.size(); ++s) {
    const int n = substeps(targets[s] - t, traj.dt);
    const double h = (targets[s] - t) / n;
    cfl(h);
    for (int k = 0; k < n; ++k) {
      const SpectralField k1 = euler2d_rhs(w);
      SpectralField a = w;
      a.axpy(0.5 * h, k1);
      const SpectralField k2 = euler2d_rhs(a);
      a = w;
      a.axpy(0.5 * h, k2);
      const SpectralField k3 = euler2d_rhs(a);
      a = w;
      a.axpy(h, k3);
      const SpectralField k4 = euler2d_rhs(a);
      w.axpy(h / 6.0, k1);
      w.axpy(h / 3.0, k2);
      w.axpy(h / 3.0, k3);
      w.axpy(h / 6.0, k4);
    }
    t = targets[s];
    record(t);
  }
  return traj;
}

State corrector_reference(const ModelSpec& spec, const State& u0, double t) {
  require(t >= 0.0, ErrorCode::InvalidArgument, "corrector time must be non-negative");
  spec.validate();
  State out = Propagator(spec, u0.grid(), t / spec.eps).apply(u0);
  out.t = t;
  if (spec.dim == 2) out.v = riesz_gradient_projector(out.v);
  return out;
}

// ---------------------------------------------------------- persistence

void write_trajectory(const Trajectory& traj, const std::string& dir) {
  require(!traj.snapshots.empty(), ErrorCode::InvalidArgument, "empty trajectory");
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Grid& g = traj.snapshots[0].grid();
  const ModelSpec& m = traj.model;
  const std::string hdr_path = (fs::path(dir) / "trajectory.hdr").string();
  const std::string bin_path = (fs::path(dir) / "trajectory.bin").string();
  {
    std::ofstream h(hdr_path);
    if (!h) fail(ErrorCode::Io, "cannot write " + hdr_path);
    h.precision(17);
    h << "rigidlid-trajectory 1\n";
    h << "dim " << g.dim() << "\n";
    h << "n " << g.n() << "\n";
    h << "length " << g.length() << "\n";
    h << "model " << to_string(m.kind) << "\n";
    h << "eps " << m.eps << "\nmu " << m.mu << "\n";
    const AbcdParams p = m.linear_abcd();
    h << "abcd " << p.a << " " << p.b << " " << p.c << " " << p.d << "\n";
    h << "h0 " << m.h0 << "\n";
    h << "components " << 1 + g.dim() << "\n";
    h << "layout snapshot-major, components zeta V1" << (g.dim() == 2 ? " V2" : "")
      << ", row-major float64 little-endian\n";
    h << "snapshots " << traj.snapshots.size() << "\n";
    h << "times";
    for (const auto& s : traj.snapshots) h << " " << s.t;
    h << "\n";
  }
  std::ofstream b(bin_path, std::ios::binary);
  if (!b) fail(ErrorCode::Io, "cannot write " + bin_path);
  for (const auto& s : traj.snapshots) {
    auto put = [&](const SpectralField& f) {
      const auto p = transform_backward(f);
      b.write(reinterpret_cast<const char*>(p.data()), std::streamsize(p.size() * sizeof(double)));
    };
    put(s.zeta);
    for (const auto& c : s.v) put(c);
  }
  if (!b) fail(ErrorCode::Io, "short write on " + bin_path);
}

void write_diagnostics_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write " + path);
  f.precision(17);
  f << "step,time,mass,energy,min_depth,boundary_mass\n";
  for (const auto& d : traj.diagnostics)
    f << d.step << "," << d.t << "," << d.mass << "," << d.energy << "," << d.min_depth << ","
      << d.boundary_mass << "\n";
}

LoadedTrajectory read_trajectory(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string hdr_path = (fs::path(dir) / "trajectory.hdr").string();
  std::ifstream h(hdr_path);
  if (!h) fail(ErrorCode::Io, "cannot read " + hdr_path);
  LoadedTrajectory out;
  int dim = 0, n = 0;
  double length = 0.0;
  std::size_t count = 0;
  std::string line;
  while (std::getline(h, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dim") ls >> dim;
    else if (key == "n") ls >> n;
    else if (key == "length") ls >> length;
    else if (key == "model") {
      std::string k;
      ls >> k;
      out.model.kind = model_kind_from_string(k);
    } else if (key == "eps") ls >> out.model.eps;
    else if (key == "mu") ls >> out.model.mu;
    else if (key == "abcd") ls >> out.model.abcd.a >> out.model.abcd.b >> out.model.abcd.c >> out.model.abcd.d;
    else if (key == "h0") ls >> out.model.h0;
    else if (key == "snapshots") ls >> count;
    else if (key == "times") {
      double t;
      while (ls >> t) out.times.push_back(t);
    }
  }
  out.model.dim = dim;
  out.grid = Grid(dim, n, length);
  require(out.times.size() == count, ErrorCode::Io, "trajectory header is inconsistent");
  std::ifstream b((fs::path(dir) / "trajectory.bin").string(), std::ios::binary);
  if (!b) fail(ErrorCode::Io, "cannot read trajectory.bin");
  const std::size_t np = out.grid.physical_size();
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<std::vector<double>> comps(1 + dim, std::vector<double>(np));
    for (auto& c : comps) b.read(reinterpret_cast<char*>(c.data()), std::streamsize(np * sizeof(double)));
    if (!b) fail(ErrorCode::Io, "trajectory.bin is truncated");
    out.fields.push_back(std::move(comps));
  }
  return out;
}

}  // namespace rigidlid
