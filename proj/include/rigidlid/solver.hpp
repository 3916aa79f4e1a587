#pragma once

#include <map>
#include <string>
#include <vector>

#include "rigidlid/model.hpp"

namespace rigidlid {

enum class DepthFloorAction { Abort, Warn };

struct SolverConfig {
  double c1 = 0.01;  // dt = min(c1, c2*eps)
  double c2 = 0.5;
  std::vector<double> snapshot_times;  // 0 and t_end are always added
  double gn_tol = 1e-10;
  int gn_max_iter = 400;
  DepthFloorAction depth_floor_action = DepthFloorAction::Abort;
  bool nonlinear = true;
  // Abort when the share of |U|^2 inside the edge strip exceeds the threshold.
  bool check_boundary = true;
  double boundary_threshold = 1e-8;
  double boundary_strip = 0.05;  // strip width as a fraction of L

  double dt(double eps) const;
  void validate() const;
  NonlinearOptions nonlinear_options() const;
};

struct StepDiagnostics {
  long step = 0;
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double min_depth = 0.0;
  double boundary_mass = 0.0;
};

struct Trajectory {
  ModelSpec model;
  std::vector<State> snapshots;
  std::vector<StepDiagnostics> diagnostics;
  double dt = 0.0;
  double m_bound = 0.0;  // max over snapshots of the X^3_mu norm
  std::vector<std::string> events;

  std::vector<double> times() const;
};

// Lawson RK4 with exact integrating factor; propagators cached per step size.
class LawsonStepper {
 public:
  LawsonStepper(const ModelSpec& spec, const Grid& grid, const NonlinearOptions& opt);
  State step(const State& u, double h);

 private:
  struct Pair {
    Propagator half, full;
  };
  const Pair& propagators(double h);
  ModelSpec spec_;
  Grid grid_;
  NonlinearOptions opt_;
  std::map<long long, Pair> cache_;
};

State step(const ModelSpec& spec, const State& u, double dt, const SolverConfig& config);

// Share of sum |U|^2 lying in the edge strip.
double boundary_fraction(const State& u, double strip);

Trajectory run(const ModelSpec& spec, const State& u0, double t_end, const SolverConfig& config);

struct VorticityTrajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<SpectralField> omega;
  std::vector<double> circulation, enstrophy;
  double dt = 0.0;
};

VorticityTrajectory run_euler2d(const SpectralField& omega0, double t_end,
                                const SolverConfig& config);

// Free linear evolution e^{-(t/eps)A} U0; in 2D the velocity is the gradient part only.
State corrector_reference(const ModelSpec& spec, const State& u0, double t);

// Plain-text header plus float64 arrays; diagnostics as CSV.
void write_trajectory(const Trajectory& traj, const std::string& dir);
void write_diagnostics_csv(const Trajectory& traj, const std::string& path);
struct LoadedTrajectory {
  Grid grid;
  ModelSpec model;
  std::vector<double> times;
  // [snapshot][component][point]; components are zeta, V_1, ..., V_dim
  std::vector<std::vector<std::vector<double>>> fields;
};
LoadedTrajectory read_trajectory(const std::string& dir);

}  // namespace rigidlid
