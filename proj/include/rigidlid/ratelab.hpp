#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rigidlid/model.hpp"
#include "rigidlid/norms.hpp"
#include "rigidlid/solver.hpp"

namespace rigidlid {

enum class Comparison { SemigroupCorrector, EulerRotational, Zero };
enum class NormKind { LqLr, Morawetz };
enum class FitModel { PurePower, PowerWithLog };

const char* to_string(Comparison c);
const char* to_string(NormKind k);
const char* to_string(FitModel f);
Comparison comparison_from_string(const std::string& s);
NormKind norm_kind_from_string(const std::string& s);
FitModel fit_model_from_string(const std::string& s);

// Initial data: Gaussian bump in zeta; in 2D the velocity is
// grad_amp * grad(phi) + rot_amp * grad_perp(psi), psi two bumps at (+-offset, 0).
struct InitialData {
  double zeta_amp = 0.4;
  double width = 1.0;
  double v_amp = 0.0;  // 1D: V0 = v_amp exp(-x^2/w^2)
  double grad_amp = 0.3;
  double rot_amp = 0.5;
  double vortex_offset = 0.6;
  double noise = 0.0;  // relative amplitude of seeded smooth noise
  std::uint64_t seed = 0;
};

State make_initial_state(const Grid& grid, const InitialData& init);

struct NormRequest {
  Comparison comparison = Comparison::SemigroupCorrector;
  NormKind kind = NormKind::LqLr;
  double q = kInf, r = 2.0;
  std::string target_expr;  // "1/4", "1/(2p)", "sigma/2", "1/(2p0)", ...
  double target = 0.0;      // resolved
  FitModel fit = FitModel::PurePower;
  std::vector<double> mus;  // empty: every mu of the sweep
  bool mu_uniform = false;  // also check slope spread across mu
  double flag_floor = -1.0;  // slopes in [flag_floor - tol, target - tol) are flagged
  std::string key() const;
};

struct ExperimentSpec {
  std::string tag;
  ModelSpec model;  // eps and mu are overwritten per cell
  int n = 1024;
  double length = 200.0;
  InitialData init;
  SolverConfig solver;
  double t_end = 0.3;
  int n_snapshots = 60;
  std::vector<double> eps_list;
  std::vector<double> mu_list{1.0};
  double mu_power = 1.0;  // fit abscissa eps / mu^mu_power
  double tolerance = 0.1;
  std::vector<NormRequest> norms;

  void validate() const;
  std::vector<double> snapshot_times() const;
};

struct RawRow {
  std::string theorem_tag, model;
  double eps = 0.0, mu = 0.0, q = 0.0, r = 0.0;
  std::string norm_kind, comparison;
  double value = 0.0;
  std::string run_status = "ok";
};

struct RawTable {
  std::vector<RawRow> rows;
  int failed_cells = 0;
};

struct FitResult {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

// Least squares of log(value) on log(x); x = eps for pure_power and
// eps ln(1 + mu T / eps^2) / sqrt(mu) for power_with_log.
FitResult fit_rate(const std::vector<double>& eps, const std::vector<double>& values,
                   FitModel model = FitModel::PurePower, double mu = 1.0, double t_end = 1.0);
double fit_abscissa(double eps, FitModel model, double mu, double t_end, double mu_power);

// Error snapshots of a trajectory against the comparison object.
std::vector<std::vector<std::vector<double>>> comparison_snapshots(
    const Trajectory& traj, const State& u0, Comparison c, const VorticityTrajectory* euler);

struct SweepOptions {
  int jobs = 1;
  bool quiet = true;
};

// Runs every (eps, mu) cell; solver aborts are recorded per cell.
RawTable run_sweep(const ExperimentSpec& spec, const SweepOptions& opt = {});

struct NormFit {
  std::string key;
  NormRequest norm;
  double mu = 1.0;
  std::vector<double> eps, values;
  bool fitted = false;
  FitResult fit;
  std::string verdict;  // pass, fail, flag, none
};

struct Uniformity {
  std::string key;
  std::vector<double> mus, slopes;
  double variation = 0.0;
  bool pass = false;
};

struct RateReport {
  std::string tag;
  std::vector<NormFit> fits;
  std::vector<Uniformity> uniformity;
  bool all_pass = false;
  int failed_cells = 0;
};

RateReport fit_report(const ExperimentSpec& spec, const RawTable& table);

// Writes raw.csv, spec.json, report.json and one SVG per norm into dir.
void render_report(const ExperimentSpec& spec, const RawTable& table, const RateReport& report,
                   const std::string& dir);
// Re-renders report.json and plots from raw.csv and spec.json in dir.
RateReport rerender_report(const std::string& dir);

void write_raw_csv(const RawTable& table, const std::string& path);
RawTable read_raw_csv(const std::string& path);

std::vector<std::string> theorem_tags();
// Loads the preset for tag from the preset directory and resolves target exponents.
// overrides is a JSON merge patch applied after the smoke section.
ExperimentSpec theorem_suite(const std::string& tag, bool smoke = false,
                             const std::string& preset_dir = "",
                             const std::string& overrides = "");
// Resolves target expressions against the phase of the model's linear part.
void resolve_targets(ExperimentSpec& spec);
double resolve_target(const std::string& expr, const ModelSpec& model);

}  // namespace rigidlid
