#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rigidlid/model.hpp"

namespace rigidlid {

struct Trajectory;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Which part of a state is measured.
enum class Components {
  All,       // (zeta, V)
  Zeta,
  Velocity,
  GradPart,  // (zeta, P_grad V); equals All in 1D
  RotPart,   // P_rot V (2D only)
};

const char* to_string(Components c);

std::vector<std::vector<double>> physical_components(const State& u, Components which);

// Pointwise Euclidean magnitude over components, then the grid L^r norm.
double spatial_norm(const std::vector<std::vector<double>>& comps, const Grid& grid, double r);
double spatial_norm(const std::vector<double>& f, const Grid& grid, double r);

struct MixedNormSpec {
  double q = kInf;
  double r = 2.0;
  std::string tag;  // scaling relation the pair is meant to satisfy
  // residual of 1/q + 1/(k r) = 1/c for the given k, c
  double constraint_residual(double k, double c) const;
};

struct NormSeries {
  std::vector<double> times;
  std::vector<double> values;  // spatial norm per snapshot
  double value = 0.0;          // mixed norm
  std::string quadrature = "trapezoid";
  bool sparse = false;  // fewer than min_density snapshots per unit time
};

NormSeries mixed_norm(const std::vector<double>& times,
                      const std::vector<std::vector<std::vector<double>>>& snapshots,
                      const Grid& grid, const MixedNormSpec& spec, double min_density = 16.0);
NormSeries mixed_norm(const Trajectory& traj, Components which, const MixedNormSpec& spec,
                      double min_density = 16.0);

double sobolev_norm(const SpectralField& f, double s);
double x_k_mu_norm(const State& u, int k, double mu);

struct MorawetzOptions {
  double spacing = 0.5;  // x0 lattice spacing; 0 uses every grid point
  double margin = 6.5;   // keep x0 this far from the edges so the weight is below 1e-16 there
};

struct MorawetzResult {
  double value = 0.0;
  std::vector<double> argmax;  // best x0
};

MorawetzResult morawetz_norm(const std::vector<double>& times,
                             const std::vector<std::vector<std::vector<double>>>& snapshots,
                             const Grid& grid, const MorawetzOptions& opt = {});
MorawetzResult morawetz_norm(const Trajectory& traj, Components which,
                             const MorawetzOptions& opt = {});

}  // namespace rigidlid
