#pragma once

#include <array>
#include <string>

#include "rigidlid/spectral.hpp"

namespace rigidlid {

enum class ModelKind { Classical, Abcd, GreenNaghdi };

const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct AbcdParams {
  double a = 0.0, b = 0.0, c = 0.0, d = 1.0 / 3.0;

  double sum() const { return a + b + c + d; }
  bool admissible() const { return b >= 0.0 && d >= 0.0 && a <= 0.0 && c <= 0.0; }
  // ((a+b)(a+d)(c+b)(c+d))^2 + (a+b+c+d)^2 > 0
  bool nondegenerate() const;
};

struct ModelSpec {
  ModelKind kind = ModelKind::Classical;
  int dim = 1;
  double eps = 0.1;
  double mu = 1.0;
  AbcdParams abcd;  // ignored unless kind == Abcd
  double h0 = 0.5;

  // The parameters that define the linear part; classical and GN use (0,0,0,1/3).
  AbcdParams linear_abcd() const;
  void validate() const;
};

// Unknowns (zeta, V) stored spectrally; v has one component per axis.
struct State {
  double t = 0.0;
  SpectralField zeta;
  VectorField v;

  const Grid& grid() const { return zeta.grid(); }
  void axpy(double s, const State& o);
  State& operator*=(double s);
};

State make_state(const Grid& grid, double t = 0.0);
State state_from_physical(const Grid& grid, const std::vector<double>& zeta,
                          const std::vector<std::vector<double>>& v);

using Mat2 = std::array<cplx, 4>;  // row-major 2x2

// (1 - mu a xi^2)/(1 + mu b xi^2) and (1 - mu c xi^2)/(1 + mu d xi^2)
double symbol_p(const ModelSpec& spec, double xi);
double symbol_q(const ModelSpec& spec, double xi);
// |xi| sqrt(pq) = g(sqrt(mu)|xi|)/sqrt(mu)
double frequency(const ModelSpec& spec, double xi);
double amplitude_ratio(const ModelSpec& spec, double xi);  // sqrt(p/q)

// 1D acts on (zeta, V) with signed xi; 2D acts on (zeta, div V) with xi = |xi|.
Mat2 linear_symbol(const ModelSpec& spec, double xi);
Mat2 semigroup_symbol(const ModelSpec& spec, double xi, double tau);  // exp(-tau A)
Mat2 mat_mul(const Mat2& x, const Mat2& y);

// exp(-tau A(D)) on a whole grid. In 2D the rotational part of V is left alone.
class Propagator {
 public:
  Propagator(const ModelSpec& spec, const Grid& grid, double tau);
  State apply(const State& u) const;
  double tau() const { return tau_; }

 private:
  int dim_;
  double tau_;
  std::vector<double> cos_, a12_, a21_;  // 1D: e12 = -i a12, e21 = -i a21; 2D: see apply
  std::vector<double> inv_k2_;
};

// Conserved quadratic form of the linear flow.
double linear_energy(const ModelSpec& spec, const State& u);
double mass(const State& u);  // integral of zeta

struct NonlinearOptions {
  bool enabled = true;
  bool gn_time_terms = true;  // GN: keep the (T - T0) correction
  bool gn_freeze_depth = false;
  bool gn_drop_q = false;
  bool gn_check_floor = true;  // false: only positivity of the depth is required
  double gn_tol = 1e-10;
  int gn_max_iter = 400;
};

// F(U) in dU/dt = -(1/eps) A(D) U + F(U).
State nonlinearity(const ModelSpec& spec, const State& u, const NonlinearOptions& opt = {});

// Minimum of 1 + eps*zeta on the grid.
double min_depth(const ModelSpec& spec, const State& u);

}  // namespace rigidlid
