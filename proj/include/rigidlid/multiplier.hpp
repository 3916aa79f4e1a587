#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rigidlid/spectral.hpp"

namespace rigidlid {

enum class WeightKind { None, Derivative, Riesz };

struct MultiplierSpec {
  std::function<double(double)> radial;  // m(|xi|); empty means 1
  double zero_value = 1.0;               // value used at xi = 0
  WeightKind weight = WeightKind::None;  // Derivative: i xi_a, Riesz: i xi_a/|xi| (0 at 0)
  int axis = 0;
};

// Symbol value on every spectral index (radial part times weight).
std::vector<cplx> multiplier_symbol(const Grid& grid, const MultiplierSpec& m);
SpectralField apply_multiplier(const SpectralField& sf, const MultiplierSpec& m);
// Elementwise product with a precomputed real symbol.
SpectralField apply_symbol(const SpectralField& sf, const std::vector<double>& symbol);

VectorField riesz_gradient_projector(const VectorField& v);
VectorField riesz_rotational_projector(const VectorField& v);

// Smooth bump: 1 on [0,1/2], 0 beyond 1, C-infinity in between.
double smooth_step(double t);
double phi0(double y);
double dyadic_symbol(int j, double y);
// j range whose blocks touch nonzero grid modes, and a j above which the
// low block phi0(2^-j |xi|) equals 1 on every mode.
std::pair<int, int> dyadic_range(const Grid& grid);

SpectralField dyadic_filter(const SpectralField& sf, int j);
SpectralField low_block(const SpectralField& sf, int j);  // phi0(2^-j |xi|)
SpectralField lowpass_cutoff(const SpectralField& sf, double mu,
                             const std::function<double(double)>& chi = phi0);

struct WeightedField {
  std::vector<double> values;
  bool boundary_warning = false;  // weight above 1e-16 at the box edge
};

// Multiply by exp(-|x - x0|^2), Euclidean distance.
WeightedField gaussian_weight(const std::vector<double>& field, const Grid& grid,
                              const std::vector<double>& x0);

}  // namespace rigidlid
