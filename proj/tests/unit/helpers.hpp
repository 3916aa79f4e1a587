#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rigidlid/spectral.hpp"

namespace th {

inline std::vector<double> random_field(const rigidlid::Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> f(g.physical_size());
  for (auto& v : f) v = n(rng);
  return f;
}

// random field with the top third of the spectrum removed
inline rigidlid::SpectralField smooth_random(const rigidlid::Grid& g, unsigned seed) {
  auto sf = rigidlid::transform_forward(random_field(g, seed), g);
  const auto& k = g.kabs();
  for (std::size_t i = 0; i < sf.size(); ++i)
    if (k[i] > g.k_max() / 3.0) sf[i] = 0.0;
  sf[0] = 0.0;
  return sf;
}

inline double max_diff(const rigidlid::SpectralField& a, const rigidlid::SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const rigidlid::SpectralField& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

inline std::vector<double> gaussian(const rigidlid::Grid& g, double amp, double w, double x0 = 0.0,
                                    double y0 = 0.0) {
  std::vector<double> f(g.physical_size());
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) f[i] = amp * std::exp(-std::pow((g.x(i) - x0) / w, 2));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        f[i * n + j] = amp * std::exp(-(std::pow(g.x(i) - x0, 2) + std::pow(g.x(j) - y0, 2)) / (w * w));
  }
  return f;
}

// (1 - r^2/w^2) exp(-r^2/w^2) in 2D: radial with zero integral
inline std::vector<double> zero_mean_vortex(const rigidlid::Grid& g, double amp, double w) {
  std::vector<double> f(g.physical_size());
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r2 = (g.x(i) * g.x(i) + g.x(j) * g.x(j)) / (w * w);
      f[i * n + j] = amp * (1 - r2) * std::exp(-r2);
    }
  return f;
}

}  // namespace th
