#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rigidlid/error.hpp"
#include "rigidlid/grid.hpp"

namespace rigidlid {

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid_(g), c_(g.spectral_size(), cplx(0.0)) {}
  SpectralField(const Grid& g, std::vector<cplx> c);

  const Grid& grid() const { return grid_; }
  std::vector<cplx>& coeffs() { return c_; }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }
  cplx& operator[](std::size_t i) { return c_[i]; }
  const cplx& operator[](std::size_t i) const { return c_[i]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  // this += s * o
  void axpy(double s, const SpectralField& o);

 private:
  Grid grid_;
  std::vector<cplx> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

using VectorField = std::vector<SpectralField>;  // one component per axis

// Unitary transforms: each axis carries 1/sqrt(n).
SpectralField transform_forward(const std::vector<double>& field, const Grid& grid);
std::vector<double> transform_backward(const SpectralField& sf);

// Zero the imaginary part of self-conjugate modes and symmetrize the
// self-conjugate column in 2D.
void enforce_symmetry(SpectralField& sf);
void zero_nyquist(SpectralField& sf);

// Padding helpers for dealiased products. Values in physical space are preserved.
int padded_size(int n, int factor_num, int factor_den);
SpectralField pad(const SpectralField& sf, int m);
SpectralField truncate(const SpectralField& sf, const Grid& coarse);

// Physical samples of sf on an m-point grid.
std::vector<double> padded_physical(const SpectralField& sf, int m);
// Inverse of the above followed by truncation to the coarse grid (Nyquist zeroed).
SpectralField from_padded_physical(const std::vector<double>& f, const Grid& coarse, int m);

// Spectral calculus with the odd (Nyquist-free) wavenumbers.
SpectralField derivative(const SpectralField& sf, int axis);
VectorField gradient(const SpectralField& sf);
SpectralField divergence(const VectorField& v);
SpectralField perp_divergence(const VectorField& v);  // d1 v2 - d2 v1
VectorField perp_gradient(const SpectralField& sf);   // (-d2 f, d1 f)
SpectralField inverse_laplacian(const SpectralField& sf);  // zero mode -> 0

// Weighted squared L2 norm via Parseval, and the plain physical value.
double l2_squared(const SpectralField& sf);
double l2_norm(const SpectralField& sf);
double mean_value(const SpectralField& sf);

}  // namespace rigidlid
