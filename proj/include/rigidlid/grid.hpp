#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace rigidlid {

using cplx = std::complex<double>;

// Periodic box [-L/2, L/2)^dim with n points per axis.
// Spectral storage is the r2c half spectrum: 1D has n/2+1 modes,
// 2D is row-major [n][n/2+1] with axis 0 full and axis 1 halved.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, int n, double length);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  int half() const { return n_ / 2 + 1; }
  std::size_t physical_size() const;
  std::size_t spectral_size() const;
  double dx() const { return length_ / n_; }
  double cell() const;  // dx^dim
  double x(int i) const { return -0.5 * length_ + i * dx(); }
  double k_max() const;  // largest resolved |k| along an axis

  // Per spectral index.
  const std::vector<double>& k(int axis) const;      // signed wavenumber
  const std::vector<double>& k_odd(int axis) const;  // Nyquist set to 0
  const std::vector<double>& kabs() const;           // |xi|
  const std::vector<double>& weight() const;         // 1 or 2 (half-spectrum multiplicity)
  const std::vector<unsigned char>& nyquist() const; // 1 on modes touching a Nyquist index

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  struct Tables {
    std::vector<double> k[2], k_odd[2], kabs, weight;
    std::vector<unsigned char> nyquist;
  };
  int dim_ = 0;
  int n_ = 0;
  double length_ = 0.0;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace rigidlid
