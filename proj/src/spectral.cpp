#include "rigidlid/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace rigidlid {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::ShapeMismatch: return "shape mismatch";
    case ErrorCode::NonFinite: return "non-finite value";
    case ErrorCode::Inadmissible: return "inadmissible parameters";
    case ErrorCode::Degenerate: return "degenerate phase";
    case ErrorCode::DepthFloor: return "depth floor violated";
    case ErrorCode::Boundary: return "boundary contamination";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::Resolution: return "insufficient resolution";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::UnknownTag: return "unknown tag";
  }
  return "unknown error";
}

// ---------------------------------------------------------------- Grid

Grid::Grid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
  require(dim == 1 || dim == 2, ErrorCode::InvalidArgument, "grid dim must be 1 or 2");
  require(n >= 8 && n % 2 == 0, ErrorCode::InvalidArgument,
          "grid modes per axis must be even and >= 8");
  require(std::isfinite(length) && length > 0.0, ErrorCode::InvalidArgument,
          "grid length must be positive");
  auto t = std::make_shared<Tables>();
  const double dk = 2.0 * std::numbers::pi / length;
  const int h = n / 2 + 1;
  const std::size_t ns = spectral_size();
  for (int a = 0; a < dim; ++a) {
    t->k[a].resize(ns);
    t->k_odd[a].resize(ns);
  }
  t->kabs.resize(ns);
  t->weight.resize(ns);
  t->nyquist.assign(ns, 0);
  if (dim == 1) {
    for (int j = 0; j < h; ++j) {
      t->k[0][j] = dk * j;
      t->k_odd[0][j] = (j == n / 2) ? 0.0 : dk * j;
      t->kabs[j] = dk * j;
      t->weight[j] = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      t->nyquist[j] = (j == n / 2);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const int ki = (i < n / 2) ? i : i - n;
      for (int j = 0; j < h; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * h + j;
        t->k[0][idx] = dk * ki;
        t->k[1][idx] = dk * j;
        t->k_odd[0][idx] = (i == n / 2) ? 0.0 : dk * ki;
        t->k_odd[1][idx] = (j == n / 2) ? 0.0 : dk * j;
        t->kabs[idx] = dk * std::hypot(double(ki), double(j));
        t->weight[idx] = (j == 0 || j == n / 2) ? 1.0 : 2.0;
        t->nyquist[idx] = (i == n / 2 || j == n / 2);
      }
    }
  }
  tables_ = std::move(t);
}

std::size_t Grid::physical_size() const {
  return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * n_;
}
std::size_t Grid::spectral_size() const {
  return dim_ == 1 ? std::size_t(half()) : std::size_t(n_) * half();
}
double Grid::cell() const { return dim_ == 1 ? dx() : dx() * dx(); }
double Grid::k_max() const { return 2.0 * std::numbers::pi / length_ * (n_ / 2 - 1); }

const std::vector<double>& Grid::k(int axis) const {
  require(axis >= 0 && axis < dim_, ErrorCode::InvalidArgument, "axis out of range");
  return tables_->k[axis];
}
const std::vector<double>& Grid::k_odd(int axis) const {
  require(axis >= 0 && axis < dim_, ErrorCode::InvalidArgument, "axis out of range");
  return tables_->k_odd[axis];
}
const std::vector<double>& Grid::kabs() const { return tables_->kabs; }
const std::vector<double>& Grid::weight() const { return tables_->weight; }
const std::vector<unsigned char>& Grid::nyquist() const { return tables_->nyquist; }

// ------------------------------------------------------- SpectralField

SpectralField::SpectralField(const Grid& g, std::vector<cplx> c) : grid_(g), c_(std::move(c)) {
  require(c_.size() == g.spectral_size(), ErrorCode::ShapeMismatch,
          "coefficient array does not match grid");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require(grid_ == o.grid_, ErrorCode::ShapeMismatch, "grid mismatch in +=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require(grid_ == o.grid_, ErrorCode::ShapeMismatch, "grid mismatch in -=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}
SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}
void SpectralField::axpy(double s, const SpectralField& o) {
  require(grid_ == o.grid_, ErrorCode::ShapeMismatch, "grid mismatch in axpy");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * o.c_[i];
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

// ----------------------------------------------------------- FFT plans

namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex plan_mutex;

// Plans are created once per (dim, n) and never destroyed; execution goes
// through the new-array interface, which FFTW documents as thread safe.
const Plans& plans_for(int dim, int n) {
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find({dim, n});
  if (it != cache.end()) return it->second;
  const std::size_t np = dim == 1 ? n : std::size_t(n) * n;
  const std::size_t ns = dim == 1 ? n / 2 + 1 : std::size_t(n) * (n / 2 + 1);
  double* in = fftw_alloc_real(np);
  fftw_complex* out = fftw_alloc_complex(ns);
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim == 1) {
    p.r2c = fftw_plan_dft_r2c_1d(n, in, out, flags);
    p.c2r = fftw_plan_dft_c2r_1d(n, out, in, flags);
  } else {
    p.r2c = fftw_plan_dft_r2c_2d(n, n, in, out, flags);
    p.c2r = fftw_plan_dft_c2r_2d(n, n, out, in, flags);
  }
  fftw_free(in);
  fftw_free(out);
  if (!p.r2c || !p.c2r) fail(ErrorCode::InvalidArgument, "FFTW planning failed");
  return cache.emplace(std::make_pair(dim, n), p).first->second;
}

double unitary_scale(const Grid& g) { return 1.0 / std::sqrt(double(g.physical_size())); }

}  // namespace

SpectralField transform_forward(const std::vector<double>& field, const Grid& grid) {
  require(field.size() == grid.physical_size(), ErrorCode::ShapeMismatch,
          "physical array does not match grid");
  const Plans& p = plans_for(grid.dim(), grid.n());
  std::vector<double> in(field);
  SpectralField out(grid);
  fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.coeffs().data()));
  out *= unitary_scale(grid);
  return out;
}

std::vector<double> transform_backward(const SpectralField& sf) {
  const Grid& grid = sf.grid();
  require(sf.size() == grid.spectral_size(), ErrorCode::ShapeMismatch,
          "spectral array does not match grid");
  const Plans& p = plans_for(grid.dim(), grid.n());
  std::vector<cplx> in(sf.coeffs());  // c2r overwrites its input
  std::vector<double> out(grid.physical_size());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double s = unitary_scale(grid);
  for (auto& v : out) v *= s;
  return out;
}

void enforce_symmetry(SpectralField& sf) {
  const Grid& g = sf.grid();
  auto& c = sf.coeffs();
  const int n = g.n();
  const int h = g.half();
  if (g.dim() == 1) {
    c[0] = cplx(c[0].real(), 0.0);
    c[n / 2] = cplx(c[n / 2].real(), 0.0);
    return;
  }
  for (int col : {0, n / 2}) {
    for (int i = 0; i <= n / 2; ++i) {
      const int mi = (n - i) % n;
      auto& a = c[std::size_t(i) * h + col];
      auto& b = c[std::size_t(mi) * h + col];
      if (i == mi) {
        a = cplx(a.real(), 0.0);
      } else {
        const cplx avg = 0.5 * (a + std::conj(b));
        a = avg;
        b = std::conj(avg);
      }
    }
  }
}

void zero_nyquist(SpectralField& sf) {
  const auto& ny = sf.grid().nyquist();
  auto& c = sf.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (ny[i]) c[i] = 0.0;
}

// ------------------------------------------------------------- padding

int padded_size(int n, int num, int den) {
  int m = (n * num + den - 1) / den;
  if (m % 2) ++m;
  return m;
}

namespace {

// Copy the non-Nyquist modes between grids of sizes n (src) and m (dst).
void copy_modes(const std::vector<cplx>& src, int n, std::vector<cplx>& dst, int m, int dim,
                double scale) {
  const int lim = std::min(n, m) / 2;  // strictly below Nyquist of the smaller grid
  if (dim == 1) {
    for (int j = 0; j < lim; ++j) dst[j] = scale * src[j];
    return;
  }
  const int hn = n / 2 + 1;
  const int hm = m / 2 + 1;
  for (int k = -lim + 1; k < lim; ++k) {
    const int is = k >= 0 ? k : n + k;
    const int id = k >= 0 ? k : m + k;
    for (int j = 0; j < lim; ++j)
      dst[std::size_t(id) * hm + j] = scale * src[std::size_t(is) * hn + j];
  }
}

}  // namespace

SpectralField pad(const SpectralField& sf, int m) {
  const Grid& g = sf.grid();
  require(m >= g.n() && m % 2 == 0, ErrorCode::InvalidArgument, "bad padded size");
  Grid fine(g.dim(), m, g.length());
  SpectralField out(fine);
  const double scale = std::pow(double(m) / g.n(), 0.5 * g.dim());
  copy_modes(sf.coeffs(), g.n(), out.coeffs(), m, g.dim(), scale);
  return out;
}

SpectralField truncate(const SpectralField& sf, const Grid& coarse) {
  const Grid& g = sf.grid();
  require(g.dim() == coarse.dim() && g.n() >= coarse.n() && g.length() == coarse.length(),
          ErrorCode::ShapeMismatch, "cannot truncate to a finer grid");
  SpectralField out(coarse);
  const double scale = std::pow(double(coarse.n()) / g.n(), 0.5 * g.dim());
  copy_modes(sf.coeffs(), g.n(), out.coeffs(), coarse.n(), g.dim(), scale);
  enforce_symmetry(out);
  return out;
}

std::vector<double> padded_physical(const SpectralField& sf, int m) {
  if (m == sf.grid().n()) {
    SpectralField s(sf);
    zero_nyquist(s);
    return transform_backward(s);
  }
  return transform_backward(pad(sf, m));
}

SpectralField from_padded_physical(const std::vector<double>& f, const Grid& coarse, int m) {
  Grid fine(coarse.dim(), m, coarse.length());
  return truncate(transform_forward(f, fine), coarse);
}

// ------------------------------------------------------------ calculus

SpectralField derivative(const SpectralField& sf, int axis) {
  const auto& k = sf.grid().k_odd(axis);
  SpectralField out(sf);
  auto& c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= cplx(0.0, k[i]);
  return out;
}

VectorField gradient(const SpectralField& sf) {
  VectorField v;
  for (int a = 0; a < sf.grid().dim(); ++a) v.push_back(derivative(sf, a));
  return v;
}

SpectralField divergence(const VectorField& v) {
  require(!v.empty() && int(v.size()) == v[0].grid().dim(), ErrorCode::ShapeMismatch,
          "vector field has wrong number of components");
  SpectralField out = derivative(v[0], 0);
  for (std::size_t a = 1; a < v.size(); ++a) out += derivative(v[a], int(a));
  return out;
}

SpectralField perp_divergence(const VectorField& v) {
  require(v.size() == 2 && v[0].grid().dim() == 2, ErrorCode::InvalidArgument,
          "perp divergence needs a 2D vector field");
  return derivative(v[1], 0) - derivative(v[0], 1);
}

VectorField perp_gradient(const SpectralField& sf) {
  require(sf.grid().dim() == 2, ErrorCode::InvalidArgument, "perp gradient needs a 2D grid");
  VectorField v{derivative(sf, 1), derivative(sf, 0)};
  v[0] *= -1.0;
  return v;
}

SpectralField inverse_laplacian(const SpectralField& sf) {
  const auto& kk = sf.grid().kabs();
  SpectralField out(sf);
  auto& c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = kk[i] > 0.0 ? -c[i] / (kk[i] * kk[i]) : cplx(0.0);
  return out;
}

double l2_squared(const SpectralField& sf) {
  const auto& w = sf.grid().weight();
  const auto& c = sf.coeffs();
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += w[i] * std::norm(c[i]);
  return s * sf.grid().cell();
}

double l2_norm(const SpectralField& sf) { return std::sqrt(l2_squared(sf)); }

double mean_value(const SpectralField& sf) {
  const Grid& g = sf.grid();
  return sf[0].real() / std::sqrt(double(g.physical_size()));
}

}  // namespace rigidlid
