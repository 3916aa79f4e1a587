#include "rigidlid/multiplier.hpp"

#include <algorithm>
#include <cmath>

namespace rigidlid {

std::vector<cplx> multiplier_symbol(const Grid& grid, const MultiplierSpec& m) {
  const auto& kk = grid.kabs();
  const std::size_t ns = grid.spectral_size();
  std::vector<cplx> s(ns);
  if (m.weight != WeightKind::None)
    require(m.axis >= 0 && m.axis < grid.dim(), ErrorCode::InvalidArgument,
            "multiplier weight axis out of range");
  for (std::size_t i = 0; i < ns; ++i) {
    double r = 1.0;
    if (kk[i] == 0.0)
      r = m.zero_value;
    else if (m.radial)
      r = m.radial(kk[i]);
    if (!std::isfinite(r))
      fail(ErrorCode::NonFinite, "multiplier symbol is not finite at |xi|=" + num(kk[i]));
    cplx w = 1.0;
    if (m.weight == WeightKind::Derivative) {
      w = cplx(0.0, grid.k_odd(m.axis)[i]);
    } else if (m.weight == WeightKind::Riesz) {
      w = kk[i] > 0.0 ? cplx(0.0, grid.k_odd(m.axis)[i] / kk[i]) : cplx(0.0);
    }
    s[i] = r * w;
  }
  return s;
}

SpectralField apply_multiplier(const SpectralField& sf, const MultiplierSpec& m) {
  const auto s = multiplier_symbol(sf.grid(), m);
  SpectralField out(sf);
  auto& c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s[i];
  return out;
}

SpectralField apply_symbol(const SpectralField& sf, const std::vector<double>& symbol) {
  require(symbol.size() == sf.size(), ErrorCode::ShapeMismatch, "symbol size mismatch");
  SpectralField out(sf);
  auto& c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol[i];
  return out;
}

namespace {

void check_2d(const VectorField& v) {
  require(v.size() == 2 && v[0].grid().dim() == 2 && v[1].grid() == v[0].grid(),
          ErrorCode::InvalidArgument, "projector needs a 2D vector field");
}

}  // namespace

VectorField riesz_gradient_projector(const VectorField& v) {
  check_2d(v);
  const Grid& g = v[0].grid();
  const auto& k0 = g.k_odd(0);
  const auto& k1 = g.k_odd(1);
  VectorField out{SpectralField(g), SpectralField(g)};
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double kk = k0[i] * k0[i] + k1[i] * k1[i];
    if (kk == 0.0) continue;
    const cplx s = (k0[i] * v[0][i] + k1[i] * v[1][i]) / kk;
    out[0][i] = k0[i] * s;
    out[1][i] = k1[i] * s;
  }
  return out;
}

VectorField riesz_rotational_projector(const VectorField& v) {
  check_2d(v);
  const Grid& g = v[0].grid();
  const auto& k0 = g.k_odd(0);
  const auto& k1 = g.k_odd(1);
  VectorField out{SpectralField(g), SpectralField(g)};
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double kk = k0[i] * k0[i] + k1[i] * k1[i];
    if (kk == 0.0) continue;
    // xi_perp = (-k1, k0)
    const cplx s = (-k1[i] * v[0][i] + k0[i] * v[1][i]) / kk;
    out[0][i] = -k1[i] * s;
    out[1][i] = k0[i] * s;
  }
  return out;
}

// ------------------------------------------------------------- filters

namespace {
double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = psi(t);
  return a / (a + psi(1.0 - t));
}

double phi0(double y) { return 1.0 - smooth_step(2.0 * std::abs(y) - 1.0); }

double dyadic_symbol(int j, double y) {
  return phi0(std::ldexp(y, -j - 1)) - phi0(std::ldexp(y, -j));
}

std::pair<int, int> dyadic_range(const Grid& grid) {
  const double kmin = 2.0 * std::acos(-1.0) / grid.length();
  const double kmax = grid.kabs().empty() ? kmin : *std::max_element(grid.kabs().begin(), grid.kabs().end());
  // P_j lives on [2^(j-1), 2^(j+1)]
  const int jlo = int(std::floor(std::log2(kmin))) - 1;
  const int jhi = int(std::ceil(std::log2(kmax))) + 1;
  return {jlo, jhi};
}

SpectralField dyadic_filter(const SpectralField& sf, int j) {
  MultiplierSpec m;
  m.radial = [j](double r) { return dyadic_symbol(j, r); };
  m.zero_value = 0.0;
  return apply_multiplier(sf, m);
}

SpectralField low_block(const SpectralField& sf, int j) {
  MultiplierSpec m;
  m.radial = [j](double r) { return phi0(std::ldexp(r, -j)); };
  m.zero_value = 1.0;
  return apply_multiplier(sf, m);
}

SpectralField lowpass_cutoff(const SpectralField& sf, double mu,
                             const std::function<double(double)>& chi) {
  require(mu > 0.0, ErrorCode::InvalidArgument, "cutoff needs mu > 0");
  const double sm = std::sqrt(mu);
  MultiplierSpec m;
  m.radial = [&chi, sm](double r) { return chi(sm * r); };
  m.zero_value = chi(0.0);
  return apply_multiplier(sf, m);
}

WeightedField gaussian_weight(const std::vector<double>& field, const Grid& grid,
                              const std::vector<double>& x0) {
  require(field.size() == grid.physical_size(), ErrorCode::ShapeMismatch,
          "field does not match grid");
  require(int(x0.size()) == grid.dim(), ErrorCode::InvalidArgument,
          "x0 must have one coordinate per axis");
  const double half = 0.5 * grid.length();
  double edge = half;
  for (double c : x0) {
    require(c >= -half && c < half, ErrorCode::InvalidArgument, "x0 outside the domain");
    edge = std::min(edge, std::min(c + half, half - c));
  }
  WeightedField out;
  out.values.resize(field.size());
  out.boundary_warning = std::exp(-edge * edge) > 1e-16;
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double d = grid.x(i) - x0[0];
      out.values[i] = field[i] * std::exp(-d * d);
    }
  } else {
    std::vector<double> wy(n);
    for (int j = 0; j < n; ++j) {
      const double d = grid.x(j) - x0[1];
      wy[j] = std::exp(-d * d);
    }
    for (int i = 0; i < n; ++i) {
      const double d = grid.x(i) - x0[0];
      const double wx = std::exp(-d * d);
      for (int j = 0; j < n; ++j) {
        const std::size_t idx = std::size_t(i) * n + j;
        out.values[idx] = field[idx] * wx * wy[j];
      }
    }
  }
  return out;
}

}  // namespace rigidlid
