#include "rigidlid/model.hpp"

#include <algorithm>
#include <cmath>

#include "rigidlid/green_naghdi.hpp"
#include "rigidlid/multiplier.hpp"

namespace rigidlid {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Classical: return "classical";
    case ModelKind::Abcd: return "abcd";
    case ModelKind::GreenNaghdi: return "green_naghdi";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "classical") return ModelKind::Classical;
  if (s == "abcd") return ModelKind::Abcd;
  if (s == "green_naghdi" || s == "gn") return ModelKind::GreenNaghdi;
  fail(ErrorCode::Config, "unknown model kind '" + s + "'");
}

bool AbcdParams::nondegenerate() const {
  const double prod = (a + b) * (a + d) * (c + b) * (c + d);
  return prod * prod + sum() * sum() > 0.0;
}

AbcdParams ModelSpec::linear_abcd() const {
  return kind == ModelKind::Abcd ? abcd : AbcdParams{};
}

void ModelSpec::validate() const {
  require(dim == 1 || dim == 2, ErrorCode::InvalidArgument, "model dim must be 1 or 2");
  require(eps > 0.0 && eps <= 1.0, ErrorCode::InvalidArgument, "eps must lie in (0,1]");
  require(mu > 0.0 && mu <= 1.0, ErrorCode::InvalidArgument, "mu must lie in (0,1]");
  require(std::isfinite(h0), ErrorCode::InvalidArgument, "h0 must be finite");
  if (kind == ModelKind::GreenNaghdi)
    require(h0 > 0.0, ErrorCode::InvalidArgument, "Green-Naghdi needs h0 > 0");
  if (kind == ModelKind::Abcd) {
    require(std::isfinite(abcd.a) && std::isfinite(abcd.b) && std::isfinite(abcd.c) &&
                std::isfinite(abcd.d),
            ErrorCode::InvalidArgument, "abcd parameters must be finite");
    require(abcd.admissible(), ErrorCode::Inadmissible,
            "abcd parameters need b >= 0, d >= 0, a <= 0, c <= 0");
  }
}

// --------------------------------------------------------------- State

void State::axpy(double s, const State& o) {
  zeta.axpy(s, o.zeta);
  for (std::size_t a = 0; a < v.size(); ++a) v[a].axpy(s, o.v[a]);
}

State& State::operator*=(double s) {
  zeta *= s;
  for (auto& c : v) c *= s;
  return *this;
}

State make_state(const Grid& grid, double t) {
  State u;
  u.t = t;
  u.zeta = SpectralField(grid);
  for (int a = 0; a < grid.dim(); ++a) u.v.emplace_back(grid);
  return u;
}

State state_from_physical(const Grid& grid, const std::vector<double>& zeta,
                          const std::vector<std::vector<double>>& v) {
  require(int(v.size()) == grid.dim(), ErrorCode::ShapeMismatch,
          "velocity needs one component per axis");
  State u;
  u.zeta = transform_forward(zeta, grid);
  zero_nyquist(u.zeta);
  for (const auto& c : v) {
    u.v.push_back(transform_forward(c, grid));
    zero_nyquist(u.v.back());
  }
  return u;
}

// ------------------------------------------------------------- symbols

double symbol_p(const ModelSpec& spec, double xi) {
  const AbcdParams q = spec.linear_abcd();
  const double x2 = spec.mu * xi * xi;
  return (1.0 - q.a * x2) / (1.0 + q.b * x2);
}

double symbol_q(const ModelSpec& spec, double xi) {
  const AbcdParams q = spec.linear_abcd();
  const double x2 = spec.mu * xi * xi;
  return (1.0 - q.c * x2) / (1.0 + q.d * x2);
}

double frequency(const ModelSpec& spec, double xi) {
  return std::abs(xi) * std::sqrt(symbol_p(spec, xi) * symbol_q(spec, xi));
}

double amplitude_ratio(const ModelSpec& spec, double xi) {
  return std::sqrt(symbol_p(spec, xi) / symbol_q(spec, xi));
}

Mat2 linear_symbol(const ModelSpec& spec, double xi) {
  const double p = symbol_p(spec, xi);
  const double q = symbol_q(spec, xi);
  if (spec.dim == 1) return {0.0, cplx(0.0, xi * p), cplx(0.0, xi * q), 0.0};
  return {0.0, p, -xi * xi * q, 0.0};
}

Mat2 semigroup_symbol(const ModelSpec& spec, double xi, double tau) {
  // A^2 = -omega^2 I, so exp(-tau A) = cos(omega tau) I - sin(omega tau)/omega A.
  const double om = frequency(spec, xi);
  const double c = std::cos(om * tau);
  const double s = om > 0.0 ? std::sin(om * tau) / om : tau;
  const Mat2 a = linear_symbol(spec, xi);
  return {c - s * a[0], -s * a[1], -s * a[2], c - s * a[3]};
}

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

// ---------------------------------------------------------- Propagator

namespace {

// |xi| built from the Nyquist-free wavenumbers; used for every linear symbol.
std::vector<double> odd_kabs(const Grid& g) {
  std::vector<double> r(g.spectral_size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += g.k_odd(a)[i] * g.k_odd(a)[i];
    r[i] = std::sqrt(s);
  }
  return r;
}

}  // namespace

Propagator::Propagator(const ModelSpec& spec, const Grid& grid, double tau)
    : dim_(grid.dim()), tau_(tau) {
  require(spec.dim == grid.dim(), ErrorCode::ShapeMismatch, "model and grid dims differ");
  const std::size_t ns = grid.spectral_size();
  const auto kk = odd_kabs(grid);
  cos_.resize(ns);
  a12_.resize(ns);
  a21_.resize(ns);
  if (dim_ == 2) inv_k2_.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const double p = symbol_p(spec, kk[i]);
    const double q = symbol_q(spec, kk[i]);
    const double om = kk[i] * std::sqrt(p * q);
    const double c = std::cos(om * tau);
    const double s = om > 0.0 ? std::sin(om * tau) / om : tau;
    cos_[i] = c;
    if (dim_ == 1) {
      // e12 = -i xi p sin/om, e21 = -i xi q sin/om (xi signed, here >= 0 on the half spectrum)
      const double xi = grid.k_odd(0)[i];
      a12_[i] = xi * p * s;
      a21_[i] = xi * q * s;
    } else {
      a12_[i] = p * s;                  // zeta' = c zeta - a12 D
      a21_[i] = kk[i] * kk[i] * q * s;  // D' = c D + a21 zeta
      inv_k2_[i] = kk[i] > 0.0 ? 1.0 / (kk[i] * kk[i]) : 0.0;
    }
  }
}

State Propagator::apply(const State& u) const {
  const Grid& g = u.grid();
  require(g.spectral_size() == cos_.size() && g.dim() == dim_, ErrorCode::ShapeMismatch,
          "state does not match propagator grid");
  State out = u;
  const std::size_t ns = cos_.size();
  const cplx I(0.0, 1.0);
  if (dim_ == 1) {
    for (std::size_t i = 0; i < ns; ++i) {
      const cplx z = u.zeta[i];
      const cplx v = u.v[0][i];
      out.zeta[i] = cos_[i] * z - I * a12_[i] * v;
      out.v[0][i] = -I * a21_[i] * z + cos_[i] * v;
    }
    return out;
  }
  const auto& k0 = g.k_odd(0);
  const auto& k1 = g.k_odd(1);
  for (std::size_t i = 0; i < ns; ++i) {
    const cplx z = u.zeta[i];
    const cplx d = I * (k0[i] * u.v[0][i] + k1[i] * u.v[1][i]);
    const cplx zn = cos_[i] * z - a12_[i] * d;
    const cplx dn = cos_[i] * d + a21_[i] * z;
    // gradient part of V is -i xi D/|xi|^2
    const cplx dd = -I * (dn - d) * inv_k2_[i];
    out.zeta[i] = zn;
    out.v[0][i] += k0[i] * dd;
    out.v[1][i] += k1[i] * dd;
  }
  return out;
}

double linear_energy(const ModelSpec& spec, const State& u) {
  const Grid& g = u.grid();
  const auto kk = odd_kabs(g);
  const auto& w = g.weight();
  double s = 0.0;
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double r2 = symbol_p(spec, kk[i]) / symbol_q(spec, kk[i]);
    double e = std::norm(u.zeta[i]);
    if (g.dim() == 1) {
      e += r2 * std::norm(u.v[0][i]);
    } else {
      const cplx vv[2] = {u.v[0][i], u.v[1][i]};
      const double k0 = g.k_odd(0)[i], k1 = g.k_odd(1)[i];
      const double tot = std::norm(vv[0]) + std::norm(vv[1]);
      const double grad = kk[i] > 0.0 ? std::norm(k0 * vv[0] + k1 * vv[1]) / (kk[i] * kk[i]) : 0.0;
      e += r2 * grad + (tot - grad);
    }
    s += w[i] * e;
  }
  return s * g.cell();
}

double mass(const State& u) {
  const Grid& g = u.grid();
  return u.zeta[0].real() * std::sqrt(double(g.physical_size())) * g.cell();
}

double min_depth(const ModelSpec& spec, const State& u) {
  const auto z = transform_backward(u.zeta);
  const double zmin = *std::min_element(z.begin(), z.end());
  const double zmax = *std::max_element(z.begin(), z.end());
  return 1.0 + std::min(spec.eps * zmin, spec.eps * zmax);
}

// --------------------------------------------------------- nonlinearity

namespace {

std::vector<double> smoothing_symbol(const Grid& g, double mu, double coef) {
  const auto kk = odd_kabs(g);
  std::vector<double> s(kk.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 1.0 / (1.0 + mu * coef * kk[i] * kk[i]);
  return s;
}

// -(P_rot + inv_d P_grad) a, with the odd wavenumbers.
VectorField momentum_projection(const VectorField& a, const std::vector<double>& inv_d) {
  const Grid& g = a[0].grid();
  VectorField out = a;
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.spectral_size(); ++i) out[0][i] = -inv_d[i] * a[0][i];
    return out;
  }
  const auto& k0 = g.k_odd(0);
  const auto& k1 = g.k_odd(1);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double kk = k0[i] * k0[i] + k1[i] * k1[i];
    cplx s = 0.0;
    if (kk > 0.0) s = (k0[i] * a[0][i] + k1[i] * a[1][i]) / kk;
    const double f = 1.0 - inv_d[i];
    out[0][i] = -(a[0][i] - f * k0[i] * s);
    out[1][i] = -(a[1][i] - f * k1[i] * s);
  }
  return out;
}

// (V . grad) V dealiased.
VectorField advection(const VectorField& v) {
  const Grid& g = v[0].grid();
  const int dim = g.dim();
  const int m = padded_size(g.n(), 3, 2);
  std::vector<std::vector<double>> vp(dim);
  for (int a = 0; a < dim; ++a) vp[a] = padded_physical(v[a], m);
  VectorField out;
  for (int b = 0; b < dim; ++b) {
    std::vector<double> acc(vp[0].size(), 0.0);
    for (int a = 0; a < dim; ++a) {
      const auto dv = padded_physical(derivative(v[b], a), m);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += vp[a][i] * dv[i];
    }
    out.push_back(from_padded_physical(acc, g, m));
  }
  return out;
}

// zeta * V dealiased, one product per component.
VectorField flux(const SpectralField& zeta, const VectorField& v) {
  const Grid& g = zeta.grid();
  const int m = padded_size(g.n(), 3, 2);
  const auto z = padded_physical(zeta, m);
  VectorField out;
  for (const auto& c : v) {
    auto vp = padded_physical(c, m);
    for (std::size_t i = 0; i < vp.size(); ++i) vp[i] *= z[i];
    out.push_back(from_padded_physical(vp, g, m));
  }
  return out;
}

}  // namespace

State nonlinearity(const ModelSpec& spec, const State& u, const NonlinearOptions& opt) {
  const Grid& g = u.grid();
  require(spec.dim == g.dim() && int(u.v.size()) == g.dim(), ErrorCode::ShapeMismatch,
          "state does not match model dimension");
  State f = make_state(g, u.t);
  if (!opt.enabled) return f;

  const AbcdParams q = spec.kind == ModelKind::Abcd ? spec.abcd : AbcdParams{};
  const double b = spec.kind == ModelKind::Abcd ? q.b : 0.0;
  const double d = spec.kind == ModelKind::Abcd ? q.d : 1.0 / 3.0;

  // mass equation, identical shape for every model
  const auto inv_b = smoothing_symbol(g, spec.mu, b);
  f.zeta = apply_symbol(divergence(flux(u.zeta, u.v)), inv_b);
  f.zeta *= -1.0;
  f.zeta[0] = 0.0;  // exact divergence form

  if (spec.kind != ModelKind::GreenNaghdi) {
    const auto inv_d = smoothing_symbol(g, spec.mu, d);
    VectorField a;
    if (g.dim() == 1) {
      // (V^2/2)_x
      const int m = padded_size(g.n(), 3, 2);
      auto vp = padded_physical(u.v[0], m);
      for (auto& x : vp) x = 0.5 * x * x;
      a.push_back(derivative(from_padded_physical(vp, g, m), 0));
    } else {
      a = advection(u.v);
    }
    f.v = momentum_projection(a, inv_d);
    return f;
  }

  // Green-Naghdi: F_V = (1 + mu T)^-1 [ mu (T - T0) w / eps - (V.grad)V - mu Q ],
  // w = (1 + mu T0)^-1 grad zeta.
  if (opt.gn_check_floor && min_depth(spec, u) < spec.h0)
    fail(ErrorCode::DepthFloor, "depth 1+eps*zeta fell below h0");
  SpectralField zeta = u.zeta;
  if (opt.gn_freeze_depth) zeta = SpectralField(g);
  VectorField rhs = advection(u.v);
  for (auto& c : rhs) c *= -1.0;
  if (!opt.gn_drop_q) {
    const auto qv = gn_Q_apply(zeta, u.v, spec.eps);
    for (int a = 0; a < g.dim(); ++a) rhs[a].axpy(-spec.mu, qv[a]);
  }
  if (opt.gn_time_terms && !opt.gn_freeze_depth) {
    const auto inv_t0 = smoothing_symbol(g, spec.mu, 1.0 / 3.0);
    VectorField w = gradient(u.zeta);
    // (1 + mu T0)^-1 acts as 1/(1+mu|xi|^2/3) on gradients
    for (auto& c : w) c = apply_symbol(c, inv_t0);
    const auto corr = gn_T_correction(zeta, w, spec.eps);
    for (int a = 0; a < g.dim(); ++a) rhs[a].axpy(spec.mu, corr[a]);
  }
  auto sol = gn_solve_momentum(zeta, rhs, spec.eps, spec.mu, opt.gn_tol, opt.gn_max_iter);
  f.v = std::move(sol.x);
  return f;
}

}  // namespace rigidlid
