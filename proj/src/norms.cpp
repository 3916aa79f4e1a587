#include "rigidlid/norms.hpp"

#include <algorithm>
#include <cmath>

#include "rigidlid/multiplier.hpp"
#include "rigidlid/solver.hpp"

namespace rigidlid {

const char* to_string(Components c) {
  switch (c) {
    case Components::All: return "all";
    case Components::Zeta: return "zeta";
    case Components::Velocity: return "velocity";
    case Components::GradPart: return "grad_part";
    case Components::RotPart: return "rot_part";
  }
  return "?";
}

std::vector<std::vector<double>> physical_components(const State& u, Components which) {
  std::vector<std::vector<double>> out;
  const bool two = u.grid().dim() == 2;
  switch (which) {
    case Components::All:
      out.push_back(transform_backward(u.zeta));
      for (const auto& c : u.v) out.push_back(transform_backward(c));
      break;
    case Components::Zeta:
      out.push_back(transform_backward(u.zeta));
      break;
    case Components::Velocity:
      for (const auto& c : u.v) out.push_back(transform_backward(c));
      break;
    case Components::GradPart:
      out.push_back(transform_backward(u.zeta));
      if (two) {
        for (const auto& c : riesz_gradient_projector(u.v)) out.push_back(transform_backward(c));
      } else {
        out.push_back(transform_backward(u.v[0]));
      }
      break;
    case Components::RotPart:
      require(two, ErrorCode::InvalidArgument, "rotational part needs a 2D state");
      for (const auto& c : riesz_rotational_projector(u.v)) out.push_back(transform_backward(c));
      break;
  }
  return out;
}

namespace {

std::vector<double> magnitude(const std::vector<std::vector<double>>& comps) {
  require(!comps.empty(), ErrorCode::InvalidArgument, "no components to measure");
  std::vector<double> m(comps[0].size(), 0.0);
  for (const auto& c : comps) {
    require(c.size() == m.size(), ErrorCode::ShapeMismatch, "component sizes differ");
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += c[i] * c[i];
  }
  for (auto& v : m) v = std::sqrt(v);
  return m;
}

// Vertex of the parabola through (-1,a), (0,b), (1,c), capped below at b.
double parabola_peak(double a, double b, double c) {
  const double den = a - 2.0 * b + c;
  if (den >= 0.0) return b;
  return std::max(b, b - (c - a) * (c - a) / (8.0 * den));
}

double refined_max(const std::vector<double>& m, const Grid& g) {
  const auto it = std::max_element(m.begin(), m.end());
  const double b = *it;
  const std::size_t idx = std::size_t(it - m.begin());
  const int n = g.n();
  if (g.dim() == 1) {
    const int i = int(idx);
    return parabola_peak(m[(i + n - 1) % n], b, m[(i + 1) % n]);
  }
  const int i = int(idx / n), j = int(idx % n);
  auto at = [&](int a, int c) { return m[std::size_t((a + n) % n) * n + (c + n) % n]; };
  const double px = parabola_peak(at(i - 1, j), b, at(i + 1, j)) - b;
  const double py = parabola_peak(at(i, j - 1), b, at(i, j + 1)) - b;
  return b + px + py;
}

}  // namespace

double spatial_norm(const std::vector<std::vector<double>>& comps, const Grid& grid, double r) {
  require(r >= 1.0, ErrorCode::InvalidArgument, "norm exponent must be >= 1");
  const auto m = magnitude(comps);
  require(m.size() == grid.physical_size(), ErrorCode::ShapeMismatch, "field does not match grid");
  if (std::isinf(r)) return refined_max(m, grid);
  double s = 0.0;
  if (r == 2.0) {
    for (double v : m) s += v * v;
    return std::sqrt(s * grid.cell());
  }
  for (double v : m) s += std::pow(v, r);
  return std::pow(s * grid.cell(), 1.0 / r);
}

double spatial_norm(const std::vector<double>& f, const Grid& grid, double r) {
  return spatial_norm(std::vector<std::vector<double>>{f}, grid, r);
}

double MixedNormSpec::constraint_residual(double k, double c) const {
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double ir = std::isinf(r) ? 0.0 : 1.0 / r;
  return iq + ir / k - 1.0 / c;
}

NormSeries mixed_norm(const std::vector<double>& times,
                      const std::vector<std::vector<std::vector<double>>>& snapshots,
                      const Grid& grid, const MixedNormSpec& spec, double min_density) {
  require(times.size() == snapshots.size() && !times.empty(), ErrorCode::ShapeMismatch,
          "times and snapshots differ in length");
  require(spec.q >= 1.0, ErrorCode::InvalidArgument, "time exponent must be >= 1");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], ErrorCode::InvalidArgument,
            "snapshot times must be strictly increasing");
  NormSeries out;
  out.times = times;
  for (const auto& s : snapshots) out.values.push_back(spatial_norm(s, grid, spec.r));
  const double span = times.back() - times.front();
  if (std::isinf(spec.q)) {
    out.quadrature = "max";
    out.value = *std::max_element(out.values.begin(), out.values.end());
    return out;
  }
  if (times.size() < 2) {
    out.value = 0.0;
    out.sparse = true;
    return out;
  }
  out.sparse = double(times.size() - 1) < min_density * span;
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += 0.5 * (times[i] - times[i - 1]) *
           (std::pow(out.values[i], spec.q) + std::pow(out.values[i - 1], spec.q));
  out.value = std::pow(acc, 1.0 / spec.q);
  return out;
}

NormSeries mixed_norm(const Trajectory& traj, Components which, const MixedNormSpec& spec,
                      double min_density) {
  require(!traj.snapshots.empty(), ErrorCode::InvalidArgument, "empty trajectory");
  std::vector<std::vector<std::vector<double>>> snaps;
  for (const auto& s : traj.snapshots) snaps.push_back(physical_components(s, which));
  return mixed_norm(traj.times(), snaps, traj.snapshots[0].grid(), spec, min_density);
}

double sobolev_norm(const SpectralField& f, double s) {
  require(s >= 0.0, ErrorCode::InvalidArgument, "Sobolev index must be >= 0");
  const Grid& g = f.grid();
  const auto& kk = g.kabs();
  const auto& w = g.weight();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += w[i] * std::pow(1.0 + kk[i] * kk[i], s) * std::norm(f[i]);
  return std::sqrt(acc * g.cell());
}

double x_k_mu_norm(const State& u, int k, double mu) {
  require(k >= 0 && mu >= 0.0, ErrorCode::InvalidArgument, "X^k_mu needs k >= 0, mu >= 0");
  double vv = 0.0;
  for (const auto& c : u.v) {
    const double n = sobolev_norm(c, k);
    vv += n * n;
  }
  return sobolev_norm(u.zeta, k) + std::sqrt(vv) + std::sqrt(mu) * sobolev_norm(divergence(u.v), k);
}

// ------------------------------------------------------------- Morawetz

namespace {

// Indices of lattice points along one axis, as coordinates.
std::vector<double> lattice(const Grid& g, const MorawetzOptions& opt) {
  const double lo = -0.5 * g.length() + opt.margin;
  const double hi = 0.5 * g.length() - opt.margin;
  require(hi >= lo, ErrorCode::Boundary,
          "domain too small: Gaussian weight is not negligible at the boundary");
  std::vector<double> pts;
  if (opt.spacing <= 0.0) {
    for (int i = 0; i < g.n(); ++i)
      if (g.x(i) >= lo && g.x(i) <= hi) pts.push_back(g.x(i));
  } else {
    const int count = int(std::floor((hi - lo) / opt.spacing + 1e-9));
    const double start = 0.5 * (lo + hi) - 0.5 * count * opt.spacing;
    for (int i = 0; i <= count; ++i) pts.push_back(start + i * opt.spacing);
  }
  return pts;
}

// K[a][i] = exp(-2 (x_i - p_a)^2), zero past 7 units.
std::vector<std::vector<double>> kernel(const Grid& g, const std::vector<double>& pts) {
  std::vector<std::vector<double>> k(pts.size(), std::vector<double>(g.n(), 0.0));
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (int i = 0; i < g.n(); ++i) {
      const double d = g.x(i) - pts[a];
      if (std::abs(d) < 7.0) k[a][i] = std::exp(-2.0 * d * d);
    }
  return k;
}

}  // namespace

MorawetzResult morawetz_norm(const std::vector<double>& times,
                             const std::vector<std::vector<std::vector<double>>>& snapshots,
                             const Grid& grid, const MorawetzOptions& opt) {
  require(times.size() == snapshots.size() && !times.empty(), ErrorCode::ShapeMismatch,
          "times and snapshots differ in length");
  const std::size_t np = grid.physical_size();
  // time integral of |U|^2 at each point (trapezoid)
  std::vector<double> acc(np, 0.0);
  for (std::size_t s = 0; s < times.size(); ++s) {
    double w = 0.0;
    if (s > 0) w += 0.5 * (times[s] - times[s - 1]);
    if (s + 1 < times.size()) w += 0.5 * (times[s + 1] - times[s]);
    if (w == 0.0) continue;
    for (const auto& c : snapshots[s]) {
      require(c.size() == np, ErrorCode::ShapeMismatch, "snapshot does not match grid");
      for (std::size_t i = 0; i < np; ++i) acc[i] += w * c[i] * c[i];
    }
  }
  const auto pts = lattice(grid, opt);
  const auto k = kernel(grid, pts);
  const int n = grid.n();
  MorawetzResult res;
  double best = -1.0;
  if (grid.dim() == 1) {
    for (std::size_t a = 0; a < pts.size(); ++a) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[a][i] * acc[i];
      if (s > best) {
        best = s;
        res.argmax = {pts[a]};
      }
    }
  } else {
    // separable weight: sum_ij K[a][i] acc[i][j] K[b][j]
    std::vector<std::vector<double>> row(pts.size(), std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (int i = 0; i < n; ++i) {
        const double ka = k[a][i];
        if (ka == 0.0) continue;
        const double* src = &acc[std::size_t(i) * n];
        for (int j = 0; j < n; ++j) row[a][j] += ka * src[j];
      }
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[a][j] * k[b][j];
        if (s > best) {
          best = s;
          res.argmax = {pts[a], pts[b]};
        }
      }
  }
  res.value = std::sqrt(std::max(0.0, best) * grid.cell());
  return res;
}

MorawetzResult morawetz_norm(const Trajectory& traj, Components which,
                             const MorawetzOptions& opt) {
  require(!traj.snapshots.empty(), ErrorCode::InvalidArgument, "empty trajectory");
  std::vector<std::vector<std::vector<double>>> snaps;
  for (const auto& s : traj.snapshots) snaps.push_back(physical_components(s, which));
  return morawetz_norm(traj.times(), snaps, traj.snapshots[0].grid(), opt);
}

}  // namespace rigidlid
