#include "rigidlid/green_naghdi.hpp"

#include <algorithm>
#include <cmath>

namespace rigidlid {

namespace {

// Fine-grid workspace: everything with 1/h or cubes is evaluated at 2n.
struct Fine {
  Grid coarse;
  Grid grid;
  int m;
  std::vector<double> zeta;  // physical zeta on the fine grid

  explicit Fine(const SpectralField& z)
      : coarse(z.grid()),
        grid(z.grid().dim(), 2 * z.grid().n(), z.grid().length()),
        m(2 * z.grid().n()),
        zeta(padded_physical(z, 2 * z.grid().n())) {}

  std::vector<double> phys(const SpectralField& sf) const { return padded_physical(sf, m); }

  // -(1/(3h)) grad(s) for a physical scalar s on the fine grid.
  VectorField minus_grad_over_3h(const std::vector<double>& s, const std::vector<double>& h) const {
    const SpectralField sf = transform_forward(s, grid);
    VectorField out;
    for (int a = 0; a < grid.dim(); ++a) {
      auto g = transform_backward(derivative(sf, a));
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = -g[i] / (3.0 * h[i]);
      out.push_back(truncate(transform_forward(g, grid), coarse));
    }
    return out;
  }
};

void check_depth(const SpectralField& zeta, double eps, double h0) {
  if (h0 <= 0.0) return;
  const auto z = transform_backward(zeta);
  for (double v : z)
    if (1.0 + eps * v < h0) fail(ErrorCode::DepthFloor, "depth 1+eps*zeta fell below h0");
}

std::vector<double> depth(const Fine& f, double eps) {
  std::vector<double> h(f.zeta.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 + eps * f.zeta[i];
  for (double v : h)
    if (!(v > 0.0)) fail(ErrorCode::DepthFloor, "non-positive depth in Green-Naghdi operator");
  return h;
}

void check_vector(const SpectralField& zeta, const VectorField& w) {
  require(int(w.size()) == zeta.grid().dim(), ErrorCode::ShapeMismatch,
          "vector field has wrong number of components");
  for (const auto& c : w)
    require(c.grid() == zeta.grid(), ErrorCode::ShapeMismatch, "grid mismatch");
}

}  // namespace

VectorField gn_T_apply(const SpectralField& zeta, const VectorField& w, double eps, double h0) {
  check_vector(zeta, w);
  check_depth(zeta, eps, h0);
  Fine f(zeta);
  const auto h = depth(f, eps);
  auto s = f.phys(divergence(w));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= h[i] * h[i] * h[i];
  return f.minus_grad_over_3h(s, h);
}

VectorField gn_Q_apply(const SpectralField& zeta, const VectorField& v, double eps, double h0) {
  check_vector(zeta, v);
  check_depth(zeta, eps, h0);
  Fine f(zeta);
  const auto h = depth(f, eps);
  const SpectralField d = divergence(v);
  const auto dp = f.phys(d);
  std::vector<double> s(dp.size(), 0.0);
  for (int a = 0; a < zeta.grid().dim(); ++a) {
    const auto va = f.phys(v[a]);
    const auto da = f.phys(derivative(d, a));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += va[i] * da[i];
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = h[i] * h[i] * h[i] * (s[i] - dp[i] * dp[i]);
  return f.minus_grad_over_3h(s, h);
}

VectorField gn_T_correction(const SpectralField& zeta, const VectorField& w, double eps) {
  check_vector(zeta, w);
  // (T - T0) W / eps = -(1/3) [ (1/h) grad(zeta (3 + 3 eps zeta + eps^2 zeta^2) D) - (zeta/h) grad D ]
  Fine f(zeta);
  const auto h = depth(f, eps);
  const SpectralField d = divergence(w);
  auto s = f.phys(d);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double z = f.zeta[i];
    s[i] *= z * (3.0 + 3.0 * eps * z + eps * eps * z * z);
  }
  const SpectralField sf = transform_forward(s, f.grid);
  VectorField out;
  for (int a = 0; a < zeta.grid().dim(); ++a) {
    auto g = transform_backward(derivative(sf, a));
    const auto gd = f.phys(derivative(d, a));
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = -(g[i] - f.zeta[i] * gd[i]) / (3.0 * h[i]);
    out.push_back(truncate(transform_forward(g, f.grid), f.coarse));
  }
  return out;
}

VectorField gn_forward(const SpectralField& zeta, const VectorField& x, double eps, double mu) {
  VectorField out = gn_T_apply(zeta, x, eps);
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] *= mu;
    out[a] += x[a];
  }
  return out;
}

// ---------------------------------------------------------------- GMRES

namespace {

// Real inner product on half-spectrum coefficients (Parseval weights).
double dot(const VectorField& x, const VectorField& y) {
  const auto& w = x[0].grid().weight();
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t i = 0; i < w.size(); ++i)
      s += w[i] * (x[a][i].real() * y[a][i].real() + x[a][i].imag() * y[a][i].imag());
  return s;
}

double norm(const VectorField& x) { return std::sqrt(dot(x, x)); }

void axpy(VectorField& y, double s, const VectorField& x) {
  for (std::size_t a = 0; a < y.size(); ++a) y[a].axpy(s, x[a]);
}

void scale(VectorField& y, double s) {
  for (auto& c : y) c *= s;
}

VectorField zeros_like(const VectorField& x) {
  VectorField z;
  for (const auto& c : x) z.emplace_back(c.grid());
  return z;
}

// Flat-depth inverse: P_rot + P_grad / (1 + mu hbar^2 |xi|^2 / 3).
struct FlatInverse {
  std::vector<double> sym;
  explicit FlatInverse(const Grid& g, double mu, double hbar) : sym(g.spectral_size()) {
    for (std::size_t i = 0; i < sym.size(); ++i) {
      double kk = 0.0;
      for (int a = 0; a < g.dim(); ++a) kk += g.k_odd(a)[i] * g.k_odd(a)[i];
      sym[i] = 1.0 / (1.0 + mu * hbar * hbar * kk / 3.0);
    }
  }
  VectorField operator()(const VectorField& x) const {
    const Grid& g = x[0].grid();
    VectorField out = x;
    if (g.dim() == 1) {
      for (std::size_t i = 0; i < sym.size(); ++i) out[0][i] *= sym[i];
      return out;
    }
    const auto& k0 = g.k_odd(0);
    const auto& k1 = g.k_odd(1);
    for (std::size_t i = 0; i < sym.size(); ++i) {
      const double kk = k0[i] * k0[i] + k1[i] * k1[i];
      if (kk == 0.0) continue;
      const cplx s = (k0[i] * x[0][i] + k1[i] * x[1][i]) / kk * (sym[i] - 1.0);
      out[0][i] += k0[i] * s;
      out[1][i] += k1[i] * s;
    }
    return out;
  }
};

}  // namespace

GnSolveResult gn_solve_momentum(const SpectralField& zeta, const VectorField& rhs, double eps,
                                double mu, double tol, int max_iter, double h0) {
  check_vector(zeta, rhs);
  require(tol > 0.0, ErrorCode::InvalidArgument, "solver tolerance must be positive");
  check_depth(zeta, eps, h0);
  const Grid& g = zeta.grid();
  GnSolveResult res;
  res.x = zeros_like(rhs);
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) return res;

  const FlatInverse pinv(g, mu, 1.0 + eps * mean_value(zeta));
  auto op = [&](const VectorField& v) { return gn_forward(zeta, v, eps, mu); };

  const int restart = 40;
  VectorField r = rhs;
  double beta = bnorm;
  int total = 0;
  while (total < max_iter) {
    std::vector<VectorField> basis;
    basis.push_back(r);
    scale(basis[0], 1.0 / beta);
    std::vector<std::vector<double>> hm(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), gv(restart + 1, 0.0);
    gv[0] = beta;
    int k = 0;
    for (; k < restart && total < max_iter; ++k, ++total) {
      VectorField w = op(pinv(basis[k]));
      for (int i = 0; i <= k; ++i) {
        hm[i][k] = dot(basis[i], w);
        axpy(w, -hm[i][k], basis[i]);
      }
      // second Gram-Schmidt pass for orthogonality at tight tolerances
      for (int i = 0; i <= k; ++i) {
        const double c = dot(basis[i], w);
        hm[i][k] += c;
        axpy(w, -c, basis[i]);
      }
      hm[k + 1][k] = norm(w);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * hm[i][k] + sn[i] * hm[i + 1][k];
        hm[i + 1][k] = -sn[i] * hm[i][k] + cs[i] * hm[i + 1][k];
        hm[i][k] = t;
      }
      const double den = std::hypot(hm[k][k], hm[k + 1][k]);
      const double hk1 = hm[k + 1][k];
      cs[k] = den > 0.0 ? hm[k][k] / den : 1.0;
      sn[k] = den > 0.0 ? hk1 / den : 0.0;
      hm[k][k] = den;
      hm[k + 1][k] = 0.0;
      gv[k + 1] = -sn[k] * gv[k];
      gv[k] = cs[k] * gv[k];
      const bool breakdown = hk1 <= 1e-14 * den;
      if (!breakdown) {
        scale(w, 1.0 / hk1);
        basis.push_back(std::move(w));
      }
      if (std::abs(gv[k + 1]) <= 0.5 * tol * bnorm || breakdown) {
        ++k;
        ++total;
        break;
      }
    }
    // back substitution
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = gv[i];
      for (int j = i + 1; j < k; ++j) s -= hm[i][j] * y[j];
      y[i] = hm[i][i] != 0.0 ? s / hm[i][i] : 0.0;
    }
    VectorField z = zeros_like(rhs);
    for (int i = 0; i < k; ++i) axpy(z, y[i], basis[i]);
    axpy(res.x, 1.0, pinv(z));
    r = rhs;
    axpy(r, -1.0, op(res.x));
    beta = norm(r);
    res.iterations = total;
    res.residual = beta / bnorm;
    if (res.residual <= tol) return res;
  }
  fail(ErrorCode::NonConvergence,
       "Green-Naghdi momentum solve did not converge: relative residual " +
           num(res.residual) + " after " + std::to_string(total) + " iterations");
}

}  // namespace rigidlid
