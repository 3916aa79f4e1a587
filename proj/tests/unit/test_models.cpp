#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rigidlid/euler2d.hpp"
#include "rigidlid/green_naghdi.hpp"
#include "rigidlid/model.hpp"
#include "rigidlid/multiplier.hpp"

using namespace rigidlid;

namespace {

ModelSpec classical(int dim, double mu = 1.0) {
  ModelSpec m;
  m.dim = dim;
  m.mu = mu;
  return m;
}

ModelSpec abcd_model(int dim, double a, double b, double c, double d, double mu = 1.0) {
  ModelSpec m;
  m.kind = ModelKind::Abcd;
  m.dim = dim;
  m.mu = mu;
  m.abcd = {a, b, c, d};
  return m;
}

double mat_err(const Mat2& x, const Mat2& y) {
  double e = 0;
  for (int i = 0; i < 4; ++i) e = std::max(e, std::abs(x[i] - y[i]));
  return e;
}

State random_state(const Grid& g, unsigned seed, double amp = 0.3) {
  State u = make_state(g);
  u.zeta = amp * th::smooth_random(g, seed);
  for (int a = 0; a < g.dim(); ++a) u.v[a] = amp * th::smooth_random(g, seed + 10 + a);
  return u;
}

// scale random smooth fields to a given max amplitude in physical space
SpectralField bounded(const Grid& g, unsigned seed, double amp) {
  auto sf = th::smooth_random(g, seed);
  double m = 0;
  for (double v : transform_backward(sf)) m = std::max(m, std::abs(v));
  return (amp / m) * sf;
}

}  // namespace

TEST_CASE("abcd admissibility and degeneracy flags") {
  AbcdParams p{-0.16666666666666666, 0.5, -1.0 / 3.0, 0.0};
  CHECK(p.admissible());
  CHECK(p.nondegenerate());
  CHECK(std::abs(p.sum()) < 1e-15);
  AbcdParams q{0.1, 0, 0, 0};
  CHECK_FALSE(q.admissible());
  ModelSpec m = abcd_model(1, 0.1, 0, 0, 0);
  CHECK_THROWS_AS(m.validate(), Error);
  AbcdParams deg{0, 0, 0, 0};
  CHECK_FALSE(deg.nondegenerate());
}

TEST_CASE("model spec ranges") {
  ModelSpec m;
  m.eps = 0.0;
  CHECK_THROWS_AS(m.validate(), Error);
  m.eps = 1.0;
  m.mu = 1.5;
  CHECK_THROWS_AS(m.validate(), Error);
  m.mu = 1.0;
  m.kind = ModelKind::GreenNaghdi;
  m.h0 = 0.0;
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("linear symbol values") {
  const auto a0 = linear_symbol(classical(1), 0.0);
  for (auto v : a0) CHECK(std::abs(v) == 0.0);
  const auto a1 = linear_symbol(classical(1), 1.0);
  CHECK(std::abs(a1[1] - cplx(0, 1)) < 1e-15);
  CHECK(std::abs(a1[2] - cplx(0, 0.75)) < 1e-15);
  const auto w = linear_symbol(abcd_model(1, 0, 0, 0, 0), 2.5);
  CHECK(std::abs(w[1] - cplx(0, 2.5)) < 1e-15);
  CHECK(std::abs(w[2] - cplx(0, 2.5)) < 1e-15);
  const auto a2 = linear_symbol(classical(2), 2.0);
  CHECK(std::abs(a2[1] - 1.0) < 1e-15);
  CHECK(std::abs(a2[2] + 4.0 / (1.0 + 4.0 / 3.0)) < 1e-14);
}

TEST_CASE("classical symbols equal abcd (0,0,0,1/3) modewise") {
  for (int dim : {1, 2})
    for (double xi : {0.0, 0.3, 1.0, 7.0, 40.0}) {
      const auto a = linear_symbol(classical(dim, 0.4), xi);
      const auto b = linear_symbol(abcd_model(dim, 0, 0, 0, 1.0 / 3.0, 0.4), xi);
      CHECK(mat_err(a, b) == 0.0);
      CHECK(mat_err(semigroup_symbol(classical(dim, 0.4), xi, 3.1),
                    semigroup_symbol(abcd_model(dim, 0, 0, 0, 1.0 / 3.0, 0.4), xi, 3.1)) == 0.0);
    }
}

TEST_CASE("semigroup group property and quadratic invariant") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(-20, 20), ut(-50, 50), uc(-1, 1);
  const ModelSpec models[] = {classical(1), classical(1, 0.1),
                              abcd_model(1, -1.0 / 6, 0.5, -1.0 / 3, 0),
                              abcd_model(1, 0, 1.0 / 6, 0, 1.0 / 6),
                              abcd_model(1, -1.0 / 6, 1.0 / 6, -1.0 / 6, 1.0 / 3)};
  for (const auto& m : models) {
    CHECK(mat_err(semigroup_symbol(m, 1.7, 0.0), Mat2{1.0, 0.0, 0.0, 1.0}) == 0.0);
    for (int s = 0; s < 100; ++s) {
      const double xi = ux(rng), t1 = ut(rng), t2 = ut(rng);
      const auto e = mat_mul(semigroup_symbol(m, xi, t1), semigroup_symbol(m, xi, t2));
      // rounding grows with the phase and with the entry scale sqrt(p/q)
      const double rr = amplitude_ratio(m, xi);
      const double tol = 1e-14 * (1 + frequency(m, xi) * (std::abs(t1) + std::abs(t2))) * (1 + rr + 1 / rr);
      CHECK(mat_err(e, semigroup_symbol(m, xi, t1 + t2)) <= tol);
      const cplx z(uc(rng), uc(rng)), v(uc(rng), uc(rng));
      const auto E = semigroup_symbol(m, xi, t1);
      const cplx z1 = E[0] * z + E[1] * v, v1 = E[2] * z + E[3] * v;
      const double r2 = symbol_p(m, xi) / symbol_q(m, xi);
      const double before = std::norm(z) + r2 * std::norm(v);
      const double after = std::norm(z1) + r2 * std::norm(v1);
      CHECK(std::abs(after - before) <= 1e-12 * std::max(1.0, before));
    }
  }
  // classical: R^2 = 1 + mu xi^2/3
  CHECK(std::abs(symbol_p(classical(1), 2.0) / symbol_q(classical(1), 2.0) - (1 + 4.0 / 3)) < 1e-14);
}

TEST_CASE("nonlinearity: zero state, single mode, mean-free first component") {
  const Grid g(1, 64, 2 * M_PI);
  ModelSpec m = classical(1);
  m.eps = 0.3;
  const State zero = make_state(g);
  const State f0 = nonlinearity(m, zero);
  CHECK(th::max_abs(f0.zeta) == 0.0);
  CHECK(th::max_abs(f0.v[0]) == 0.0);

  std::vector<double> v(64), z(64, 0.0);
  for (int i = 0; i < 64; ++i) v[i] = std::cos(g.x(i));
  const State u = state_from_physical(g, z, {v});
  const State f = nonlinearity(m, u);
  const auto f2 = transform_backward(f.v[0]);
  const auto f1 = transform_backward(f.zeta);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(f1[i]) < 1e-14);
    CHECK(std::abs(f2[i] - 3.0 / 14.0 * std::sin(2 * g.x(i))) < 1e-13);
  }

  for (int dim : {1, 2}) {
    const Grid gg(dim, dim == 1 ? 128 : 32, 20.0);
    ModelSpec ms[3] = {classical(dim), abcd_model(dim, -1.0 / 6, 0.5, -1.0 / 3, 0), classical(dim)};
    ms[2].kind = ModelKind::GreenNaghdi;
    for (auto& mm : ms) {
      mm.eps = 0.2;
      const State w = random_state(gg, 3);
      const State fw = nonlinearity(mm, w);
      CHECK(fw.zeta[0] == cplx(0.0));
    }
  }
}

TEST_CASE("GN reduces to classical with depth frozen and Q, time terms dropped") {
  for (int dim : {1, 2}) {
    const Grid g(dim, dim == 1 ? 128 : 32, 20.0);
    ModelSpec gn = classical(dim, 0.5);
    gn.kind = ModelKind::GreenNaghdi;
    gn.eps = 0.3;
    ModelSpec cl = classical(dim, 0.5);
    cl.eps = 0.3;
    NonlinearOptions opt;
    opt.gn_freeze_depth = true;
    opt.gn_drop_q = true;
    opt.gn_time_terms = false;
    const State u = random_state(g, 17);
    const State a = nonlinearity(gn, u, opt);
    const State b = nonlinearity(cl, u);
    const double s = std::max(th::max_abs(b.zeta), th::max_abs(b.v[0]));
    CHECK(th::max_diff(a.zeta, b.zeta) <= 1e-12 * s);
    for (int k = 0; k < dim; ++k) CHECK(th::max_diff(a.v[k], b.v[k]) <= 1e-12 * s);
  }
}

TEST_CASE("GN T operator") {
  // flat surface: T[0] W = -(1/3) grad div W
  const Grid g(2, 32, 10.0);
  const VectorField w{th::smooth_random(g, 1), th::smooth_random(g, 2)};
  const auto t0 = gn_T_apply(SpectralField(g), w, 0.5);
  const auto gd = gradient(divergence(w));
  for (int a = 0; a < 2; ++a) CHECK(th::max_diff(t0[a], (-1.0 / 3.0) * gd[a]) <= 1e-12 * th::max_abs(gd[a]));
  // constant W
  const Grid g1(1, 64, 2 * M_PI);
  std::vector<double> ones(64, 1.0);
  const VectorField c{transform_forward(ones, g1)};
  const auto zeta = transform_forward(th::gaussian(g1, 0.5, 0.7), g1);
  CHECK(th::max_abs(gn_T_apply(zeta, c, 0.4)[0]) <= 1e-13);
}

TEST_CASE("GN T and Q against a fine-grid finite-difference oracle") {
  const int n = 128, fine = 4096;
  const double eps = 0.5;
  const Grid g(1, n, 2 * M_PI);
  auto zf = [](double x) { return 0.2 * std::cos(x) + 0.1 * std::sin(2 * x); };
  auto wf = [](double x) { return std::sin(x); };
  auto vf = [](double x) { return std::sin(x) + 0.3 * std::cos(2 * x); };
  std::vector<double> z(n), w(n), v(n);
  for (int i = 0; i < n; ++i) {
    z[i] = zf(g.x(i));
    w[i] = wf(g.x(i));
    v[i] = vf(g.x(i));
  }
  const auto zeta = transform_forward(z, g);
  const auto T = transform_backward(gn_T_apply(zeta, {transform_forward(w, g)}, eps)[0]);
  const auto Q = transform_backward(gn_Q_apply(zeta, {transform_forward(v, g)}, eps)[0]);

  // fourth-order periodic central differences on a fine grid
  const double h = 2 * M_PI / fine;
  auto d1 = [&](const std::vector<double>& f) {
    std::vector<double> o(fine);
    for (int i = 0; i < fine; ++i) {
      auto at = [&](int k) { return f[((i + k) % fine + fine) % fine]; };
      o[i] = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
    }
    return o;
  };
  std::vector<double> X(fine), Z(fine), W(fine), V(fine), H(fine);
  for (int i = 0; i < fine; ++i) {
    X[i] = -M_PI + i * h;
    Z[i] = zf(X[i]);
    W[i] = wf(X[i]);
    V[i] = vf(X[i]);
    H[i] = 1 + eps * Z[i];
  }
  auto Wx = d1(W);
  std::vector<double> s(fine);
  for (int i = 0; i < fine; ++i) s[i] = H[i] * H[i] * H[i] * Wx[i];
  auto Tfd = d1(s);
  auto Vx = d1(V), Vxx = d1(Vx);
  for (int i = 0; i < fine; ++i) s[i] = H[i] * H[i] * H[i] * (V[i] * Vxx[i] - Vx[i] * Vx[i]);
  auto Qfd = d1(s);
  const int stride = fine / n;
  double et = 0, eq = 0;
  for (int i = 0; i < n; ++i) {
    const int k = i * stride;
    et = std::max(et, std::abs(T[i] + Tfd[k] / (3 * H[k])));
    eq = std::max(eq, std::abs(Q[i] + Qfd[k] / (3 * H[k])));
  }
  CHECK(et < 1e-6);
  CHECK(eq < 1e-6);
}

TEST_CASE("GN Q special cases") {
  const Grid g(1, 64, 2 * M_PI);
  std::vector<double> s(64), one(64, 1.0);
  for (int i = 0; i < 64; ++i) s[i] = std::sin(g.x(i));
  const auto q = gn_Q_apply(SpectralField(g), {transform_forward(s, g)}, 0.3)[0];
  CHECK(th::max_abs(q) <= 1e-12);
  const auto zeta = transform_forward(th::gaussian(g, 0.5, 0.8), g);
  CHECK(th::max_abs(gn_Q_apply(zeta, {transform_forward(one, g)}, 0.3)[0]) <= 1e-13);
}

TEST_CASE("GN momentum solve") {
  for (int dim : {1, 2}) {
    const Grid g(dim, dim == 1 ? 256 : 32, 16.0);
    VectorField rhs;
    for (int a = 0; a < dim; ++a) rhs.push_back(th::smooth_random(g, 30 + a));
    // flat depth: spectral inverse
    const auto flat = gn_solve_momentum(SpectralField(g), rhs, 0.3, 1.0, 1e-10);
    const auto back = gn_forward(SpectralField(g), flat.x, 0.3, 1.0);
    double num2 = 0, den2 = 0;
    for (int a = 0; a < dim; ++a) {
      num2 += l2_squared(back[a] - rhs[a]);
      den2 += l2_squared(rhs[a]);
    }
    CHECK(std::sqrt(num2 / den2) <= 1e-14);
    // rhs = 0
    VectorField zero(dim, SpectralField(g));
    const auto z = gn_solve_momentum(SpectralField(g), zero, 0.3, 1.0, 1e-10);
    for (int a = 0; a < dim; ++a) CHECK(th::max_abs(z.x[a]) == 0.0);
    // round trip
    const auto zeta = bounded(g, 50, 1.0);
    VectorField y;
    for (int a = 0; a < dim; ++a) y.push_back(th::smooth_random(g, 60 + a));
    const auto f = gn_forward(zeta, y, 0.3, 1.0);
    const auto sol = gn_solve_momentum(zeta, f, 0.3, 1.0, 1e-10);
    CHECK(sol.residual <= 1e-10);
    double e2 = 0, y2 = 0;
    for (int a = 0; a < dim; ++a) {
      e2 += l2_squared(sol.x[a] - y[a]);
      y2 += l2_squared(y[a]);
    }
    CHECK(std::sqrt(e2 / y2) <= 1e-8);
  }
  const Grid g(1, 64, 10.0);
  const auto deep = bounded(g, 70, 1.0);
  CHECK_THROWS_AS(gn_solve_momentum(deep, {th::smooth_random(g, 71)}, 0.9, 1.0, 1e-10, 400, 0.5),
                  Error);
}

TEST_CASE("Euler right-hand side") {
  const Grid g(2, 64, 2 * M_PI);
  // radial vortex; a nonzero mean would bend the streamfunction on the torus
  const auto w = transform_forward(th::zero_mean_vortex(g, 1.0, 0.5), g);
  CHECK(th::max_abs(euler2d_rhs(w)) <= 1e-10);
  // single mode
  std::vector<double> f(g.physical_size());
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) f[i * 64 + j] = std::cos(2 * g.x(i) + 3 * g.x(j));
  CHECK(th::max_abs(euler2d_rhs(transform_forward(f, g))) <= 1e-12);
  CHECK_THROWS_AS(euler2d_rhs(SpectralField(Grid(1, 16, 1.0))), Error);
}

TEST_CASE("Euler rhs conserves circulation and enstrophy at 256^2") {
  const Grid g(2, 256, 2 * M_PI);
  auto w = th::smooth_random(g, 80);
  const auto r = euler2d_rhs(w);
  CHECK(std::abs(r[0]) <= 1e-12 * th::max_abs(r));
  // d/dt sum w^2 = 2 sum w r; one step of size 1e-2 changes enstrophy by at most 1e-10 relative
  double dot = 0;
  const auto& wt = g.weight();
  for (std::size_t i = 0; i < w.size(); ++i) dot += wt[i] * std::real(std::conj(w[i]) * r[i]);
  CHECK(std::abs(2 * dot * 1e-2) <= 1e-10 * l2_squared(w));
}
