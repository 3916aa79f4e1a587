#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rigidlid/multiplier.hpp"
#include "rigidlid/spectral.hpp"

using namespace rigidlid;

TEST_CASE("grid rejects odd or tiny sizes") {
  CHECK_THROWS_AS(Grid(1, 7, 10.0), Error);
  CHECK_THROWS_AS(Grid(1, 6, 10.0), Error);
  CHECK_THROWS_AS(Grid(1, 16, -1.0), Error);
  CHECK_THROWS_AS(Grid(3, 16, 1.0), Error);
}

TEST_CASE("round trip and Parseval over the size matrix") {
  for (int dim : {1, 2})
    for (int n : {8, 16, 64, 250, 256}) {
      if (dim == 2 && n > 64) continue;
      const Grid g(dim, n, 13.0);
      const auto f = th::random_field(g, 7u + n);
      const auto sf = transform_forward(f, g);
      const auto back = transform_backward(sf);
      double num2 = 0, den2 = 0, s2 = 0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        num2 += (back[i] - f[i]) * (back[i] - f[i]);
        den2 += f[i] * f[i];
      }
      const auto& w = g.weight();
      for (std::size_t i = 0; i < sf.size(); ++i) s2 += w[i] * std::norm(sf[i]);
      CAPTURE(dim);
      CAPTURE(n);
      CHECK(std::sqrt(num2 / den2) <= 1e-13);
      CHECK(std::abs(s2 - den2) / den2 <= 1e-12);
    }
}

TEST_CASE("transform shape mismatch is an error") {
  const Grid g(1, 16, 1.0);
  CHECK_THROWS_AS(transform_forward(std::vector<double>(15, 0.0), g), Error);
}

TEST_CASE("constant field lives in the zero mode") {
  const Grid g(1, 32, 5.0);
  const auto sf = transform_forward(std::vector<double>(32, 2.0), g);
  CHECK(std::abs(sf[0] - cplx(2.0 * std::sqrt(32.0))) < 1e-12);
  for (std::size_t i = 1; i < sf.size(); ++i) CHECK(std::abs(sf[i]) < 1e-12);
}

TEST_CASE("single cosine round-trips") {
  const Grid g(1, 64, 2 * M_PI);
  std::vector<double> f(64);
  for (int i = 0; i < 64; ++i) f[i] = std::cos(3 * g.x(i));
  const auto back = transform_backward(transform_forward(f, g));
  for (int i = 0; i < 64; ++i) CHECK(std::abs(back[i] - f[i]) < 1e-14);
}

TEST_CASE("single-mode multiplier value") {
  const Grid g(1, 64, 2 * M_PI);
  std::vector<double> f(64);
  for (int i = 0; i < 64; ++i) f[i] = std::cos(g.x(i));
  MultiplierSpec m;
  m.radial = [](double r) { return 1.0 / std::sqrt(1.0 + r * r / 3.0); };
  const auto out = transform_backward(apply_multiplier(transform_forward(f, g), m));
  for (int i = 0; i < 64; ++i) CHECK(std::abs(out[i] - std::sqrt(0.75) * f[i]) < 1e-13);
}

TEST_CASE("identity and Bessel chain") {
  const Grid g(2, 32, 9.0);
  const auto sf = transform_forward(th::random_field(g, 3), g);
  MultiplierSpec one;
  CHECK(th::max_diff(apply_multiplier(sf, one), sf) == 0.0);
  MultiplierSpec down, up;
  down.radial = [](double r) { return 1.0 / (1.0 + r * r); };
  up.radial = [](double r) { return 1.0 + r * r; };
  CHECK(th::max_diff(apply_multiplier(apply_multiplier(sf, down), up), sf) <= 1e-12 * th::max_abs(sf));
}

TEST_CASE("non-finite symbol is reported") {
  const Grid g(1, 16, 4.0);
  MultiplierSpec m;
  m.radial = [](double r) { return r > 3 ? NAN : 1.0; };
  CHECK_THROWS_AS(apply_multiplier(SpectralField(g), m), Error);
}

TEST_CASE("radial multiplier commutes with grid translation") {
  const Grid g(1, 128, 20.0);
  const auto f = th::random_field(g, 11);
  const int shift = 17;
  std::vector<double> fs(f.size());
  for (int i = 0; i < 128; ++i) fs[(i + shift) % 128] = f[i];
  MultiplierSpec m;
  m.radial = [](double r) { return std::exp(-r) + 1.0 / (2.0 + r); };
  const auto a = transform_backward(apply_multiplier(transform_forward(f, g), m));
  const auto b = transform_backward(apply_multiplier(transform_forward(fs, g), m));
  double err = 0, scale = 0;
  for (int i = 0; i < 128; ++i) {
    err = std::max(err, std::abs(b[(i + shift) % 128] - a[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  CHECK(err <= 1e-12 * scale);
  // modewise: translated coefficients pick up exp(-i k s dx)
  const auto A = apply_multiplier(transform_forward(f, g), m);
  const auto B = apply_multiplier(transform_forward(fs, g), m);
  const auto& k = g.k(0);
  double merr = 0;
  for (std::size_t i = 0; i < A.size(); ++i)
    merr = std::max(merr, std::abs(B[i] - A[i] * std::exp(cplx(0, -k[i] * shift * g.dx()))));
  CHECK(merr <= 1e-12 * th::max_abs(A));
}

TEST_CASE("Hodge projector algebra on random fields") {
  const Grid g(2, 64, 12.0);
  VectorField v{transform_forward(th::random_field(g, 1), g), transform_forward(th::random_field(g, 2), g)};
  for (auto& c : v) {
    c[0] = 0.0;
    zero_nyquist(c);
  }
  const auto pg = riesz_gradient_projector(v);
  const auto pr = riesz_rotational_projector(v);
  const double s = std::max(th::max_abs(v[0]), th::max_abs(v[1]));
  for (int a = 0; a < 2; ++a) CHECK(th::max_diff(pg[a] + pr[a], v[a]) <= 1e-12 * s);
  const auto pgpr = riesz_gradient_projector(pr);
  const auto pgpg = riesz_gradient_projector(pg);
  const auto prpr = riesz_rotational_projector(pr);
  for (int a = 0; a < 2; ++a) {
    CHECK(th::max_abs(pgpr[a]) <= 1e-12 * s);
    CHECK(th::max_diff(pgpg[a], pg[a]) <= 1e-12 * s);
    CHECK(th::max_diff(prpr[a], pr[a]) <= 1e-12 * s);
  }
  CHECK(th::max_abs(perp_divergence(pg)) <= 1e-11 * s);
}

TEST_CASE("pure gradient and pure rotational fields") {
  const Grid g(2, 64, 16.0);
  const auto phi = transform_forward(th::gaussian(g, 1.0, 1.3), g);
  const auto grad = gradient(phi);
  const auto perp = perp_gradient(phi);
  const auto pg = riesz_gradient_projector(grad);
  const auto pr = riesz_rotational_projector(perp);
  for (int a = 0; a < 2; ++a) {
    CHECK(th::max_diff(pg[a], grad[a]) <= 1e-12);
    CHECK(th::max_abs(riesz_rotational_projector(grad)[a]) <= 1e-12);
    CHECK(th::max_diff(pr[a], perp[a]) <= 1e-12);
  }
  CHECK_THROWS_AS(riesz_gradient_projector(VectorField{SpectralField(Grid(1, 16, 1.0))}), Error);
}

TEST_CASE("perp convention is (-d2, d1)") {
  const Grid g(2, 32, 2 * M_PI);
  std::vector<double> f(g.physical_size());
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) f[i * 32 + j] = std::sin(g.x(j));  // axis 1 varies with j
  const auto p = perp_gradient(transform_forward(f, g));
  const auto u0 = transform_backward(p[0]);
  const auto u1 = transform_backward(p[1]);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      CHECK(std::abs(u0[i * 32 + j] + std::cos(g.x(j))) < 1e-12);
      CHECK(std::abs(u1[i * 32 + j]) < 1e-12);
    }
}

TEST_CASE("dyadic partition of unity") {
  for (int dim : {1, 2}) {
    const Grid g(dim, dim == 1 ? 256 : 64, 30.0);
    const auto sf = transform_forward(th::random_field(g, 5), g);
    const auto [jlo, jhi] = dyadic_range(g);
    SpectralField sum = low_block(sf, jlo);
    for (int j = jlo; j <= jhi; ++j) sum += dyadic_filter(sf, j);
    CHECK(th::max_diff(sum, sf) <= 1e-12 * th::max_abs(sf));
    for (int j = jlo; j <= jhi; ++j) {
      const auto pj = dyadic_filter(sf, j);
      CHECK(l2_norm(dyadic_filter(pj, j)) <= l2_norm(pj) + 1e-15);
    }
  }
  for (double y : {0.0, 0.3, 0.5, 0.75, 1.0, 2.0}) {
    CHECK(phi0(y) >= 0.0);
    CHECK(phi0(y) <= 1.0);
  }
  CHECK(phi0(0.5) == 1.0);
  CHECK(phi0(1.0) == 0.0);
}

TEST_CASE("lowpass cutoff tends to identity as mu shrinks") {
  const Grid g(1, 128, 40.0);
  const auto sf = th::smooth_random(g, 9);
  const auto out = lowpass_cutoff(sf, 1e-6);
  CHECK(th::max_diff(out, sf) == 0.0);
}

TEST_CASE("gaussian weight closed forms") {
  const Grid g(1, 2048, 40.0);
  const auto w = gaussian_weight(std::vector<double>(2048, 1.0), g, {0.0});
  CHECK_FALSE(w.boundary_warning);
  double s = 0;
  for (double v : w.values) s += v * v * g.dx();
  CHECK(std::abs(std::sqrt(s) - std::pow(M_PI / 2, 0.25)) < 1e-10);
  // bump at x0 sees weight 1
  const int i0 = 1178;
  const auto bump = th::gaussian(g, 1.0, 0.1, g.x(i0));
  CHECK(std::abs(gaussian_weight(bump, g, {g.x(i0)}).values[i0] - bump[i0]) < 1e-14);
  // shift covariance
  const auto f = th::gaussian(g, 1.0, 2.0, -1.0);
  std::vector<double> fs(2048);
  const int sh = 64;
  for (int i = 0; i + sh < 2048; ++i) fs[i + sh] = f[i];
  auto norm = [&](const std::vector<double>& v) {
    double a = 0;
    for (double x : v) a += x * x;
    return std::sqrt(a * g.dx());
  };
  const double a = norm(gaussian_weight(f, g, {-1.0}).values);
  const double b = norm(gaussian_weight(fs, g, {-1.0 + sh * g.dx()}).values);
  CHECK(std::abs(a - b) <= 1e-12 * a);
  CHECK(gaussian_weight(f, g, {19.0}).boundary_warning);
  CHECK_THROWS_AS(gaussian_weight(f, g, {25.0}), Error);
}
