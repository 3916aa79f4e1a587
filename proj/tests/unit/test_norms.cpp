#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rigidlid/multiplier.hpp"
#include "rigidlid/norms.hpp"
#include "rigidlid/solver.hpp"

using namespace rigidlid;

namespace {

using Snaps = std::vector<std::vector<std::vector<double>>>;

Snaps constant_in_time(const std::vector<double>& f, std::size_t n) { return Snaps(n, {f}); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("spatial norms: constants, Gaussian, sup of sine") {
  const Grid g(1, 512, 40.0);
  CHECK(spatial_norm(std::vector<double>(512, -3.0), g, 2.0) == doctest::Approx(3.0 * std::sqrt(40.0)).epsilon(1e-13));
  CHECK(spatial_norm(th::gaussian(g, 1.0, 1.0), g, 2.0) == doctest::Approx(std::pow(M_PI / 2, 0.25)).epsilon(1e-10));
  // 48 points put pi/2 on the grid
  const Grid g2(1, 48, 2 * M_PI);
  std::vector<double> s(48);
  for (int i = 0; i < 48; ++i) s[i] = std::sin(g2.x(i));
  CHECK(std::abs(spatial_norm(s, g2, kInf) - 1.0) <= 1e-10);
}

TEST_CASE("mixed norms: constants, sup, ramp") {
  const Grid g(1, 256, 20.0);
  const auto t = linspace(0, 2, 65);
  const auto val = mixed_norm(t, constant_in_time(std::vector<double>(256, 0.5), 65), g, {2.0, 2.0, ""}).value;
  CHECK(val == doctest::Approx(0.5 * std::sqrt(20.0 * 2.0)).epsilon(1e-12));

  const auto f = th::gaussian(g, 1.0, 1.0);
  Snaps ramp;
  std::vector<double> sup_values;
  for (double ti : t) {
    std::vector<double> x(f);
    for (auto& v : x) v *= ti;
    ramp.push_back({x});
  }
  const double gn = spatial_norm(f, g, 2.0);
  const auto q2 = mixed_norm(t, ramp, g, {2.0, 2.0, ""});
  CHECK(q2.value == doctest::Approx(gn * std::pow(2.0, 1.5) / std::sqrt(3.0)).epsilon(1e-3));
  const auto qi = mixed_norm(t, ramp, g, {kInf, 2.0, ""});
  double mx = 0;
  for (double v : qi.values) mx = std::max(mx, v);
  CHECK(qi.value == mx);
  // finer time sampling converges to the exact integral
  const auto tf = linspace(0, 2, 2001);
  Snaps rf;
  for (double ti : tf) {
    std::vector<double> x(f);
    for (auto& v : x) v *= ti;
    rf.push_back({x});
  }
  CHECK(mixed_norm(tf, rf, g, {2.0, 2.0, ""}).value == doctest::Approx(gn * std::pow(2.0, 1.5) / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("sparse snapshots are flagged") {
  const Grid g(1, 64, 20.0);
  const auto t = linspace(0, 2, 5);
  CHECK(mixed_norm(t, constant_in_time(std::vector<double>(64, 1.0), 5), g, {2.0, 2.0, ""}).sparse);
}

TEST_CASE("homogeneity of degree one") {
  const Grid g(2, 32, 16.0);
  const auto f = th::random_field(g, 4);
  std::vector<double> f3(f);
  for (auto& v : f3) v *= -3.0;
  for (double r : {2.0, 3.0, 4.0, kInf}) {
    const double a = spatial_norm(f, g, r), b = spatial_norm(f3, g, r);
    CHECK(std::abs(b - 3.0 * a) <= 1e-14 * b);
  }
  const auto t = linspace(0, 1, 17);
  const double m1 = morawetz_norm(t, constant_in_time(f, 17), g).value;
  const double m3 = morawetz_norm(t, constant_in_time(f3, 17), g).value;
  CHECK(std::abs(m3 - 3.0 * m1) <= 1e-14 * m3);
  const auto sf = transform_forward(f, g);
  CHECK(std::abs(sobolev_norm((-3.0) * sf, 2.0) - 3.0 * sobolev_norm(sf, 2.0)) <= 1e-14 * sobolev_norm(sf, 2.0) * 3);
  const double q = mixed_norm(t, constant_in_time(f, 17), g, {4.0, 4.0, ""}).value;
  const double q3 = mixed_norm(t, constant_in_time(f3, 17), g, {4.0, 4.0, ""}).value;
  CHECK(std::abs(q3 - 3 * q) <= 1e-14 * q3);
}

TEST_CASE("restricting the time window does not increase the mixed norm") {
  const Grid g(1, 512, 80.0);
  SolverConfig c;
  for (int i = 1; i < 40; ++i) c.snapshot_times.push_back(i * 0.025);
  ModelSpec m;
  m.eps = 0.1;
  const State u0 = state_from_physical(g, th::gaussian(g, 0.4, 1.0), {std::vector<double>(512, 0.0)});
  const auto tr = run(m, u0, 1.0, c);
  for (auto qr : {std::pair{kInf, 2.0}, std::pair{4.0, kInf}, std::pair{2.0, 2.0}}) {
    const MixedNormSpec s{qr.first, qr.second, ""};
    const double full = mixed_norm(tr, Components::All, s).value;
    Trajectory half = tr;
    half.snapshots.resize(20);
    CHECK(mixed_norm(half, Components::All, s, 0.0).value <= full);
  }
  // Morawetz against the unweighted L2_t L2_x norm
  CHECK(morawetz_norm(tr, Components::All).value <= mixed_norm(tr, Components::All, {2.0, 2.0, ""}).value);
}

TEST_CASE("Sobolev and X^k_mu") {
  const Grid g(1, 128, 2 * M_PI);
  const auto f = th::random_field(g, 8);
  const auto sf = transform_forward(f, g);
  CHECK(sobolev_norm(sf, 0.0) == doctest::Approx(spatial_norm(f, g, 2.0)).epsilon(1e-12));
  std::vector<double> c(128);
  for (int i = 0; i < 128; ++i) c[i] = std::cos(5 * g.x(i));
  const auto cf = transform_forward(c, g);
  CHECK(sobolev_norm(cf, 3.0) == doctest::Approx(std::pow(26.0, 1.5) * sobolev_norm(cf, 0.0)).epsilon(1e-12));
  State u = make_state(g);
  u.zeta = sf;
  u.v[0] = cf;
  double prev = x_k_mu_norm(u, 3, 1.0);
  for (double mu : {0.1, 0.01, 1e-4, 0.0}) {
    const double x = x_k_mu_norm(u, 3, mu);
    CHECK(x <= prev);
    prev = x;
  }
  CHECK(prev == doctest::Approx(sobolev_norm(sf, 3) + sobolev_norm(cf, 3)).epsilon(1e-14));
}

TEST_CASE("Morawetz functional") {
  const Grid g(1, 1024, 60.0);
  const auto t = linspace(0, 1, 33);
  CHECK(morawetz_norm(t, constant_in_time(std::vector<double>(1024, 0.0), 33), g).value == 0.0);

  // static field: sup over x0 of the weighted L2 norm
  const auto f = th::gaussian(g, 1.0, 0.7, 0.0);
  const double st = morawetz_norm(t, constant_in_time(f, 33), g, {0.0, 6.5}).value;
  // x0 = 0 is a grid point and maximizes by symmetry
  const auto w = gaussian_weight(f, g, {0.0});
  CHECK(st == doctest::Approx(spatial_norm(w.values, g, 2.0)).epsilon(1e-12));

  // moving bump: shifting the whole path leaves the value unchanged
  auto moving = [&](double x0, double v) {
    Snaps s;
    for (double ti : t) s.push_back({th::gaussian(g, 1.0, 0.7, x0 + v * ti)});
    return morawetz_norm(t, s, g, {0.0, 6.5}).value;
  };
  for (double v : {0.0, 1.0, -4.0}) {
    const double base = moving(0.0, v);
    for (int cells : {7, -40, 100}) CHECK(std::abs(moving(cells * g.dx(), v) - base) <= 1e-4 * base);
  }
}
