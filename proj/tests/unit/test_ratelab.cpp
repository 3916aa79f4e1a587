#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "rigidlid/config.hpp"
#include "rigidlid/euler2d.hpp"
#include "rigidlid/multiplier.hpp"
#include "rigidlid/phase.hpp"
#include "rigidlid/ratelab.hpp"

using namespace rigidlid;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.tag = "test";
  s.n = 128;
  s.length = 40.0;
  s.t_end = 0.2;
  s.n_snapshots = 8;
  s.eps_list = {0.25, 0.125, 0.0625};
  NormRequest a;
  a.q = kInf;
  a.r = 2.0;
  a.target = 0.25;
  NormRequest b;
  b.comparison = Comparison::Zero;
  b.kind = NormKind::Morawetz;
  b.target = 0.5;
  s.norms = {a, b};
  return s;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("fit recovers exact power laws") {
  std::vector<double> eps{0.125, 0.0625, 0.03125, 0.015625}, v, w, lg;
  for (double e : eps) {
    v.push_back(std::pow(e, 0.5));
    w.push_back(3 * std::pow(e, 0.25));
    lg.push_back(std::sqrt(e * std::log(1 + 1 / (e * e))));
  }
  const auto a = fit_rate(eps, v);
  CHECK(std::abs(a.slope - 0.5) <= 1e-10);
  CHECK(a.residual <= 1e-12);
  const auto b = fit_rate(eps, w);
  CHECK(std::abs(b.slope - 0.25) <= 1e-10);
  CHECK(std::abs(b.intercept - std::log(3.0)) <= 1e-10);
  const auto c = fit_rate(eps, lg, FitModel::PowerWithLog, 1.0, 1.0);
  CHECK(std::abs(c.slope - 0.5) <= 1e-6);
  CHECK_THROWS_AS(fit_rate({0.1, 0.05, 0.02}, {1.0, -1.0, 0.5}), Error);
  CHECK_THROWS_AS(fit_rate({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(fit_rate({0.1, 0.05}, {1.0, 2.0}), Error);
  CHECK(fit_abscissa(0.1, FitModel::PurePower, 0.25, 1.0, 0.5) == doctest::Approx(0.2));
}

TEST_CASE("verdicts: faster rates pass, flag band, too few points") {
  ExperimentSpec s = small_spec();
  s.tolerance = 0.1;
  s.norms.resize(1);
  s.norms[0].target = 0.5;
  s.norms[0].flag_floor = 0.25;
  auto table_for = [&](double slope, int npts) {
    RawTable t;
    for (int i = 0; i < npts; ++i) {
      RawRow r;
      r.theorem_tag = s.tag;
      r.eps = std::pow(2.0, -i - 2);
      r.mu = 1.0;
      r.q = kInf;
      r.r = 2.0;
      r.norm_kind = "lqlr";
      r.comparison = "semigroup_corrector";
      r.value = std::pow(r.eps, slope);
      t.rows.push_back(r);
    }
    return t;
  };
  CHECK(fit_report(s, table_for(0.9, 4)).fits[0].verdict == "pass");
  CHECK(fit_report(s, table_for(0.41, 4)).fits[0].verdict == "pass");
  CHECK(fit_report(s, table_for(0.3, 4)).fits[0].verdict == "flag");
  CHECK(fit_report(s, table_for(0.1, 4)).fits[0].verdict == "fail");
  CHECK_FALSE(fit_report(s, table_for(0.1, 4)).all_pass);
  const auto two = fit_report(s, table_for(0.5, 2));
  CHECK(two.fits[0].verdict == "none");
  CHECK_FALSE(two.fits[0].fitted);
}

TEST_CASE("sweep: ordering, single point, determinism") {
  ExperimentSpec s = small_spec();
  const auto a = run_sweep(s);
  ExperimentSpec r = s;
  r.eps_list = {0.0625, 0.25, 0.125};
  const auto b = run_sweep(r);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].eps == b.rows[i].eps);
    CHECK(a.rows[i].value == b.rows[i].value);
  }
  CHECK(a.rows.size() == 6);
  CHECK(a.failed_cells == 0);
  ExperimentSpec par = s;
  const auto c = run_sweep(par, {2, true});
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].value == c.rows[i].value);

  // norms with q=inf and r=inf stay apart
  ExperimentSpec mix = s;
  NormRequest qr = s.norms[0];
  qr.q = 4.0;
  qr.r = kInf;
  mix.norms.push_back(qr);
  const auto rep = fit_report(mix, run_sweep(mix));
  for (const auto& f : rep.fits) CHECK(f.eps.size() == 3);

  ExperimentSpec one = s;
  one.eps_list = {0.1};
  one.norms.resize(1);
  CHECK(run_sweep(one).rows.size() == 1);
}

TEST_CASE("zero comparison on linear dynamics equals the direct measurement") {
  ExperimentSpec s = small_spec();
  s.solver.nonlinear = false;
  s.eps_list = {0.1};
  NormRequest z;
  z.comparison = Comparison::Zero;
  z.q = 4.0;
  z.r = kInf;
  s.norms = {z};
  const auto t = run_sweep(s);
  REQUIRE(t.rows.size() == 1);
  const Grid g(1, s.n, s.length);
  ModelSpec m = s.model;
  m.eps = 0.1;
  SolverConfig c = s.solver;
  c.snapshot_times = s.snapshot_times();
  const auto tr = run(m, make_initial_state(g, s.init), s.t_end, c);
  const double direct = mixed_norm(tr, Components::All, {4.0, kInf, ""}).value;
  CHECK(std::abs(t.rows[0].value - direct) <= 1e-12 * direct);
}

TEST_CASE("solver aborts are recorded per cell") {
  ExperimentSpec s = small_spec();
  s.length = 6.0;
  s.n = 32;
  const auto t = run_sweep(s);
  CHECK(t.failed_cells == 3);
  for (const auto& r : t.rows) CHECK(r.run_status != "ok");
}

TEST_CASE("2D Euler comparison starts from identical rotational data") {
  const Grid g(2, 64, 20.0);
  InitialData init;
  const State u0 = make_initial_state(g, init);
  SolverConfig c;
  c.snapshot_times = {0.05};
  const auto euler = run_euler2d(perp_divergence(u0.v), 0.1, c);
  ModelSpec m;
  m.dim = 2;
  m.eps = 0.1;
  const auto tr = run(m, u0, 0.1, c);
  const auto snaps = comparison_snapshots(tr, u0, Comparison::EulerRotational, &euler);
  double e0 = 0;
  for (const auto& comp : snaps[0])
    for (double v : comp) e0 = std::max(e0, std::abs(v));
  // roundoff through curl and inverse Laplacian only
  CHECK(e0 <= 1e-11);
}

TEST_CASE("report files, raw-only guard, idempotent re-render") {
  ExperimentSpec s = small_spec();
  const auto t = run_sweep(s);
  const auto rep = fit_report(s, t);
  const fs::path d = fresh_dir("rigidlid_report_test");
  render_report(s, t, rep, d.string());
  CHECK(fs::exists(d / "raw.csv"));
  CHECK(fs::exists(d / "spec.json"));
  CHECK(fs::exists(d / "report.json"));
  int svg = 0;
  for (const auto& e : fs::directory_iterator(d / "plots")) svg += e.path().extension() == ".svg";
  CHECK(svg == 2);
  const std::string header = slurp(d / "raw.csv").substr(0, slurp(d / "raw.csv").find('\n'));
  CHECK(header == "theorem_tag,model,eps,mu,q,r,norm_kind,comparison,value,run_status");
  const std::string first = slurp(d / "report.json");
  rerender_report(d.string());
  CHECK(slurp(d / "report.json") == first);
  const auto back = read_raw_csv((d / "raw.csv").string());
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(back.rows[i].value == t.rows[i].value);

  ExperimentSpec two = s;
  two.eps_list = {0.25, 0.125};
  const auto t2 = run_sweep(two);
  const auto r2 = fit_report(two, t2);
  for (const auto& f : r2.fits) CHECK_FALSE(f.fitted);
  const fs::path d2 = fresh_dir("rigidlid_report_test2");
  render_report(two, t2, r2, d2.string());
  CHECK(fs::exists(d2 / "raw.csv"));
  CHECK_FALSE(fs::exists(d2 / "plots"));

  const fs::path empty = fresh_dir("rigidlid_report_empty");
  fs::create_directories(empty);
  CHECK_THROWS_AS(rerender_report(empty.string()), Error);
  CHECK(fs::is_empty(empty));
  fs::remove_all(d);
  fs::remove_all(d2);
  fs::remove_all(empty);
}

TEST_CASE("presets and target resolution") {
  const auto s = theorem_suite("thm2.1");
  bool found = false;
  for (const auto& n : s.norms) {
    if (n.comparison == Comparison::SemigroupCorrector && std::isinf(n.q) && n.r == 2.0) {
      CHECK(n.target == doctest::Approx(0.25));
      found = true;
    }
    if (n.kind == NormKind::Morawetz) {
      CHECK(n.target == doctest::Approx(0.5));
      CHECK(n.mu_uniform);
    }
  }
  CHECK(found);
  CHECK(s.mu_list.size() == 3);
  ModelSpec classical;
  CHECK(resolve_target("1/(2p)", classical) == doctest::Approx(1.0 / 6));
  CHECK(resolve_target("1/(2p0)", classical) == doctest::Approx(0.5));
  CHECK(resolve_target("sigma/2 + 1/4", classical) == doctest::Approx(0.75));
  CHECK_THROWS_AS(resolve_target("1/(2q", classical), Error);
  CHECK_THROWS_AS(theorem_suite("thm9.9"), Error);
  CHECK(theorem_suite("Thm4_2").tag == "thm4.2");
  for (const auto& tag : theorem_tags()) {
    const auto full = theorem_suite(tag);
    const auto smoke = theorem_suite(tag, true);
    CHECK(smoke.n <= full.n);
    CHECK(smoke.eps_list.size() <= full.eps_list.size());
    CHECK_FALSE(full.norms.empty());
  }
  // abcd presets take their exponents from the phase classification
  const auto t42 = theorem_suite("thm4.2");
  const auto k = classify(t42.model.abcd);
  CHECK(t42.norms[0].target == doctest::Approx(1.0 / (2 * k.p)));
}

TEST_CASE("config parsing") {
  const std::string ok = R"({"model": {"kind": "green_naghdi", "dim": 1, "eps": 0.2, "mu": 0.5, "h0": 0.4},
    "grid": {"n": 64, "length": 30}, "t_end": 0.5, "n_snapshots": 5})";
  const auto c = simulation_from_json(parse_json_text(ok), ok);
  CHECK(c.model.kind == ModelKind::GreenNaghdi);
  CHECK(c.model.h0 == 0.4);
  CHECK(c.n == 64);
  // echo round trip
  const auto again = simulation_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));

  const std::string unknown = "{\n  \"model\": {\"kind\": \"classical\"},\n  \"colour\": 3\n}";
  try {
    simulation_from_json(parse_json_text(unknown), unknown);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
    CHECK(std::string(e.what()).find("3:") != std::string::npos);
  }
  try {
    parse_json_text("{\n \"t_end\": ,\n}", "cfg.json");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("cfg.json:2:") != std::string::npos);
  }
  CHECK_THROWS_AS(simulation_from_json(parse_json_text(R"({"grid": {"n": 7}})")), Error);
  CHECK_THROWS_AS(simulation_from_json(parse_json_text(R"({"solver": {"depth_floor_action": "panic"}})")), Error);
  CHECK(exponent_from_json(json("inf"), "q") == kInf);
  CHECK_THROWS_AS(exponent_from_json(json("big"), "q"), Error);

  const auto spec = theorem_suite("thm3.2");
  const auto back = experiment_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));
}
