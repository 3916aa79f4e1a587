#include "rigidlid/ratelab.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "rigidlid/config.hpp"
#include "rigidlid/euler2d.hpp"
#include "rigidlid/multiplier.hpp"
#include "rigidlid/phase.hpp"

namespace fs = std::filesystem;

namespace rigidlid {

const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::SemigroupCorrector: return "semigroup_corrector";
    case Comparison::EulerRotational: return "euler_rotational";
    case Comparison::Zero: return "zero";
  }
  return "?";
}

const char* to_string(NormKind k) { return k == NormKind::LqLr ? "lqlr" : "morawetz"; }
const char* to_string(FitModel f) { return f == FitModel::PurePower ? "pure_power" : "power_with_log"; }

Comparison comparison_from_string(const std::string& s) {
  if (s == "semigroup_corrector") return Comparison::SemigroupCorrector;
  if (s == "euler_rotational") return Comparison::EulerRotational;
  if (s == "zero") return Comparison::Zero;
  fail(ErrorCode::InvalidArgument, "unknown comparison: " + s);
}

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "lqlr") return NormKind::LqLr;
  if (s == "morawetz") return NormKind::Morawetz;
  fail(ErrorCode::InvalidArgument, "unknown norm kind: " + s);
}

FitModel fit_model_from_string(const std::string& s) {
  if (s == "pure_power") return FitModel::PurePower;
  if (s == "power_with_log") return FitModel::PowerWithLog;
  fail(ErrorCode::InvalidArgument, "unknown fit model: " + s);
}

namespace {

std::string fmt_exp(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool same(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string NormRequest::key() const {
  return std::string(to_string(comparison)) + "/" + to_string(kind) + "/q=" + fmt_exp(q) +
         "/r=" + fmt_exp(r);
}

// ------------------------------------------------------------ initial data

State make_initial_state(const Grid& grid, const InitialData& init) {
  require(init.width > 0.0, ErrorCode::InvalidArgument, "initial width must be positive");
  const int n = grid.n();
  const double w2 = init.width * init.width;
  std::mt19937_64 rng(init.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  struct Bump {
    double amp, x, y;
  };
  std::vector<Bump> bumps;
  if (init.noise != 0.0)
    for (int i = 0; i < 4; ++i) {
      const double a = unit(rng), x = 2.0 * unit(rng), y = 2.0 * unit(rng);
      bumps.push_back({init.noise * init.zeta_amp * a, x, y});
    }

  if (grid.dim() == 1) {
    std::vector<double> z(n), v(n);
    for (int i = 0; i < n; ++i) {
      const double x = grid.x(i);
      const double e = std::exp(-x * x / w2);
      z[i] = init.zeta_amp * e;
      for (const auto& b : bumps) z[i] += b.amp * std::exp(-(x - b.x) * (x - b.x) / w2);
      v[i] = init.v_amp * e;
    }
    return state_from_physical(grid, z, {v});
  }

  std::vector<double> z(grid.physical_size()), phi(z.size()), psi(z.size());
  const double o = init.vortex_offset;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = grid.x(i), y = grid.x(j);
      const std::size_t k = std::size_t(i) * n + j;
      const double e = std::exp(-(x * x + y * y) / w2);
      z[k] = init.zeta_amp * e;
      for (const auto& b : bumps)
        z[k] += b.amp * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / w2);
      phi[k] = e;
      psi[k] = std::exp(-((x - o) * (x - o) + y * y) / w2) + std::exp(-((x + o) * (x + o) + y * y) / w2);
    }
  State u = make_state(grid);
  u.zeta = transform_forward(z, grid);
  zero_nyquist(u.zeta);
  const VectorField gp = gradient(transform_forward(phi, grid));
  const VectorField rp = perp_gradient(transform_forward(psi, grid));
  for (int a = 0; a < 2; ++a) {
    u.v[a] = init.grad_amp * gp[a];
    u.v[a].axpy(init.rot_amp, rp[a]);
  }
  return u;
}

// ------------------------------------------------------------------ spec

void ExperimentSpec::validate() const {
  require(!eps_list.empty(), ErrorCode::Config, "eps_list is empty");
  for (double e : eps_list) require(e > 0.0 && e <= 1.0, ErrorCode::Config, "eps values must lie in (0, 1]");
  require(!mu_list.empty(), ErrorCode::Config, "mu_list is empty");
  for (double m : mu_list) require(m > 0.0 && m <= 1.0, ErrorCode::Config, "mu values must lie in (0, 1]");
  require(n >= 8 && n % 2 == 0, ErrorCode::Config, "grid.n must be even and >= 8");
  require(length > 0.0, ErrorCode::Config, "grid.length must be positive");
  require(t_end > 0.0 && std::isfinite(t_end), ErrorCode::Config, "t_end must be positive");
  require(n_snapshots >= 1, ErrorCode::Config, "n_snapshots must be >= 1");
  require(tolerance >= 0.0, ErrorCode::Config, "tolerance must be >= 0");
  require(!norms.empty(), ErrorCode::Config, "no norms requested");
  for (const auto& nr : norms) {
    require(nr.q >= 1.0 && nr.r >= 1.0, ErrorCode::Config, "norm exponents must be >= 1");
    require(nr.comparison != Comparison::EulerRotational || model.dim == 2, ErrorCode::Config,
            "Euler comparison needs a 2D model");
  }
  ModelSpec m = model;
  m.eps = eps_list.front();
  m.mu = mu_list.front();
  try {
    m.validate();
    solver.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
}

std::vector<double> ExperimentSpec::snapshot_times() const {
  std::vector<double> t;
  for (int s = 1; s <= n_snapshots; ++s) t.push_back(t_end * s / n_snapshots);
  return t;
}

// ---------------------------------------------------------------- fitting

double fit_abscissa(double eps, FitModel model, double mu, double t_end, double mu_power) {
  if (model == FitModel::PurePower) return eps / std::pow(mu, mu_power);
  return eps * std::log(1.0 + mu * t_end / (eps * eps)) / std::sqrt(mu);
}

FitResult fit_rate(const std::vector<double>& eps, const std::vector<double>& values, FitModel model,
                   double mu, double t_end) {
  require(eps.size() == values.size(), ErrorCode::ShapeMismatch, "eps and values differ in length");
  require(values.size() >= 3, ErrorCode::InvalidArgument, "rate fit needs at least three points");
  for (double v : values) require(v > 0.0, ErrorCode::InvalidArgument, "rate fit needs positive values");
  std::vector<double> x;
  for (double e : eps) x.push_back(fit_abscissa(e, model, mu, t_end, 0.0));
  const LogLogFit f = loglog_fit(x, values);
  return {f.slope, f.intercept, f.residual};
}

// ------------------------------------------------------------ comparisons

std::vector<std::vector<std::vector<double>>> comparison_snapshots(
    const Trajectory& traj, const State& u0, Comparison c, const VorticityTrajectory* euler) {
  std::vector<std::vector<std::vector<double>>> out;
  const bool two = traj.model.dim == 2;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const State& u = traj.snapshots[s];
    switch (c) {
      case Comparison::SemigroupCorrector: {
        const State ref = corrector_reference(traj.model, u0, u.t);
        State d = u;
        if (two) d.v = riesz_gradient_projector(u.v);
        d.axpy(-1.0, ref);
        out.push_back(physical_components(d, Components::All));
        break;
      }
      case Comparison::Zero:
        out.push_back(physical_components(u, two ? Components::GradPart : Components::All));
        break;
      case Comparison::EulerRotational: {
        require(two && euler != nullptr, ErrorCode::InvalidArgument, "Euler comparison needs a 2D reference");
        require(s < euler->times.size() && std::abs(euler->times[s] - u.t) <= 1e-12 * std::max(1.0, u.t),
                ErrorCode::ShapeMismatch, "Euler reference times do not match the trajectory");
        const VectorField rot = riesz_rotational_projector(u.v);
        const VectorField ut = biot_savart(euler->omega[s]);
        out.push_back({transform_backward(rot[0] - ut[0]), transform_backward(rot[1] - ut[1])});
        break;
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------ sweep

namespace {

struct Cell {
  double eps, mu;
  std::vector<std::size_t> norms;
  std::vector<double> values;
  std::string status = "ok";
};

bool norm_applies(const NormRequest& n, double mu) {
  if (n.mus.empty()) return true;
  for (double m : n.mus)
    if (same(m, mu)) return true;
  return false;
}

std::string model_label(const ModelSpec& m) {
  std::string s = to_string(m.kind);
  s += m.dim == 2 ? "_2d" : "_1d";
  return s;
}

}  // namespace

RawTable run_sweep(const ExperimentSpec& spec, const SweepOptions& opt) {
  spec.validate();
  std::vector<double> eps = spec.eps_list;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  eps.erase(std::unique(eps.begin(), eps.end(), same), eps.end());

  const Grid grid(spec.model.dim, spec.n, spec.length);
  const State u0 = make_initial_state(grid, spec.init);
  SolverConfig solver = spec.solver;
  solver.snapshot_times = spec.snapshot_times();

  std::vector<Cell> cells;
  for (double mu : spec.mu_list)
    for (double e : eps) {
      Cell c{e, mu, {}, {}, "ok"};
      for (std::size_t k = 0; k < spec.norms.size(); ++k)
        if (norm_applies(spec.norms[k], mu)) c.norms.push_back(k);
      if (!c.norms.empty()) cells.push_back(c);
    }

  if (!opt.quiet) {
    double steps = 0.0;
    for (const auto& c : cells) steps += std::ceil(spec.t_end / solver.dt(c.eps));
    std::fprintf(stderr, "sweep %s: %zu cells, about %.0f steps on a %d^%d grid\n", spec.tag.c_str(),
                 cells.size(), steps, spec.n, spec.model.dim);
  }

  VorticityTrajectory euler;
  bool have_euler = false;
  for (const auto& n : spec.norms) have_euler |= n.comparison == Comparison::EulerRotational;
  std::string euler_status = "ok";
  if (have_euler) {
    try {
      euler = run_euler2d(perp_divergence(u0.v), spec.t_end, solver);
    } catch (const Error& e) {
      euler_status = std::string("abort:") + to_string(e.code());
    }
  }

  auto work = [&](Cell& c) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ModelSpec m = spec.model;
      m.eps = c.eps;
      m.mu = c.mu;
      const Trajectory traj = run(m, u0, spec.t_end, solver);
      for (std::size_t k : c.norms) {
        const NormRequest& nr = spec.norms[k];
        if (nr.comparison == Comparison::EulerRotational && euler_status != "ok") {
          c.values.push_back(std::nan(""));
          c.status = euler_status;
          continue;
        }
        const auto snaps = comparison_snapshots(traj, u0, nr.comparison, have_euler ? &euler : nullptr);
        if (nr.kind == NormKind::Morawetz) {
          c.values.push_back(morawetz_norm(traj.times(), snaps, grid).value);
        } else {
          MixedNormSpec ms;
          ms.q = nr.q;
          ms.r = nr.r;
          c.values.push_back(mixed_norm(traj.times(), snaps, grid, ms).value);
        }
      }
    } catch (const Error& e) {
      c.status = std::string("abort:") + to_string(e.code());
      c.values.assign(c.norms.size(), std::nan(""));
    } catch (const std::exception& e) {
      c.status = "error";
      c.values.assign(c.norms.size(), std::nan(""));
    }
    if (!opt.quiet) {
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "  eps=%g mu=%g %s (%.1fs)\n", c.eps, c.mu, c.status.c_str(), dt);
    }
  };

  const int jobs = std::max(1, std::min<int>(opt.jobs, int(cells.size())));
  if (jobs == 1) {
    for (auto& c : cells) work(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) work(cells[i]);
      });
    for (auto& t : pool) t.join();
  }

  RawTable table;
  const std::string label = model_label(spec.model);
  for (const auto& c : cells) {
    if (c.status != "ok") ++table.failed_cells;
    for (std::size_t i = 0; i < c.norms.size(); ++i) {
      const NormRequest& nr = spec.norms[c.norms[i]];
      RawRow row;
      row.theorem_tag = spec.tag;
      row.model = label;
      row.eps = c.eps;
      row.mu = c.mu;
      row.q = nr.q;
      row.r = nr.r;
      row.norm_kind = to_string(nr.kind);
      row.comparison = to_string(nr.comparison);
      row.value = c.values[i];
      row.run_status = c.status;
      table.rows.push_back(row);
    }
  }
  return table;
}

// ----------------------------------------------------------------- report

RateReport fit_report(const ExperimentSpec& spec, const RawTable& table) {
  RateReport rep;
  rep.tag = spec.tag;
  rep.failed_cells = table.failed_cells;
  bool ok = true;
  bool any = false;
  for (const auto& nr : spec.norms) {
    Uniformity uni;
    uni.key = nr.key();
    for (double mu : spec.mu_list) {
      if (!norm_applies(nr, mu)) continue;
      NormFit nf;
      nf.key = nr.key();
      nf.norm = nr;
      nf.mu = mu;
      std::vector<std::pair<double, double>> pts;
      for (const auto& row : table.rows) {
        if (row.run_status != "ok" || !same(row.mu, mu)) continue;
        if (row.norm_kind != to_string(nr.kind) || row.comparison != to_string(nr.comparison)) continue;
        if (!(row.q == nr.q || same(row.q, nr.q)) || !(row.r == nr.r || same(row.r, nr.r))) continue;
        pts.emplace_back(row.eps, row.value);
      }
      std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
      for (auto& p : pts) {
        nf.eps.push_back(p.first);
        nf.values.push_back(p.second);
      }
      const bool positive = std::all_of(nf.values.begin(), nf.values.end(), [](double v) { return v > 0.0; });
      nf.verdict = "none";
      if (nf.eps.size() >= 3 && positive) {
        std::vector<double> x;
        for (double e : nf.eps) x.push_back(fit_abscissa(e, nr.fit, mu, spec.t_end, spec.mu_power));
        const LogLogFit f = loglog_fit(x, nf.values);
        nf.fit = {f.slope, f.intercept, f.residual};
        nf.fitted = true;
        any = true;
        if (nf.fit.slope >= nr.target - spec.tolerance)
          nf.verdict = "pass";
        else if (nr.flag_floor >= 0.0 && nf.fit.slope >= nr.flag_floor - spec.tolerance)
          nf.verdict = "flag";
        else
          nf.verdict = "fail";
        if (nf.verdict == "fail") ok = false;
        uni.mus.push_back(mu);
        uni.slopes.push_back(nf.fit.slope);
      }
      rep.fits.push_back(nf);
    }
    if (nr.mu_uniform && uni.slopes.size() >= 2) {
      const auto [lo, hi] = std::minmax_element(uni.slopes.begin(), uni.slopes.end());
      uni.variation = *hi - *lo;
      uni.pass = uni.variation <= spec.tolerance;
      if (!uni.pass) ok = false;
      rep.uniformity.push_back(uni);
    }
  }
  rep.all_pass = ok && any;
  return rep;
}

namespace {

json report_json(const RateReport& rep, const ExperimentSpec& spec) {
  json fits = json::array();
  for (const auto& f : rep.fits) {
    json o{{"key", f.key},
           {"comparison", to_string(f.norm.comparison)},
           {"norm_kind", to_string(f.norm.kind)},
           {"q", exponent_to_json(f.norm.q)},
           {"r", exponent_to_json(f.norm.r)},
           {"mu", f.mu},
           {"fit_model", to_string(f.norm.fit)},
           {"target", f.norm.target},
           {"eps", f.eps},
           {"values", f.values},
           {"verdict", f.verdict}};
    if (f.fitted) {
      o["slope"] = f.fit.slope;
      o["intercept"] = f.fit.intercept;
      o["residual"] = f.fit.residual;
    }
    fits.push_back(o);
  }
  json uni = json::array();
  for (const auto& u : rep.uniformity)
    uni.push_back({{"key", u.key}, {"mus", u.mus}, {"slopes", u.slopes}, {"variation", u.variation},
                   {"pass", u.pass}});
  return json{{"theorem_tag", rep.tag},
              {"tolerance", spec.tolerance},
              {"fits", fits},
              {"uniformity", uni},
              {"failed_cells", rep.failed_cells},
              {"all_pass", rep.all_pass}};
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

std::string svg_plot(const std::string& title, const std::vector<const NormFit*>& fits,
                     const ExperimentSpec& spec) {
  const double W = 520, H = 380, ml = 70, mr = 20, mt = 40, mb = 50;
  double xlo = HUGE_VAL, xhi = -HUGE_VAL, ylo = HUGE_VAL, yhi = -HUGE_VAL;
  for (const auto* f : fits)
    for (std::size_t i = 0; i < f->eps.size(); ++i) {
      if (!(f->values[i] > 0.0)) continue;
      xlo = std::min(xlo, std::log10(f->eps[i]));
      xhi = std::max(xhi, std::log10(f->eps[i]));
      ylo = std::min(ylo, std::log10(f->values[i]));
      yhi = std::max(yhi, std::log10(f->values[i]));
    }
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  if (!(xhi >= xlo)) {
    s << "<text x=\"" << W / 2 << "\" y=\"" << H / 2 << "\" text-anchor=\"middle\">no data</text>\n</svg>\n";
    return s.str();
  }
  if (xhi - xlo < 1e-9) { xlo -= 0.5; xhi += 0.5; }
  if (yhi - ylo < 1e-9) { ylo -= 0.5; yhi += 0.5; }
  const double padx = 0.05 * (xhi - xlo), pady = 0.1 * (yhi - ylo);
  xlo -= padx; xhi += padx; ylo -= pady; yhi += pady;
  auto X = [&](double lx) { return ml + (lx - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto Y = [&](double ly) { return H - mb - (ly - ylo) / (yhi - ylo) * (H - mt - mb); };
  s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">log10 eps</text>\n";
  s << "<text x=\"16\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
    << ")\" text-anchor=\"middle\">log10 value</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double lx = xlo + (xhi - xlo) * t / 4, ly = ylo + (yhi - ylo) * t / 4;
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", lx);
    s << "<text x=\"" << X(lx) << "\" y=\"" << H - mb + 16 << "\" font-size=\"10\" text-anchor=\"middle\">" << b << "</text>\n";
    std::snprintf(b, sizeof b, "%.2f", ly);
    s << "<text x=\"" << ml - 6 << "\" y=\"" << Y(ly) + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << b << "</text>\n";
  }
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  int ci = 0;
  double ly_text = mt + 14;
  for (const auto* f : fits) {
    const char* col = colors[ci++ % 5];
    for (std::size_t i = 0; i < f->eps.size(); ++i)
      if (f->values[i] > 0.0)
        s << "<circle cx=\"" << X(std::log10(f->eps[i])) << "\" cy=\"" << Y(std::log10(f->values[i]))
          << "\" r=\"3.5\" fill=\"" << col << "\"/>\n";
    if (!f->fitted) continue;
    // fitted line and target-slope guide through the data centroid, in eps coordinates
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < f->eps.size(); ++i) {
      mx += std::log10(f->eps[i]);
      my += std::log10(f->values[i]);
    }
    mx /= f->eps.size();
    my /= f->eps.size();
    const double a = std::log10(f->eps.back()), b = std::log10(f->eps.front());
    auto line = [&](double slope, const char* dash) {
      s << "<line x1=\"" << X(a) << "\" y1=\"" << Y(my + slope * (a - mx)) << "\" x2=\"" << X(b) << "\" y2=\""
        << Y(my + slope * (b - mx)) << "\" stroke=\"" << col << "\"" << dash << "/>\n";
    };
    line(f->fit.slope, "");
    line(f->norm.target, " stroke-dasharray=\"5,4\"");
    char buf[128];
    std::snprintf(buf, sizeof buf, "mu=%g slope=%.3f target=%.3f %s", f->mu, f->fit.slope, f->norm.target,
                  f->verdict.c_str());
    s << "<text x=\"" << ml + 8 << "\" y=\"" << ly_text << "\" font-size=\"11\" fill=\"" << col << "\">" << buf
      << "</text>\n";
    ly_text += 14;
  }
  (void)spec;
  s << "</svg>\n";
  return s.str();
}

}  // namespace

void write_raw_csv(const RawTable& table, const std::string& path) {
  std::ostringstream s;
  s << "theorem_tag,model,eps,mu,q,r,norm_kind,comparison,value,run_status\n";
  for (const auto& r : table.rows) {
    std::string status = r.run_status;
    std::replace(status.begin(), status.end(), ',', ';');
    s << r.theorem_tag << ',' << r.model << ',' << fmt17(r.eps) << ',' << fmt17(r.mu) << ',' << fmt17(r.q) << ','
      << fmt17(r.r) << ',' << r.norm_kind << ',' << r.comparison << ',' << fmt17(r.value) << ',' << status << '\n';
  }
  write_file(path, s.str());
}

RawTable read_raw_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read " + path);
  std::string line;
  std::getline(in, line);
  require(line.rfind("theorem_tag,", 0) == 0, ErrorCode::Io, path + " is not a raw results table");
  RawTable t;
  int lineno = 1;
  std::set<std::pair<double, double>> failed;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) fail(ErrorCode::Io, path + ":" + std::to_string(lineno) + ": expected 10 columns");
    RawRow r;
    r.theorem_tag = f[0];
    r.model = f[1];
    r.eps = std::strtod(f[2].c_str(), nullptr);
    r.mu = std::strtod(f[3].c_str(), nullptr);
    r.q = std::strtod(f[4].c_str(), nullptr);
    r.r = std::strtod(f[5].c_str(), nullptr);
    r.norm_kind = f[6];
    r.comparison = f[7];
    r.value = std::strtod(f[8].c_str(), nullptr);
    r.run_status = f[9];
    if (r.run_status != "ok") failed.insert({r.eps, r.mu});
    t.rows.push_back(r);
  }
  t.failed_cells = int(failed.size());
  return t;
}

void render_report(const ExperimentSpec& spec, const RawTable& table, const RateReport& report,
                   const std::string& dir) {
  fs::create_directories(dir);
  write_raw_csv(table, (fs::path(dir) / "raw.csv").string());
  write_file(fs::path(dir) / "spec.json", to_json(spec).dump(2) + "\n");
  write_file(fs::path(dir) / "report.json", report_json(report, spec).dump(2) + "\n");
  // raw-only when nothing could be fitted
  const fs::path plots = fs::path(dir) / "plots";
  for (const auto& nr : spec.norms) {
    std::vector<const NormFit*> fits;
    bool any = false;
    for (const auto& f : report.fits)
      if (f.key == nr.key()) {
        fits.push_back(&f);
        any = any || f.fitted;
      }
    if (!any) continue;
    fs::create_directories(plots);
    const std::string title = spec.tag + " " + nr.key();
    write_file(plots / (slug(spec.tag) + "_" + slug(nr.key()) + ".svg"), svg_plot(title, fits, spec));
  }
}

RateReport rerender_report(const std::string& dir) {
  const fs::path raw = fs::path(dir) / "raw.csv";
  const fs::path sp = fs::path(dir) / "spec.json";
  if (!fs::exists(raw) || !fs::exists(sp)) fail(ErrorCode::Io, "no raw results in " + dir);
  std::ifstream in(sp);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  ExperimentSpec spec = experiment_from_json(parse_json_text(text, sp.string()), text);
  const RawTable table = read_raw_csv(raw.string());
  const RateReport rep = fit_report(spec, table);
  render_report(spec, table, rep, dir);
  return rep;
}

// ---------------------------------------------------------------- presets

std::vector<std::string> theorem_tags() {
  return {"thm2.1", "thm3.1", "thm3.2", "thm4.1", "thm4.2", "thm4.3", "thm4.4", "thm5.1", "thm5.2"};
}

namespace {

std::string normalize_tag(std::string tag) {
  for (auto& c : tag) {
    c = char(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '.';
  }
  if (!tag.empty() && std::isdigit(static_cast<unsigned char>(tag[0]))) tag = "thm" + tag;
  for (const auto& t : theorem_tags())
    if (t == tag) return t;
  fail(ErrorCode::UnknownTag, "unknown suite tag: " + tag);
}

// Small arithmetic parser over numbers and the phase constants.
class TargetParser {
 public:
  TargetParser(const std::string& s, const std::function<double(const std::string&)>& sym)
      : s_(s), sym_(sym) {}
  double parse() {
    const double v = sum();
    skip();
    if (i_ != s_.size()) bad();
    return v;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  [[noreturn]] void bad() { fail(ErrorCode::Config, "cannot parse target expression: " + s_); }
  double sum() {
    double v = product();
    for (;;) {
      skip();
      if (i_ < s_.size() && s_[i_] == '+') { ++i_; v += product(); }
      else if (i_ < s_.size() && s_[i_] == '-') { ++i_; v -= product(); }
      else return v;
    }
  }
  double product() {
    double v = atom();
    for (;;) {
      skip();
      if (i_ < s_.size() && s_[i_] == '*') { ++i_; v *= atom(); }
      else if (i_ < s_.size() && s_[i_] == '/') { ++i_; v /= atom(); }
      else if (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) v *= atom();  // 2p
      else return v;
    }
  }
  double atom() {
    skip();
    if (i_ >= s_.size()) bad();
    if (s_[i_] == '(') {
      ++i_;
      const double v = sum();
      skip();
      if (i_ >= s_.size() || s_[i_] != ')') bad();
      ++i_;
      return v;
    }
    if (s_[i_] == '-') { ++i_; return -atom(); }
    if (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.') {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(i_), &used);
      i_ += used;
      return v;
    }
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    if (j == i_) bad();
    const std::string name = s_.substr(i_, j - i_);
    i_ = j;
    return sym_(name);
  }
  std::string s_;
  std::size_t i_ = 0;
  std::function<double(const std::string&)> sym_;
};

}  // namespace

double resolve_target(const std::string& expr, const ModelSpec& model) {
  std::optional<PhaseClassification> pc;
  auto sym = [&](const std::string& name) -> double {
    if (!pc) pc = classify(model.linear_abcd());
    if (name == "p") return pc->p;
    if (name == "p0") return pc->p0;
    if (name == "p2d") return pc->p0 == 3 ? 3 : 2;
    if (name == "sigma") return pc->sigma;
    if (name == "m") return pc->m_max;
    fail(ErrorCode::Config, "unknown symbol in target expression: " + name);
  };
  return TargetParser(expr, sym).parse();
}

void resolve_targets(ExperimentSpec& spec) {
  for (auto& n : spec.norms)
    if (!n.target_expr.empty()) n.target = resolve_target(n.target_expr, spec.model);
}

ExperimentSpec theorem_suite(const std::string& tag, bool smoke, const std::string& preset_dir,
                             const std::string& overrides) {
  const std::string t = normalize_tag(tag);
  std::string dir = preset_dir;
  if (dir.empty()) {
    const char* env = std::getenv("RIGIDLID_PRESET_DIR");
#ifdef RIGIDLID_PRESET_DIR
    dir = env ? env : RIGIDLID_PRESET_DIR;
#else
    dir = env ? env : "presets";
#endif
  }
  std::string file = t;
  std::replace(file.begin(), file.end(), '.', '_');
  const fs::path path = fs::path(dir) / (file + ".json");
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "missing preset file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j = parse_json_text(text, path.string());
  if (j.contains("smoke")) {
    json patch = j["smoke"];
    j.erase("smoke");
    if (smoke) j.merge_patch(patch);
  }
  if (!overrides.empty()) {
    const json patch = parse_json_text(overrides, "overrides");
    if (!patch.is_object()) fail(ErrorCode::Config, "overrides must be a JSON object");
    j.merge_patch(patch);
  }
  ExperimentSpec spec = experiment_from_json(j, text);
  if (spec.tag.empty()) spec.tag = t;
  resolve_targets(spec);
  spec.validate();
  return spec;
}

}  // namespace rigidlid
