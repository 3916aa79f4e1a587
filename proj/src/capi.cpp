#include "rigidlid/rigidlid.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "rigidlid/config.hpp"
#include "rigidlid/norms.hpp"
#include "rigidlid/phase.hpp"
#include "rigidlid/ratelab.hpp"
#include "rigidlid/solver.hpp"

using namespace rigidlid;

struct rl_config {
  SimulationConfig cfg;
};
struct rl_trajectory {
  Trajectory traj;
};
struct rl_suite {
  ExperimentSpec spec;
};
struct rl_sweep {
  ExperimentSpec spec;
  RawTable table;
  RateReport report;
};
struct rl_probe {
  KernelProbeResult res;
};

namespace {

thread_local std::string g_last_error;

rl_status set_error(rl_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
rl_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return RL_OK;
  } catch (const Error& e) {
    return set_error(static_cast<rl_status>(static_cast<int>(e.code())), e.what());
  } catch (const json::exception& e) {
    return set_error(RL_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RL_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

AbcdParams abcd(double a, double b, double c, double d) {
  AbcdParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.d = d;
  return p;
}

void copy_str(char* dst, std::size_t n, const std::string& s) {
  if (!dst || n == 0) return;
  std::size_t k = std::min(n - 1, s.size());
  std::memcpy(dst, s.data(), k);
  dst[k] = '\0';
}

}  // namespace

extern "C" {

const char* rl_last_error(void) { return g_last_error.c_str(); }

const char* rl_status_string(rl_status s) {
  switch (s) {
    case RL_OK: return "ok";
    case RL_ERR_INTERNAL: return "internal";
    default:
      if (s >= RL_ERR_INVALID_ARGUMENT && s <= RL_ERR_UNKNOWN_TAG)
        return to_string(static_cast<ErrorCode>(static_cast<int>(s)));
      return "unknown";
  }
}

const char* rl_version(void) { return "0.1.0"; }

void rl_string_free(char* s) { std::free(s); }

// ---- simulation

rl_status rl_config_from_string(const char* text, rl_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = nullptr;
    const json j = parse_json_text(text, "<config>");
    auto c = std::make_unique<rl_config>();
    c->cfg = simulation_from_json(j, text);
    *out = c.release();
  });
}

rl_status rl_config_from_file(const char* path, rl_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, std::string("cannot read config ") + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const json j = parse_json_text(text, path);
    auto c = std::make_unique<rl_config>();
    c->cfg = simulation_from_json(j, text);
    *out = c.release();
  });
}

rl_status rl_config_set_seed(rl_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "config");
    cfg->cfg.init.seed = seed;
  });
}

rl_status rl_config_to_json(const rl_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = dup_string(to_json(cfg->cfg).dump(2) + "\n");
  });
}

void rl_config_free(rl_config* cfg) { delete cfg; }

rl_status rl_simulate(const rl_config* cfg, rl_trajectory** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = nullptr;
    auto t = std::make_unique<rl_trajectory>();
    t->traj = simulate(cfg->cfg);
    *out = t.release();
  });
}

rl_status rl_trajectory_shape(const rl_trajectory* tr, int* dim, int* n, size_t* snapshots) {
  return guarded([&] {
    need(tr, "trajectory");
    const Grid& g = tr->traj.snapshots.at(0).grid();
    if (dim) *dim = g.dim();
    if (n) *n = g.n();
    if (snapshots) *snapshots = tr->traj.snapshots.size();
  });
}

rl_status rl_trajectory_times(const rl_trajectory* tr, double* times) {
  return guarded([&] {
    need(tr, "trajectory");
    need(times, "times");
    for (std::size_t i = 0; i < tr->traj.snapshots.size(); ++i) times[i] = tr->traj.snapshots[i].t;
  });
}

rl_status rl_trajectory_field(const rl_trajectory* tr, size_t s, int c, double* buf) {
  return guarded([&] {
    need(tr, "trajectory");
    need(buf, "buf");
    if (s >= tr->traj.snapshots.size()) fail(ErrorCode::InvalidArgument, "snapshot index out of range");
    const State& u = tr->traj.snapshots[s];
    if (c < 0 || c > u.grid().dim()) fail(ErrorCode::InvalidArgument, "component index out of range");
    const auto f = transform_backward(c == 0 ? u.zeta : u.v[c - 1]);
    std::copy(f.begin(), f.end(), buf);
  });
}

rl_status rl_trajectory_mass_drift(const rl_trajectory* tr, double* drift) {
  return guarded([&] {
    need(tr, "trajectory");
    need(drift, "drift");
    const auto& d = tr->traj.diagnostics;
    double m0 = d.at(0).mass, worst = 0.0;
    for (const auto& x : d) worst = std::max(worst, std::abs(x.mass - m0));
    *drift = worst / std::max(std::abs(m0), 1e-300);
  });
}

rl_status rl_trajectory_write(const rl_trajectory* tr, const char* dir) {
  return guarded([&] {
    need(tr, "trajectory");
    need(dir, "dir");
    write_trajectory(tr->traj, dir);
    write_diagnostics_csv(tr->traj, std::string(dir) + "/diagnostics.csv");
  });
}

void rl_trajectory_free(rl_trajectory* tr) { delete tr; }

// ---- suites

size_t rl_theorem_tag_count(void) { return theorem_tags().size(); }

const char* rl_theorem_tag(size_t i) {
  static const std::vector<std::string> tags = theorem_tags();
  return i < tags.size() ? tags[i].c_str() : nullptr;
}

rl_status rl_suite_load(const char* tag, int smoke, const char* preset_dir,
                        const char* overrides_json, rl_suite** out) {
  return guarded([&] {
    need(tag, "tag");
    need(out, "out");
    *out = nullptr;
    auto s = std::make_unique<rl_suite>();
    s->spec = theorem_suite(tag, smoke != 0, preset_dir ? preset_dir : "",
                            overrides_json ? overrides_json : "");
    *out = s.release();
  });
}

rl_status rl_suite_set_seed(rl_suite* suite, uint64_t seed) {
  return guarded([&] {
    need(suite, "suite");
    suite->spec.init.seed = seed;
  });
}

rl_status rl_suite_to_json(const rl_suite* suite, char** out) {
  return guarded([&] {
    need(suite, "suite");
    need(out, "out");
    *out = dup_string(to_json(suite->spec).dump(2) + "\n");
  });
}

rl_status rl_suite_tag(const rl_suite* suite, char** out) {
  return guarded([&] {
    need(suite, "suite");
    need(out, "out");
    *out = dup_string(suite->spec.tag);
  });
}

void rl_suite_free(rl_suite* suite) { delete suite; }

rl_status rl_suite_run(const rl_suite* suite, int jobs, int verbose, rl_sweep** out) {
  return guarded([&] {
    need(suite, "suite");
    need(out, "out");
    *out = nullptr;
    auto sw = std::make_unique<rl_sweep>();
    sw->spec = suite->spec;
    SweepOptions opt;
    opt.jobs = jobs < 1 ? 1 : jobs;
    opt.quiet = verbose == 0;
    sw->table = run_sweep(sw->spec, opt);
    sw->report = fit_report(sw->spec, sw->table);
    *out = sw.release();
  });
}

rl_status rl_sweep_summary(const rl_sweep* sw, int* all_pass, int* failed_cells, size_t* n_fits) {
  return guarded([&] {
    need(sw, "sweep");
    if (all_pass) *all_pass = sw->report.all_pass ? 1 : 0;
    if (failed_cells) *failed_cells = sw->report.failed_cells;
    if (n_fits) *n_fits = sw->report.fits.size();
  });
}

rl_status rl_sweep_fit(const rl_sweep* sw, size_t i, rl_fit_info* out) {
  return guarded([&] {
    need(sw, "sweep");
    need(out, "out");
    if (i >= sw->report.fits.size()) fail(ErrorCode::InvalidArgument, "fit index out of range");
    const NormFit& f = sw->report.fits[i];
    std::memset(out, 0, sizeof *out);
    copy_str(out->key, sizeof out->key, f.key);
    out->mu = f.mu;
    out->slope = f.fit.slope;
    out->intercept = f.fit.intercept;
    out->residual = f.fit.residual;
    out->target = f.norm.target;
    out->fitted = f.fitted ? 1 : 0;
    copy_str(out->verdict, sizeof out->verdict, f.verdict);
  });
}

rl_status rl_sweep_uniformity(const rl_sweep* sw, size_t i, char* key, size_t key_len,
                              double* variation, int* pass, size_t* count) {
  return guarded([&] {
    need(sw, "sweep");
    if (count) *count = sw->report.uniformity.size();
    if (i >= sw->report.uniformity.size()) {
      if (!count) fail(ErrorCode::InvalidArgument, "uniformity index out of range");
      return;
    }
    const Uniformity& u = sw->report.uniformity[i];
    copy_str(key, key_len, u.key);
    if (variation) *variation = u.variation;
    if (pass) *pass = u.pass ? 1 : 0;
  });
}

rl_status rl_sweep_render(const rl_sweep* sw, const char* dir) {
  return guarded([&] {
    need(sw, "sweep");
    need(dir, "dir");
    render_report(sw->spec, sw->table, sw->report, dir);
  });
}

void rl_sweep_free(rl_sweep* sw) { delete sw; }

rl_status rl_report_rerender(const char* dir, int* all_pass, int* failed_cells) {
  return guarded([&] {
    need(dir, "dir");
    const RateReport r = rerender_report(dir);
    if (all_pass) *all_pass = r.all_pass ? 1 : 0;
    if (failed_cells) *failed_cells = r.failed_cells;
  });
}

// ---- phase

rl_status rl_phase_classify(double a, double b, double c, double d, rl_phase_info* out) {
  return guarded([&] {
    need(out, "out");
    const PhaseClassification k = classify(abcd(a, b, c, d));
    out->sum_zero = k.sum_zero;
    out->ell = k.ell;
    out->alpha = k.alpha;
    out->m_max = k.m_max;
    out->p = k.p;
    out->p0 = k.p0;
    out->sigma = k.sigma;
    out->gp_positive = k.gp_positive;
    out->alpha_excluded = k.alpha_excluded;
    out->n_zeros = k.gpp_zeros.size();
  });
}

rl_status rl_phase_zero(double a, double b, double c, double d, size_t i, double* r,
                        int* multiplicity) {
  return guarded([&] {
    const PhaseClassification k = classify(abcd(a, b, c, d));
    if (i >= k.gpp_zeros.size()) fail(ErrorCode::InvalidArgument, "zero index out of range");
    if (r) *r = k.gpp_zeros[i].location;
    if (multiplicity) *multiplicity = k.gpp_zeros[i].multiplicity;
  });
}

rl_status rl_phase_derivatives(double a, double b, double c, double d, double r, double out[4]) {
  return guarded([&] {
    need(out, "out");
    const PhaseDerivatives g = phase_derivatives(abcd(a, b, c, d), r);
    out[0] = g.g;
    out[1] = g.g1;
    out[2] = g.g2;
    out[3] = g.g3;
  });
}

void rl_probe_spec_init(rl_probe_spec* spec) {
  if (!spec) return;
  const KernelProbeSpec def;
  std::memset(spec, 0, sizeof *spec);
  spec->a = def.abcd.a;
  spec->b = def.abcd.b;
  spec->c = def.abcd.c;
  spec->d = def.abcd.d;
  spec->mu = def.mu;
  spec->band = RL_BAND_LOW;
  spec->weight = RL_WEIGHT_POWER;
  spec->s = def.s;
  spec->bessel_beta = def.bessel_beta;
}

rl_status rl_kernel_probe(const rl_probe_spec* spec, rl_probe** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = nullptr;
    KernelProbeSpec k;
    k.abcd = abcd(spec->a, spec->b, spec->c, spec->d);
    k.wave = spec->wave != 0;
    k.mu = spec->mu;
    switch (spec->band) {
      case RL_BAND_LOW: k.band = ProbeBand::Low; break;
      case RL_BAND_HIGH: k.band = ProbeBand::High; break;
      case RL_BAND_DYADIC: k.band = ProbeBand::Dyadic; break;
      case RL_BAND_FULL: k.band = ProbeBand::Full; break;
      default: fail(ErrorCode::InvalidArgument, "unknown band");
    }
    k.dyadic_j = spec->dyadic_j;
    k.weight = spec->weight == RL_WEIGHT_BESSEL ? ProbeWeight::Bessel : ProbeWeight::Power;
    k.s = spec->s;
    k.bessel_beta = spec->bessel_beta;
    if (spec->times && spec->n_times) k.times.assign(spec->times, spec->times + spec->n_times);
    k.n = spec->n;
    k.length = spec->length;
    auto p = std::make_unique<rl_probe>();
    p->res = kernel_decay_probe(k);
    *out = p.release();
  });
}

rl_status rl_probe_result(const rl_probe* pr, double* theta, double* theta_lo, double* theta_hi,
                          double* predicted, int* skipped) {
  return guarded([&] {
    need(pr, "probe");
    if (theta) *theta = pr->res.theta;
    if (theta_lo) *theta_lo = pr->res.theta_lo;
    if (theta_hi) *theta_hi = pr->res.theta_hi;
    if (predicted) *predicted = pr->res.predicted;
    if (skipped) *skipped = pr->res.skipped ? 1 : 0;
  });
}

size_t rl_probe_count(const rl_probe* pr) { return pr ? pr->res.times.size() : 0; }

rl_status rl_probe_point(const rl_probe* pr, size_t i, double* t, double* sup) {
  return guarded([&] {
    need(pr, "probe");
    if (i >= pr->res.times.size()) fail(ErrorCode::InvalidArgument, "probe index out of range");
    if (t) *t = pr->res.times[i];
    if (sup) *sup = pr->res.sup[i];
  });
}

const char* rl_probe_note(const rl_probe* pr) { return pr ? pr->res.note.c_str() : ""; }

void rl_probe_free(rl_probe* pr) { delete pr; }

}  // extern "C"
