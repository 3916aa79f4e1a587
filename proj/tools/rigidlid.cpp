// rigidlid command-line frontend; talks to the library only through rigidlid.h
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rigidlid/rigidlid.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kAbort = 2, kPartial = 3, kVerdict = 4 };

int exit_for(rl_status s) {
  switch (s) {
    case RL_OK: return kOk;
    case RL_ERR_DEPTH_FLOOR:
    case RL_ERR_BOUNDARY:
    case RL_ERR_NON_FINITE:
    case RL_ERR_NON_CONVERGENCE:
    case RL_ERR_RESOLUTION:
      return kAbort;
    default:
      return kConfig;
  }
}

int report_error(rl_status s) {
  std::fprintf(stderr, "rigidlid: %s: %s\n", rl_status_string(s), rl_last_error());
  return exit_for(s);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  rl_string_free(s);
  return out;
}

std::string output_dir(const std::string& flag, const std::string& name) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RIGIDLID_OUT"); env && *env) return (fs::path(env) / name).string();
  return (fs::path("rigidlid-out") / name).string();
}

// Files go to a hidden directory inside out and are moved into place on commit.
// On failure the staging directory is removed, and out too if we created it.
class Staging {
 public:
  explicit Staging(const std::string& out) : out_(out) {
    created_ = !fs::exists(out_);
    fs::create_directories(out_);
    dir_ = out_ / (".staging-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Staging() {
    std::error_code ec;
    if (!committed_) {
      fs::remove_all(dir_, ec);
      if (created_ && fs::is_empty(out_, ec)) fs::remove(out_, ec);
    }
  }
  std::string path() const { return dir_.string(); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  void commit() {
    for (const auto& e : fs::directory_iterator(dir_)) {
      const fs::path dst = out_ / e.path().filename();
      if (fs::is_directory(dst) && !fs::is_directory(e.path())) fs::remove_all(dst);
      if (fs::is_directory(e.path())) fs::remove_all(dst);
      fs::rename(e.path(), dst);
    }
    fs::remove_all(dir_);
    committed_ = true;
  }

 private:
  fs::path out_, dir_;
  bool created_ = false, committed_ = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config, out;
  long long seed = -1;
};

int cmd_simulate(const SimulateArgs& a) {
  rl_config* cfg = nullptr;
  if (rl_status s = rl_config_from_file(a.config.c_str(), &cfg)) return report_error(s);
  if (a.seed >= 0) rl_config_set_seed(cfg, static_cast<uint64_t>(a.seed));
  char* resolved = nullptr;
  rl_config_to_json(cfg, &resolved);
  const std::string resolved_text = take(resolved);

  rl_trajectory* tr = nullptr;
  rl_status s = rl_simulate(cfg, &tr);
  rl_config_free(cfg);
  if (s) return report_error(s);

  int code = kOk;
  try {
    Staging st(output_dir(a.out, "simulate"));
    write_text(st.file("config.json"), resolved_text);
    if (rl_status w = rl_trajectory_write(tr, st.path().c_str())) {
      code = report_error(w);
    } else {
      st.commit();
      size_t snaps = 0;
      rl_trajectory_shape(tr, nullptr, nullptr, &snaps);
      std::printf("wrote %zu snapshots to %s\n", snaps, output_dir(a.out, "simulate").c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rigidlid: io: %s\n", e.what());
    code = kConfig;
  }
  rl_trajectory_free(tr);
  return code;
}

// ---------------------------------------------------------------- suite

struct SuiteArgs {
  std::vector<std::string> tags;
  std::string config, out, presets;
  int jobs = 1;
  long long seed = -1;
  bool smoke = false, quiet = false;
};

int run_one_suite(const std::string& tag, const SuiteArgs& a, const std::string& overrides,
                  const std::string& out) {
  rl_suite* suite = nullptr;
  rl_status s = rl_suite_load(tag.c_str(), a.smoke, a.presets.empty() ? nullptr : a.presets.c_str(),
                              overrides.empty() ? nullptr : overrides.c_str(), &suite);
  if (s) return report_error(s);
  if (a.seed >= 0) rl_suite_set_seed(suite, static_cast<uint64_t>(a.seed));
  char* txt = nullptr;
  rl_suite_to_json(suite, &txt);
  const std::string resolved = take(txt);

  rl_sweep* sw = nullptr;
  s = rl_suite_run(suite, a.jobs, a.quiet ? 0 : 1, &sw);
  rl_suite_free(suite);
  if (s) return report_error(s);

  int all_pass = 0, failed = 0;
  size_t nfit = 0;
  rl_sweep_summary(sw, &all_pass, &failed, &nfit);
  int code = kOk;
  try {
    Staging st(out);
    write_text(st.file("config.json"), resolved);
    if (rl_status w = rl_sweep_render(sw, st.path().c_str())) {
      code = report_error(w);
    } else {
      st.commit();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rigidlid: io: %s\n", e.what());
    code = kConfig;
  }
  if (code == kOk) {
    for (size_t i = 0; i < nfit; ++i) {
      rl_fit_info f;
      rl_sweep_fit(sw, i, &f);
      if (f.fitted)
        std::printf("%-8s %-44s mu=%-6g slope=%.4f target=%.4f %s\n", tag.c_str(), f.key, f.mu,
                    f.slope, f.target, f.verdict);
      else
        std::printf("%-8s %-44s mu=%-6g (no fit) %s\n", tag.c_str(), f.key, f.mu, f.verdict);
    }
    size_t nu = 0;
    rl_sweep_uniformity(sw, 0, nullptr, 0, nullptr, nullptr, &nu);
    for (size_t i = 0; i < nu; ++i) {
      char key[128];
      double var = 0;
      int pass = 0;
      rl_sweep_uniformity(sw, i, key, sizeof key, &var, &pass, nullptr);
      std::printf("%-8s %-44s mu-variation=%.4f %s\n", tag.c_str(), key, var, pass ? "pass" : "fail");
    }
    if (failed > 0) {
      std::fprintf(stderr, "rigidlid: %d cell(s) aborted; report written\n", failed);
      code = kPartial;
    } else if (!all_pass) {
      code = kVerdict;
    }
  }
  rl_sweep_free(sw);
  return code;
}

int cmd_suite(const SuiteArgs& a) {
  std::string overrides;
  if (!a.config.empty()) {
    try {
      overrides = read_text(a.config);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "rigidlid: config: %s\n", e.what());
      return kConfig;
    }
  }
  std::vector<std::string> tags;
  for (const auto& t : a.tags) {
    if (t == "all") {
      for (size_t i = 0; i < rl_theorem_tag_count(); ++i) tags.push_back(rl_theorem_tag(i));
    } else {
      tags.push_back(t);
    }
  }
  int worst = kOk;
  auto rank = [](int c) { return c == kOk ? 0 : c == kVerdict ? 1 : c == kPartial ? 2 : c == kAbort ? 3 : 4; };
  for (const auto& t : tags) {
    std::string name = t;
    for (auto& c : name) if (c == '.') c = '_';
    const std::string out = tags.size() > 1 ? (fs::path(output_dir(a.out, "suites")) / name).string()
                                            : output_dir(a.out, name);
    const int c = run_one_suite(t, a, overrides, out);
    if (rank(c) > rank(worst)) worst = c;
  }
  return worst;
}

// ---------------------------------------------------------------- phase

struct PhaseArgs {
  std::vector<double> abcd{0.0, 0.0, 0.0, 1.0 / 3.0};
  std::string probe, weight = "power", out;
  double s = 0.5, mu = 1.0;
  int dyadic_j = 0;
  bool wave = false;
};

int cmd_phase(const PhaseArgs& a) {
  const double pa = a.abcd[0], pb = a.abcd[1], pc = a.abcd[2], pd = a.abcd[3];
  rl_phase_info info;
  if (rl_status s = rl_phase_classify(pa, pb, pc, pd, &info)) return report_error(s);
  json j;
  j["abcd"] = {{"a", pa}, {"b", pb}, {"c", pc}, {"d", pd}};
  j["sum_zero"] = info.sum_zero != 0;
  j["ell"] = info.ell;
  j["alpha"] = info.alpha;
  j["m_max"] = info.m_max;
  j["p"] = info.p;
  j["p0"] = info.p0;
  j["sigma"] = info.sigma;
  j["gp_positive"] = info.gp_positive != 0;
  j["alpha_excluded"] = info.alpha_excluded != 0;
  json zeros = json::array();
  for (size_t i = 0; i < info.n_zeros; ++i) {
    double r = 0;
    int m = 0;
    rl_phase_zero(pa, pb, pc, pd, i, &r, &m);
    zeros.push_back({{"r", r}, {"multiplicity", m}});
  }
  j["gpp_zeros"] = zeros;
  std::printf("sum_zero=%s ell=%g alpha=%d m_max=%d p=%d p0=%d sigma=%g gp_positive=%s\n",
              info.sum_zero ? "true" : "false", info.ell, info.alpha, info.m_max, info.p, info.p0,
              info.sigma, info.gp_positive ? "true" : "false");
  for (const auto& z : zeros)
    std::printf("  g'' zero at r=%.10g multiplicity %d\n", z["r"].get<double>(), z["multiplicity"].get<int>());

  json config{{"abcd", j["abcd"]}};
  if (!a.probe.empty()) {
    rl_probe_spec ps;
    rl_probe_spec_init(&ps);
    ps.a = pa;
    ps.b = pb;
    ps.c = pc;
    ps.d = pd;
    ps.wave = a.wave;
    ps.mu = a.mu;
    ps.s = a.s;
    ps.dyadic_j = a.dyadic_j;
    ps.weight = a.weight == "bessel" ? RL_WEIGHT_BESSEL : RL_WEIGHT_POWER;
    ps.band = a.probe == "low"      ? RL_BAND_LOW
              : a.probe == "high"   ? RL_BAND_HIGH
              : a.probe == "dyadic" ? RL_BAND_DYADIC
                                    : RL_BAND_FULL;
    config["probe"] = {{"band", a.probe}, {"weight", a.weight}, {"s", a.s},
                       {"mu", a.mu},      {"dyadic_j", a.dyadic_j}, {"wave", a.wave}};
    rl_probe* pr = nullptr;
    if (rl_status s = rl_kernel_probe(&ps, &pr)) return report_error(s);
    double th = 0, lo = 0, hi = 0, pred = 0;
    int skipped = 0;
    rl_probe_result(pr, &th, &lo, &hi, &pred, &skipped);
    json pts = json::array();
    for (size_t i = 0; i < rl_probe_count(pr); ++i) {
      double t = 0, sup = 0;
      rl_probe_point(pr, i, &t, &sup);
      pts.push_back({t, sup});
    }
    j["probe"] = {{"band", a.probe}, {"theta", th}, {"theta_lo", lo},
                  {"theta_hi", hi}, {"predicted", pred}, {"skipped", skipped != 0},
                  {"note", rl_probe_note(pr)}, {"points", pts}};
    if (skipped)
      std::printf("probe %s: skipped (%s)\n", a.probe.c_str(), rl_probe_note(pr));
    else
      std::printf("probe %s: theta=%.4f [%.4f, %.4f] predicted=%.4f\n", a.probe.c_str(), th, lo, hi, pred);
    rl_probe_free(pr);
  }

  const bool write = !a.out.empty() || std::getenv("RIGIDLID_OUT");
  if (write) {
    try {
      Staging st(output_dir(a.out, "phase"));
      write_text(st.file("config.json"), config.dump(2) + "\n");
      write_text(st.file("phase.json"), j.dump(2) + "\n");
      st.commit();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "rigidlid: io: %s\n", e.what());
      return kConfig;
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& dir) {
  int all_pass = 0, failed = 0;
  if (rl_status s = rl_report_rerender(dir.c_str(), &all_pass, &failed)) return report_error(s);
  std::printf("re-rendered %s\n", dir.c_str());
  if (failed > 0) return kPartial;
  return all_pass ? kOk : kVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigid lid limit toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rl_version());

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run one simulation");
  simulate->add_option("--config", sim.config, "simulation config (JSON)")->required();
  simulate->add_option("--out", sim.out, "output directory (default $RIGIDLID_OUT/simulate)");
  simulate->add_option("--seed", sim.seed, "seed for the initial-data noise");

  SuiteArgs su;
  auto* suite = app.add_subcommand("suite", "run rate suites");
  suite->add_option("tags", su.tags, "suite tags, e.g. thm2.1, or all")->required();
  suite->add_option("--config", su.config, "JSON merge patch applied to the preset");
  suite->add_option("--out", su.out, "output directory");
  suite->add_option("--jobs", su.jobs, "parallel sweep cells")->check(CLI::PositiveNumber);
  suite->add_option("--seed", su.seed, "seed for the initial-data noise");
  suite->add_flag("--smoke", su.smoke, "reduced-scale preset");
  suite->add_option("--presets", su.presets, "preset directory");
  suite->add_flag("--quiet", su.quiet, "no progress output");

  PhaseArgs ph;
  auto* phase = app.add_subcommand("phase", "classify the dispersion phase of an abcd system");
  phase->add_option("--abcd", ph.abcd, "a b c d")->expected(4)->delimiter(',');
  phase->add_option("--probe", ph.probe, "kernel decay probe band")
      ->check(CLI::IsMember({"low", "high", "dyadic", "full"}));
  phase->add_option("--weight", ph.weight)->check(CLI::IsMember({"power", "bessel"}));
  phase->add_option("--s", ph.s, "power weight exponent");
  phase->add_option("--mu", ph.mu);
  phase->add_option("--dyadic-j", ph.dyadic_j);
  phase->add_flag("--wave", ph.wave, "probe g(r) = r");
  phase->add_option("--out", ph.out, "write phase.json here");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "re-render a report from raw.csv and spec.json");
  report->add_option("dir", report_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int c = app.exit(e);
    return c == 0 ? 0 : kConfig;
  }

  if (*simulate) return cmd_simulate(sim);
  if (*suite) return cmd_suite(su);
  if (*phase) return cmd_phase(ph);
  if (*report) return cmd_report(report_dir);
  return kConfig;
}
