#include "rigidlid/phase.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>

#include "rigidlid/error.hpp"
#include "rigidlid/multiplier.hpp"

namespace rigidlid {

namespace {

// Truncated Taylor series around a point: c[k] = f^(k)(r)/k!
constexpr int kJet = 9;
struct Jet {
  std::array<double, kJet> c{};
};

Jet jet_var(double r) {
  Jet j;
  j.c[0] = r;
  j.c[1] = 1.0;
  return j;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out;
  for (int k = 0; k < kJet; ++k)
    for (int i = 0; i <= k; ++i) out.c[k] += a.c[i] * b.c[k - i];
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  Jet out;
  for (int k = 0; k < kJet; ++k) {
    double s = a.c[k];
    for (int i = 1; i <= k; ++i) s -= b.c[i] * out.c[k - i];
    out.c[k] = s / b.c[0];
  }
  return out;
}

Jet jet_sqrt(const Jet& a) {
  Jet out;
  out.c[0] = std::sqrt(a.c[0]);
  for (int k = 1; k < kJet; ++k) {
    double s = a.c[k];
    for (int i = 1; i < k; ++i) s -= out.c[i] * out.c[k - i];
    out.c[k] = s / (2.0 * out.c[0]);
  }
  return out;
}

// 1 + coef*y^2
Jet quad(const Jet& y, double coef) {
  Jet y2 = y * y;
  for (auto& v : y2.c) v *= coef;
  y2.c[0] += 1.0;
  return y2;
}

Jet phase_jet(const AbcdParams& p, double r) {
  const Jet y = jet_var(r);
  const Jet num = quad(y, -p.a) * quad(y, -p.c);
  const Jet den = quad(y, p.b) * quad(y, p.d);
  return y * jet_sqrt(num / den);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double scale_k(const PhaseDerivatives& d, double r, int k) {
  return (std::abs(d.g1) + std::abs(d.g) / r) * std::pow(r, 1.0 - k);
}

// Multiplicity of a zero of g'' at r: smallest j with g^(2+j) above tolerance.
int gpp_multiplicity(const AbcdParams& p, double r, const ClassifyOptions& opt) {
  const PhaseDerivatives d = phase_derivatives(p, r);
  for (int j = 1; j <= opt.multiplicity_cap; ++j) {
    const double v = phase_derivative_k(p, r, 2 + j);
    if (std::abs(v) >= opt.tol_rel * scale_k(d, r, 2 + j)) return j;
  }
  return opt.multiplicity_cap;
}

template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> r(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) r[i] = std::exp(a + (b - a) * i / (n - 1));
  return r;
}

}  // namespace

PhaseDerivatives phase_derivatives(const AbcdParams& p, double r) {
  require(std::isfinite(r), ErrorCode::InvalidArgument, "phase needs a finite r");
  if (r < 0.0) {
    // g is odd
    const auto d = phase_derivatives(p, -r);
    return {-d.g, d.g1, -d.g2, d.g3};
  }
  const Jet j = phase_jet(p, r);
  PhaseDerivatives d{j.c[0], j.c[1], 2.0 * j.c[2], 6.0 * j.c[3]};
  require(std::isfinite(d.g) && std::isfinite(d.g1) && std::isfinite(d.g2) && std::isfinite(d.g3),
          ErrorCode::NonFinite, "phase is singular at this r");
  return d;
}

double phase_ratio(const AbcdParams& p, double r) {
  const double y2 = r * r;
  return std::sqrt((1.0 - p.a * y2) * (1.0 + p.d * y2) / ((1.0 + p.b * y2) * (1.0 - p.c * y2)));
}

double phase_derivative_k(const AbcdParams& p, double r, int k) {
  require(k >= 0 && k < kJet, ErrorCode::InvalidArgument, "derivative order out of range");
  return factorial(k) * phase_jet(p, r).c[k];
}

PhaseClassification classify(const AbcdParams& p, const ClassifyOptions& opt) {
  require(p.admissible(), ErrorCode::Inadmissible, "abcd parameters are not admissible");
  require(p.nondegenerate(), ErrorCode::Degenerate, "degenerate phase: no dispersion");
  require(opt.scan_points >= 100 && opt.scan_lo > 0.0 && opt.scan_hi > opt.scan_lo,
          ErrorCode::InvalidArgument, "bad scan settings");
  PhaseClassification out;
  out.sum_zero = std::abs(p.sum()) <= 1e-14 * (std::abs(p.a) + std::abs(p.b) + std::abs(p.c) + std::abs(p.d));

  // tail: S ~ C y^(nn - nd)
  const int nn = (p.a != 0.0) + (p.c != 0.0);
  const int nd = (p.b != 0.0) + (p.d != 0.0);
  if (nn == nd) {
    double num = 1.0, den = 1.0;
    if (p.a != 0.0) num *= -p.a;
    if (p.c != 0.0) num *= -p.c;
    if (p.b != 0.0) den *= p.b;
    if (p.d != 0.0) den *= p.d;
    out.ell = std::sqrt(num / den);
  }
  const double r1 = 1e2, r2 = 1e3;
  const double s1 = std::abs(phase_derivatives(p, r1).g2);
  const double s2 = std::abs(phase_derivatives(p, r2).g2);
  int alpha = -6;
  if (s1 > 0.0 && s2 > 0.0) alpha = int(std::lround(std::log10(s2 / s1)));
  out.alpha = std::clamp(alpha, -6, 1);
  out.alpha_excluded = out.alpha == -2 || out.alpha == -1;

  const auto r = log_grid(opt.scan_lo, opt.scan_hi, opt.scan_points);
  std::vector<PhaseDerivatives> d(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) d[i] = phase_derivatives(p, r[i]);

  auto g2 = [&](double x) { return phase_derivatives(p, x).g2; };
  auto g3 = [&](double x) { return phase_derivatives(p, x).g3; };
  auto g1 = [&](double x) { return phase_derivatives(p, x).g1; };
  auto add_zero = [&](double loc, int m) {
    for (const auto& z : out.gpp_zeros)
      if (std::abs(z.location - loc) <= 1e-6 * loc) return;
    out.gpp_zeros.push_back({loc, m});
  };

  out.gp_positive = true;
  bool common_zero = false;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (d[i].g1 <= 0.0) out.gp_positive = false;
    // sign change of g'': odd multiplicity
    if ((d[i].g2 < 0.0) != (d[i + 1].g2 < 0.0)) {
      const double z = d[i + 1].g2 == 0.0 ? r[i + 1] : bisect(g2, r[i], r[i + 1]);
      add_zero(z, gpp_multiplicity(p, z, opt));
    }
    // extremum of g'' touching zero: even multiplicity
    if ((d[i].g3 < 0.0) != (d[i + 1].g3 < 0.0)) {
      const double z = bisect(g3, r[i], r[i + 1]);
      const PhaseDerivatives dz = phase_derivatives(p, z);
      if (std::abs(dz.g2) < opt.tol_rel * scale_k(dz, z, 2)) add_zero(z, gpp_multiplicity(p, z, opt));
    }
    if ((d[i].g1 < 0.0) != (d[i + 1].g1 < 0.0)) {
      const double z = bisect(g1, r[i], r[i + 1]);
      const PhaseDerivatives dz = phase_derivatives(p, z);
      if (std::abs(dz.g2) < 1e-6 * scale_k(dz, z, 2)) common_zero = true;
    }
  }
  if (d.back().g1 <= 0.0) out.gp_positive = false;
  std::sort(out.gpp_zeros.begin(), out.gpp_zeros.end(),
            [](const GppZero& a, const GppZero& b) { return a.location < b.location; });
  for (const auto& z : out.gpp_zeros) out.m_max = std::max(out.m_max, z.multiplicity);

  out.p = std::max(out.m_max + 2, out.sum_zero ? 5 : 3);
  out.p0 = out.gp_positive ? 1 : (common_zero ? 3 : 2);
  const double m = out.m_max;
  out.sigma = (m + 4.0) / (2.0 * m + 4.0);
  if (out.sum_zero) out.sigma = std::min(out.sigma, 0.8);
  return out;
}

// ------------------------------------------------------------ kernel probe

const char* to_string(ProbeBand b) {
  switch (b) {
    case ProbeBand::Low: return "low";
    case ProbeBand::High: return "high";
    case ProbeBand::Dyadic: return "dyadic";
    case ProbeBand::Full: return "full";
  }
  return "?";
}

ProbeBand probe_band_from_string(const std::string& s) {
  if (s == "low") return ProbeBand::Low;
  if (s == "high") return ProbeBand::High;
  if (s == "dyadic") return ProbeBand::Dyadic;
  if (s == "full") return ProbeBand::Full;
  fail(ErrorCode::InvalidArgument, "unknown probe band: " + s);
}

std::vector<double> default_probe_times(ProbeBand band) {
  const double t0 = (band == ProbeBand::Low || band == ProbeBand::Dyadic) ? 64.0 : 8.0;
  std::vector<double> t;
  for (int i = 0; i < 8; ++i) t.push_back(t0 * std::pow(2.0, 5.0 * i / 7.0));
  return t;
}

double student_t975(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  require(dof >= 1, ErrorCode::InvalidArgument, "need at least one degree of freedom");
  if (dof <= 30) return table[dof - 1];
  return 1.96 + 2.4 / dof;
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::ShapeMismatch,
          "fit needs at least two matching points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::InvalidArgument, "log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, ErrorCode::InvalidArgument, "fit abscissae are all equal");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - f.intercept - f.slope * lx[i];
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  f.slope_se = n > 2 ? std::sqrt(ss / double(n - 2) / sxx) : 0.0;
  return f;
}

namespace {

std::mutex plan_mutex;

double band_value(const KernelProbeSpec& s, double eta) {
  switch (s.band) {
    case ProbeBand::Low: return phi0(eta);
    case ProbeBand::High: return 1.0 - phi0(eta);
    case ProbeBand::Dyadic: return dyadic_symbol(s.dyadic_j, eta);
    case ProbeBand::Full: return 1.0;
  }
  return 0.0;
}

// band support in eta = sqrt(mu)|xi|; upper end is infinite for High/Full
std::pair<double, double> band_support(const KernelProbeSpec& s) {
  switch (s.band) {
    case ProbeBand::Low: return {0.0, 1.0};
    case ProbeBand::Dyadic: return {std::ldexp(0.5, s.dyadic_j), std::ldexp(2.0, s.dyadic_j)};
    case ProbeBand::High:
    case ProbeBand::Full: return {0.5, HUGE_VAL};
  }
  return {0.0, 0.0};
}

double phase_g(const KernelProbeSpec& s, double eta) {
  return s.wave ? eta : phase_derivatives(s.abcd, eta).g;
}

double max_group_velocity(const KernelProbeSpec& s, double eta_hi) {
  if (s.wave) return 1.0;
  const double hi = std::min(eta_hi, 1e3);
  double v = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double eta = hi * i / 4000.0;
    v = std::max(v, std::abs(phase_derivatives(s.abcd, eta).g1));
  }
  return v;
}

double predicted_exponent(const KernelProbeSpec& s, KernelProbeResult& res) {
  if (s.wave) return 0.0;
  const PhaseClassification pc = classify(s.abcd);
  const double beta = pc.sum_zero ? 3.0 : 1.0;
  auto zeros_rate = [&](double lo, double hi) {
    int m = 0;
    for (const auto& z : pc.gpp_zeros)
      if (z.location >= lo && z.location <= hi) m = std::max(m, z.multiplicity);
    return 1.0 / (m + 2.0);
  };
  // high frequencies: blocks near eta ~ t^(1/|alpha+2|) dominate
  auto tail_rate = [&](double s_eff) {
    if (pc.alpha_excluded) {
      res.skipped = true;
      res.note = "tail exponent alpha in {-2,-1}: decay estimates do not cover this tail";
      return 0.0;
    }
    if (pc.alpha >= -1 || s_eff + 1.0 >= 0.0) return 0.0;
    return -(s_eff + 1.0) / (-pc.alpha - 2.0);
  };
  const double s_eff = s.weight == ProbeWeight::Bessel ? -2.0 * s.bessel_beta : s.s;
  switch (s.band) {
    case ProbeBand::Low: return (s.s + 1.0) / (2.0 + beta);
    case ProbeBand::Dyadic: {
      const auto [lo, hi] = band_support(s);
      return zeros_rate(lo, hi);
    }
    case ProbeBand::High: return std::min(zeros_rate(0.5, HUGE_VAL), tail_rate(s_eff));
    case ProbeBand::Full:
      return std::min({1.0 / (2.0 + beta), zeros_rate(0.0, HUGE_VAL), tail_rate(s_eff)});
  }
  return 0.0;
}

}  // namespace

KernelProbeResult kernel_decay_probe(const KernelProbeSpec& spec) {
  require(spec.mu > 0.0, ErrorCode::InvalidArgument, "mu must be positive");
  const bool compact = spec.band == ProbeBand::Low || spec.band == ProbeBand::Dyadic;
  const int n = spec.n > 0 ? spec.n : (compact ? 1 << 16 : 1 << 18);
  require(n >= 64 && n % 2 == 0, ErrorCode::InvalidArgument, "probe grid size must be even");
  if (!spec.wave) {
    require(spec.abcd.admissible(), ErrorCode::Inadmissible, "abcd parameters are not admissible");
    require(spec.abcd.nondegenerate(), ErrorCode::Degenerate, "degenerate phase: no dispersion");
  }
  const std::vector<double> times = spec.times.empty() ? default_probe_times(spec.band) : spec.times;
  require(times.size() >= 3, ErrorCode::InvalidArgument, "probe needs at least three times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] > 0.0, ErrorCode::InvalidArgument, "probe times must be positive");
    if (i > 0)
      require(times[i] > times[i - 1], ErrorCode::InvalidArgument,
              "probe times must be strictly increasing");
  }
  if (spec.weight == ProbeWeight::Power) {
    const bool has_zero = spec.band == ProbeBand::Low || spec.band == ProbeBand::Full;
    const bool unbounded_top = spec.band == ProbeBand::High || spec.band == ProbeBand::Full;
    require(!(has_zero && spec.s < 0.0), ErrorCode::InvalidArgument,
            "negative weight exponent is unbounded on a band containing 0");
    require(!(unbounded_top && spec.s > 0.0), ErrorCode::InvalidArgument,
            "positive weight exponent is unbounded on an unbounded band");
  } else {
    require(spec.bessel_beta >= 0.0, ErrorCode::InvalidArgument, "Bessel exponent must be >= 0");
  }

  KernelProbeResult res;
  res.times = times;
  res.predicted = predicted_exponent(spec, res);
  if (res.skipped) return res;

  const double rmu = std::sqrt(spec.mu);
  const auto [eta_lo, eta_hi] = band_support(spec);
  (void)eta_lo;
  const double vmax = max_group_velocity(spec, eta_hi);
  const double tmax = times.back();
  const double length = spec.length > 0.0 ? spec.length : std::max(2.5 * tmax * vmax, 64.0);
  const double dk = 2.0 * M_PI / length;
  const double knyq = M_PI * n / length;
  require(tmax * vmax < 0.45 * length, ErrorCode::Resolution,
          "domain too short: the kernel wraps around before the last probe time");
  if (std::isfinite(eta_hi)) {
    require(eta_hi / rmu < knyq, ErrorCode::Resolution, "band is not resolved below Nyquist");
  } else {
    // weight must have decayed at the grid edge
    const double edge = spec.weight == ProbeWeight::Bessel
                            ? std::pow(1.0 + spec.mu * knyq * knyq, -spec.bessel_beta)
                            : std::pow(knyq, spec.s);
    const double ref = spec.weight == ProbeWeight::Bessel ? 1.0 : std::pow(0.5 / rmu, spec.s);
    require(edge < 1e-3 * ref, ErrorCode::Resolution,
            "weight has not decayed at the grid Nyquist frequency");
  }

  // amplitude and unit-time phase per mode
  std::vector<double> amp(n, 0.0), ph(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (k == n / 2) continue;
    const double xi = dk * (k < n / 2 ? k : k - n);
    const double ax = std::abs(xi);
    const double eta = rmu * ax;
    double w = band_value(spec, eta);
    if (w == 0.0) continue;
    if (spec.weight == ProbeWeight::Bessel)
      w *= std::pow(1.0 + spec.mu * xi * xi, -spec.bessel_beta);
    else if (spec.s != 0.0)
      w *= ax == 0.0 ? 0.0 : std::pow(ax, spec.s);
    amp[k] = w / length;
    ph[k] = phase_g(spec, eta) / rmu;
  }

  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (double t : times) {
    for (int k = 0; k < n; ++k) {
      const std::complex<double> v = amp[k] == 0.0 ? 0.0 : std::polar(amp[k], t * ph[k]);
      buf[k][0] = v.real();
      buf[k][1] = v.imag();
    }
    fftw_execute(plan);
    std::vector<double> m(n);
    for (int j = 0; j < n; ++j) m[j] = std::hypot(buf[j][0], buf[j][1]);
    const auto it = std::max_element(m.begin(), m.end());
    const int j = int(it - m.begin());
    const double a = m[(j + n - 1) % n], b = *it, c = m[(j + 1) % n];
    const double den = a - 2.0 * b + c;
    double peak = b;
    if (den < 0.0) peak = std::max(b, b - (c - a) * (c - a) / (8.0 * den));
    res.sup.push_back(peak);
  }
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);

  for (double v : res.sup)
    require(v > 0.0 && std::isfinite(v), ErrorCode::NonFinite, "kernel sup is not positive");
  const LogLogFit f = loglog_fit(res.times, res.sup);
  res.theta = -f.slope;
  const double half = times.size() > 2 ? student_t975(int(times.size()) - 2) * f.slope_se : 0.0;
  res.theta_lo = res.theta - half;
  res.theta_hi = res.theta + half;
  return res;
}

}  // namespace rigidlid
