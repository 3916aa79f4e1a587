#pragma once

#include <string>
#include <vector>

#include "rigidlid/model.hpp"

namespace rigidlid {

struct PhaseDerivatives {
  double g = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

// g(y) = y sqrt((1-ay^2)(1-cy^2)/((1+by^2)(1+dy^2))) and its first three derivatives.
PhaseDerivatives phase_derivatives(const AbcdParams& p, double r);
// R(y) = sqrt((1-ay^2)(1+dy^2)/((1+by^2)(1-cy^2)))
double phase_ratio(const AbcdParams& p, double r);
// k-th derivative of g for k <= 8, from a truncated Taylor expansion.
double phase_derivative_k(const AbcdParams& p, double r, int k);

struct GppZero {
  double location = 0.0;
  int multiplicity = 0;
};

struct PhaseClassification {
  bool sum_zero = false;
  double ell = 0.0;  // limit of g' at infinity
  int alpha = 0;     // g'(r) - ell ~ C r^(alpha+1)
  std::vector<GppZero> gpp_zeros;
  int m_max = 0;
  int p = 3;
  int p0 = 1;
  double sigma = 0.0;
  bool gp_positive = true;
  bool alpha_excluded = false;  // alpha in {-2,-1}: no decay estimate for this tail
};

struct ClassifyOptions {
  double scan_lo = 1e-4;
  double scan_hi = 1e3;
  int scan_points = 100000;
  double tol_rel = 1e-8;
  int multiplicity_cap = 3;
};

PhaseClassification classify(const AbcdParams& p, const ClassifyOptions& opt = {});

enum class ProbeBand { Low, High, Dyadic, Full };
enum class ProbeWeight { Power, Bessel };

const char* to_string(ProbeBand b);
ProbeBand probe_band_from_string(const std::string& s);

struct KernelProbeSpec {
  AbcdParams abcd;
  bool wave = false;  // use g(r) = r instead of the abcd phase
  double mu = 1.0;
  ProbeBand band = ProbeBand::Low;
  int dyadic_j = 0;
  ProbeWeight weight = ProbeWeight::Power;
  double s = 0.5;             // Power: |xi|^s
  double bessel_beta = 5.0 / 6.0;  // Bessel: (1 + mu xi^2)^-beta
  std::vector<double> times;
  int n = 0;            // 0: 2^16 for compact bands, 2^18 otherwise
  double length = 0.0;  // 0: chosen from the largest time
};

struct KernelProbeResult {
  std::vector<double> times;
  std::vector<double> sup;
  double theta = 0.0;
  double theta_lo = 0.0, theta_hi = 0.0;  // 95% band
  double predicted = 0.0;
  bool skipped = false;
  std::string note;
};

// compact low bands need later times to reach the asymptotic regime
std::vector<double> default_probe_times(ProbeBand band);
KernelProbeResult kernel_decay_probe(const KernelProbeSpec& spec);

// Least squares fit of log y = a + b log x, with the standard error of b.
struct LogLogFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0, slope_se = 0.0;
};
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);
double student_t975(int dof);

}  // namespace rigidlid
