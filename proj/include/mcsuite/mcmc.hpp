#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <vector>

namespace mcsuite {

struct ProposalKernel {
  std::function<Vec(const Vec& current, RngStream&)> propose;
  // log q(from, to); never consulted when symmetric is set.
  std::function<double(const Vec& from, const Vec& to)> log_q;
  bool symmetric = true;
};

using LogDensityFn = std::function<double(const Vec&)>;

// One Metropolis-Hastings transition. The uniform is always drawn so that
// traces stay comparable across kernels.
struct MhStep {
  Vec state;
  double log_density;
  bool accepted;
};
MhStep mh_step(const LogDensityFn& log_f, const ProposalKernel& kernel,
               const Vec& x, double log_fx, RngStream& stream, long iteration = 0);

ChainTrace mh_run(const TargetDensity& target, const ProposalKernel& kernel,
                  const Vec& init, long n, RngStream& stream);
ChainTrace mh_run(const TargetDensity& target, const ProposalKernel& kernel,
                  const std::function<Vec(RngStream&)>& init, long n,
                  RngStream& stream);

ProposalKernel independence_kernel(const SampleableDensity& g);
ProposalKernel rwmh_kernel(const std::function<Vec(RngStream&)>& step,
                           const std::function<double(const Vec&)>& step_log_density,
                           bool symmetric);
// Gaussian random walk with per-coordinate standard deviation sd.
ProposalKernel gaussian_rwmh_kernel(double sd);

// Exact MH kernel on a finite state space: p = q a + diag(r).
Mat exact_mh_kernel(const Vec& f, const Mat& q);

struct AcfResult {
  Vec acf;
  double iat = 1.0;
  int truncation_lag = 0;
};

// Empirical autocovariances gamma_0..gamma_max_lag (1/N normalization, FFT).
Vec autocovariance(const Vec& series, long max_lag);
// IAT = 1 + 2 sum rho_k, summed through the first lag with rho_k < 0.05.
AcfResult autocorrelation(const Vec& series, long max_lag);
AcfResult autocorrelation(const ChainTrace& trace,
                          const std::function<double(const Vec&)>& h, long max_lag);

// Long-run variance with a Bartlett window of floor(4 sqrt(n)) lags.
double bartlett_long_run_variance(const Vec& series);

double geweke(const Vec& series, double frac_a = 0.1, double frac_b = 0.5,
              long burn_in = 0);
double geweke(const ChainTrace& trace, const std::function<double(const Vec&)>& h,
              double frac_a = 0.1, double frac_b = 0.5, long burn_in = 0);

struct GelmanRubin {
  double b = 0.0;
  double w = 0.0;
  double v = 0.0;
  double r = 0.0;
};

// Each series has length 2N; the first N are discarded.
GelmanRubin gelman_rubin(const std::vector<Vec>& chains);
GelmanRubin gelman_rubin(const std::vector<ChainTrace>& traces,
                         const std::function<double(const Vec&)>& h);

struct DiagnosticsReport {
  Vec acf;
  double iat = 1.0;
  double geweke_z = 0.0;
  double gelman_rubin_r = 0.0;
  std::string iat_rule = "sum through first lag with rho_k < 0.05";
  std::string geweke_window = "Bartlett, floor(4 sqrt(n)) lags";
};

Vec apply_h(const ChainTrace& trace, const std::function<double(const Vec&)>& h);

}  // namespace mcsuite
