#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <optional>

namespace mcsuite {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long n = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double alpha = 0.05;
};

struct TestFunction {
  std::function<double(const Vec&)> h;
  std::optional<double> sup_bound;

  double operator()(const Vec& x) const;
};

using Sampler = std::function<Vec(RngStream&)>;

// Mean with plug-in (1/N) variance and a normal 1-alpha interval.
Estimate estimate_from_values(const Vec& values, double alpha);

Estimate mc_estimate(const Sampler& sampler, const TestFunction& h, long n,
                     double alpha, RngStream& stream);

Estimate is_estimate(const TargetDensity& target, const SampleableDensity& proposal,
                     const TestFunction& h, long n, double alpha, RngStream& stream);

struct AisEstimate {
  Estimate estimate;
  double ess = 0.0;
  double zeta_hat = 0.0;  // N / ESS
  // Reported only when h declares a sup bound.
  std::optional<double> bias_bound;
  std::optional<double> mse_bound;
};

AisEstimate ais_estimate(const TargetDensity& unnormalized_target,
                         const SampleableDensity& proposal, const TestFunction& h,
                         long n, double alpha, RngStream& stream);

// Self-normalized estimate from given draws and log-weights.
AisEstimate ais_from_log_weights(const Vec& h_values, const Vec& log_weights,
                                 double alpha, std::optional<double> sup_bound);

Estimate antithetic_estimate(const Sampler& sampler, const Vec& center,
                             const TestFunction& h, long n, double alpha,
                             RngStream& stream);

Estimate control_variate_estimate(const Sampler& sampler, const TestFunction& h,
                                  const std::function<double(const Vec&)>& h_hat,
                                  double mu, long n, double alpha, RngStream& stream);

}  // namespace mcsuite
