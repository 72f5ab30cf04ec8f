#include "mcsuite/integration.hpp"

#include <algorithm>
#include <cmath>

namespace mcsuite {

double TestFunction::operator()(const Vec& x) const {
  const double v = h(x);
  if (sup_bound && std::abs(v) > *sup_bound) {
    throw Error(ErrorKind::kBoundViolation, "test function exceeds its sup bound");
  }
  return v;
}

Estimate estimate_from_values(const Vec& values, double alpha) {
  Estimate e;
  e.n = values.size();
  e.alpha = alpha;
  e.value = values.mean();
  const double var = (values.array() - e.value).square().mean();
  e.std_error = std::sqrt(var / static_cast<double>(e.n));
  const double z = normal_quantile(1.0 - alpha / 2.0);
  e.ci_lo = e.value - z * e.std_error;
  e.ci_hi = e.value + z * e.std_error;
  return e;
}

Estimate mc_estimate(const Sampler& sampler, const TestFunction& h, long n,
                     double alpha, RngStream& stream) {
  if (n < 2) throw Error(ErrorKind::kInvalidInput, "mc_estimate: N < 2");
  Vec values(n);
  for (long i = 0; i < n; ++i) values(i) = h(sampler(stream));
  return estimate_from_values(values, alpha);
}

Estimate is_estimate(const TargetDensity& target, const SampleableDensity& proposal,
                     const TestFunction& h, long n, double alpha, RngStream& stream) {
  if (n < 2) throw Error(ErrorKind::kInvalidInput, "is_estimate: N < 2");
  Vec values(n);
  for (long i = 0; i < n; ++i) {
    const Vec x = proposal.sample(stream);
    const double log_f = target.log_prob(x);
    const double log_g = proposal.density.log_prob(x);
    if (log_g == kNegInf) {
      if (log_f > kNegInf) {
        throw Error(ErrorKind::kDomain, "is_estimate: proposal density vanishes where f > 0");
      }
      values(i) = 0.0;
      continue;
    }
    values(i) = std::exp(log_f - log_g) * h(x);
  }
  return estimate_from_values(values, alpha);
}

AisEstimate ais_from_log_weights(const Vec& h_values, const Vec& log_weights,
                                 double alpha, std::optional<double> sup_bound) {
  const Vec w = normalize_log_weights(log_weights);
  AisEstimate out;
  const long n = w.size();
  out.estimate.n = n;
  out.estimate.alpha = alpha;
  out.estimate.value = w.dot(h_values);
  const Vec centered = h_values.array() - out.estimate.value;
  out.estimate.std_error = std::sqrt((w.array().square() * centered.array().square()).sum());
  const double z = normal_quantile(1.0 - alpha / 2.0);
  out.estimate.ci_lo = out.estimate.value - z * out.estimate.std_error;
  out.estimate.ci_hi = out.estimate.value + z * out.estimate.std_error;
  out.ess = std::clamp(1.0 / w.squaredNorm(), 1.0, static_cast<double>(n));
  out.zeta_hat = static_cast<double>(n) / out.ess;
  if (sup_bound) {
    const double s = *sup_bound;
    out.bias_bound = 2.0 * s * out.zeta_hat / static_cast<double>(n);
    out.mse_bound = 4.0 * s * s * out.zeta_hat / static_cast<double>(n);
  }
  return out;
}

AisEstimate ais_estimate(const TargetDensity& unnormalized_target,
                         const SampleableDensity& proposal, const TestFunction& h,
                         long n, double alpha, RngStream& stream) {
  Vec hv(n), lw(n);
  for (long i = 0; i < n; ++i) {
    const Vec x = proposal.sample(stream);
    lw(i) = unnormalized_target.log_prob(x) - proposal.density.log_prob(x);
    hv(i) = h(x);
  }
  return ais_from_log_weights(hv, lw, alpha, h.sup_bound);
}

Estimate antithetic_estimate(const Sampler& sampler, const Vec& center,
                             const TestFunction& h, long n, double alpha,
                             RngStream& stream) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::kInvalidInput, "antithetic_estimate: N must be even");
  }
  const long pairs = n / 2;
  Vec pair_means(pairs);
  for (long i = 0; i < pairs; ++i) {
    const Vec x = sampler(stream);
    const Vec xr = 2.0 * center - x;
    pair_means(i) = 0.5 * (h(x) + h(xr));
  }
  Estimate e = estimate_from_values(pair_means, alpha);
  e.n = n;
  return e;
}

Estimate control_variate_estimate(const Sampler& sampler, const TestFunction& h,
                                  const std::function<double(const Vec&)>& h_hat,
                                  double mu, long n, double alpha, RngStream& stream) {
  Vec d(n);
  for (long i = 0; i < n; ++i) {
    const Vec x = sampler(stream);
    d(i) = h(x) - h_hat(x);
  }
  Estimate e = estimate_from_values(d, alpha);
  e.value += mu;
  e.ci_lo += mu;
  e.ci_hi += mu;
  return e;
}

}  // namespace mcsuite
