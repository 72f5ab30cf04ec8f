#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mcsuite {

struct ScalarDistribution {
  std::function<double(double)> cdf;
  std::function<double(double)> inverse_cdf;  // optional closed form
  double support_lo = kNegInf;
  double support_hi = kInf;

  // Generalized inverse F^-(u) = inf{x : F(x) >= u}.
  double quantile(double u) const;
  bool in_support(double x) const { return x >= support_lo && x <= support_hi; }
};

ScalarDistribution exponential_distribution(double rate);
ScalarDistribution uniform_distribution(double lo, double hi);
// No closed-form inverse: quantiles go through bisection on the CDF.
ScalarDistribution normal_distribution(double mean, double sd);
ScalarDistribution beta_distribution(double a, double b);

// Bisection for F^-(u); tolerance 1e-12, at most 200 iterations.
double generalized_inverse(const ScalarDistribution& dist, double u);

Vec inverse_transform_sample(const ScalarDistribution& dist, RngStream& stream,
                             long n);

double transport_proposal_to_target(const ScalarDistribution& target,
                                    const ScalarDistribution& proposal, double z);

// Component i receives (u_1..u_i) and the already computed (x_1..x_{i-1}).
using TriangularComponent = std::function<double(const Vec& u_head, const Vec& x_head)>;

struct TriangularMap {
  std::vector<TriangularComponent> components;
  int dim() const { return static_cast<int>(components.size()); }
  Vec apply(const Vec& u) const;
};

Mat kr_sample(const TriangularMap& map, RngStream& stream, long n);

struct RejectionResult {
  Mat samples;
  long attempts = 0;
  long target_evaluations = 0;
  double acceptance_rate() const {
    return attempts ? static_cast<double>(samples.rows()) / attempts : 0.0;
  }
};

// Accepts Z ~ g when U <= f(Z)/(M g(Z)). With an envelope l <= f, the draw is
// accepted early when U <= l/(Mg) and f is only evaluated otherwise.
RejectionResult rejection_sample(
    const TargetDensity& target, const SampleableDensity& proposal, double m,
    RngStream& stream, long n,
    const std::function<double(const Vec&)>& log_envelope = nullptr);

// Runs exactly `attempts` proposals and keeps the accepted ones.
RejectionResult rejection_sample_attempts(const TargetDensity& target,
                                          const SampleableDensity& proposal, double m,
                                          RngStream& stream, long attempts);

struct AbcProblem {
  std::function<Vec(RngStream&)> prior_sampler;
  std::function<Vec(const Vec& theta, RngStream&)> simulator;
  std::function<Vec(const Vec& data)> summary;
  std::function<double(const Vec&, const Vec&)> distance;
  double tolerance = 0.0;
  Vec observed;
  double acceptance_floor = 1e-6;
  long probe_budget = 100000;
};

struct AbcResult {
  Mat accepted;
  long simulations = 0;
};

AbcResult abc_rejection(const AbcProblem& problem, RngStream& stream, long n);

// Binomial(n, p) as a sum of Bernoulli draws.
long binomial_draw(RngStream& stream, long n, double p);

}  // namespace mcsuite
