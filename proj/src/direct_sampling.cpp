#include "mcsuite/direct_sampling.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cmath>

namespace mcsuite {

double generalized_inverse(const ScalarDistribution& dist, double u) {
  if (u <= 0.0) return dist.support_lo;
  double lo = dist.support_lo, hi = dist.support_hi;
  // Expand an infinite side outward until the bracket F(lo) < u <= F(hi).
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    double step = 1.0;
    double left = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi - step : -step);
    double right = std::isfinite(hi) ? hi : (std::isfinite(lo) ? lo + step : step);
    for (int i = 0; i < 1100 && !std::isfinite(lo) && dist.cdf(left) >= u; ++i) {
      step *= 2.0;
      left -= step;
    }
    step = 1.0;
    for (int i = 0; i < 1100 && !std::isfinite(hi) && dist.cdf(right) < u; ++i) {
      step *= 2.0;
      right += step;
    }
    if (!std::isfinite(lo)) lo = left;
    if (!std::isfinite(hi)) hi = right;
  }
  if (!(dist.cdf(hi) >= u) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::kConfiguration,
                "generalized inverse: bracket not found within support");
  }
  if (dist.cdf(lo) >= u) return lo;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) break;
    const double mid = 0.5 * (lo + hi);
    if (dist.cdf(mid) >= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double ScalarDistribution::quantile(double u) const {
  if (inverse_cdf) return inverse_cdf(u);
  return generalized_inverse(*this, u);
}

ScalarDistribution exponential_distribution(double rate) {
  ScalarDistribution d;
  d.cdf = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  d.inverse_cdf = [rate](double u) { return -std::log1p(-u) / rate; };
  d.support_lo = 0.0;
  return d;
}

ScalarDistribution uniform_distribution(double lo, double hi) {
  ScalarDistribution d;
  d.cdf = [lo, hi](double x) {
    return x <= lo ? 0.0 : (x >= hi ? 1.0 : (x - lo) / (hi - lo));
  };
  d.inverse_cdf = [lo, hi](double u) { return lo + u * (hi - lo); };
  d.support_lo = lo;
  d.support_hi = hi;
  return d;
}

ScalarDistribution normal_distribution(double mean, double sd) {
  ScalarDistribution d;
  d.cdf = [mean, sd](double x) { return normal_cdf((x - mean) / sd); };
  return d;
}

ScalarDistribution beta_distribution(double a, double b) {
  ScalarDistribution d;
  boost::math::beta_distribution<double> beta(a, b);
  d.cdf = [beta](double x) {
    return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : boost::math::cdf(beta, x));
  };
  d.inverse_cdf = [beta](double u) { return boost::math::quantile(beta, u); };
  d.support_lo = 0.0;
  d.support_hi = 1.0;
  return d;
}

Vec inverse_transform_sample(const ScalarDistribution& dist, RngStream& stream,
                             long n) {
  Vec out(n);
  for (long i = 0; i < n; ++i) out(i) = dist.quantile(stream.uniform());
  return out;
}

double transport_proposal_to_target(const ScalarDistribution& target,
                                    const ScalarDistribution& proposal, double z) {
  if (!proposal.in_support(z)) {
    throw Error(ErrorKind::kDomain, "transport: z outside proposal support");
  }
  return target.quantile(proposal.cdf(z));
}

Vec TriangularMap::apply(const Vec& u) const {
  const int d = dim();
  Vec x(d);
  for (int i = 0; i < d; ++i) {
    const Vec uh = u.head(i + 1);
    const Vec xh = x.head(i);
    const double xi = components[i](uh, xh);
    if (!std::isfinite(xi)) {
      throw Error(ErrorKind::kMapValidity,
                  "triangular map component " + std::to_string(i) +
                      " returned a non-finite value");
    }
    // Monotonicity probe in the i-th variable.
    Vec up = uh;
    const double du = 1e-7 * std::min(up(i), 1.0 - up(i));
    up(i) += du;
    const double xp = components[i](up, xh);
    if (xp < xi - 1e-12 * std::max(1.0, std::abs(xi))) {
      throw Error(ErrorKind::kMapValidity,
                  "triangular map component " + std::to_string(i) +
                      " is decreasing in its own variable");
    }
    x(i) = xi;
  }
  return x;
}

Mat kr_sample(const TriangularMap& map, RngStream& stream, long n) {
  if (map.dim() < 1) throw Error(ErrorKind::kInvalidInput, "kr_sample: empty map");
  Mat out(n, map.dim());
  Vec u(map.dim());
  for (long r = 0; r < n; ++r) {
    for (int i = 0; i < map.dim(); ++i) u(i) = stream.uniform();
    out.row(r) = map.apply(u).transpose();
  }
  return out;
}

RejectionResult rejection_sample(const TargetDensity& target,
                                 const SampleableDensity& proposal, double m,
                                 RngStream& stream, long n,
                                 const std::function<double(const Vec&)>& log_envelope) {
  if (!(m >= 1.0)) throw Error(ErrorKind::kInvalidInput, "rejection_sample: M < 1");
  const double log_m = std::log(m);
  const double log_slack = std::log1p(1e-9);
  RejectionResult res;
  res.samples.resize(n, target.dim);
  long accepted = 0;
  while (accepted < n) {
    const Vec z = proposal.sample(stream);
    const double log_u = std::log(stream.uniform());
    ++res.attempts;
    const double log_mg = log_m + proposal.density.log_prob(z);
    bool accept = false;
    if (log_envelope && log_u <= log_envelope(z) - log_mg) {
      accept = true;
    } else {
      const double log_f = target.log_prob(z);
      ++res.target_evaluations;
      const double log_ratio = log_f - log_mg;
      if (log_ratio > log_slack) {
        throw Error(ErrorKind::kBoundViolation,
                    "rejection_sample: f > M g at a proposed point");
      }
      accept = log_u <= log_ratio;
    }
    if (accept) res.samples.row(accepted++) = z.transpose();
  }
  return res;
}

RejectionResult rejection_sample_attempts(const TargetDensity& target,
                                          const SampleableDensity& proposal, double m,
                                          RngStream& stream, long attempts) {
  if (!(m >= 1.0)) throw Error(ErrorKind::kInvalidInput, "rejection_sample: M < 1");
  const double log_m = std::log(m);
  const double log_slack = std::log1p(1e-9);
  std::vector<Vec> kept;
  RejectionResult res;
  for (long i = 0; i < attempts; ++i) {
    const Vec z = proposal.sample(stream);
    const double log_u = std::log(stream.uniform());
    ++res.attempts;
    const double log_ratio = target.log_prob(z) - log_m - proposal.density.log_prob(z);
    ++res.target_evaluations;
    if (log_ratio > log_slack) {
      throw Error(ErrorKind::kBoundViolation, "rejection_sample: f > M g at a proposed point");
    }
    if (log_u <= log_ratio) kept.push_back(z);
  }
  res.samples.resize(static_cast<long>(kept.size()), target.dim);
  for (std::size_t i = 0; i < kept.size(); ++i) res.samples.row(i) = kept[i].transpose();
  return res;
}

AbcResult abc_rejection(const AbcProblem& problem, RngStream& stream, long n) {
  if (!(problem.tolerance >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "abc_rejection: tolerance must be positive");
  }
  const Vec s_obs = problem.summary(problem.observed);
  AbcResult res;
  long accepted = 0;
  std::vector<Vec> kept;
  kept.reserve(n);
  while (accepted < n) {
    const Vec theta = problem.prior_sampler(stream);
    const Vec y = problem.simulator(theta, stream);
    ++res.simulations;
    if (problem.distance(s_obs, problem.summary(y)) < problem.tolerance) {
      kept.push_back(theta);
      ++accepted;
    }
    if (res.simulations == problem.probe_budget &&
        static_cast<double>(accepted) / res.simulations < problem.acceptance_floor) {
      throw Error(ErrorKind::kToleranceTooTight,
                  "abc_rejection: acceptance rate below floor after " +
                      std::to_string(problem.probe_budget) + " simulations");
    }
  }
  res.accepted.resize(n, kept.empty() ? 0 : kept.front().size());
  for (long i = 0; i < n; ++i) res.accepted.row(i) = kept[i].transpose();
  return res;
}

long binomial_draw(RngStream& stream, long n, double p) {
  long k = 0;
  for (long i = 0; i < n; ++i) k += stream.uniform() < p ? 1 : 0;
  return k;
}

}  // namespace mcsuite
