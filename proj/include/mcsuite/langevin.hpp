#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace mcsuite {

enum class StepSchedule { kConstant, kPower };

// kPower gives eps_n = c n^-gamma with gamma in (0.5, 1].
struct LangevinConfig {
  double step = 0.1;
  long n = 1000;
  StepSchedule schedule = StepSchedule::kConstant;
  double c = 0.1;
  double gamma = 1.0;

  void validate() const;
  // n is 1-based.
  double step_at(long n) const;
};

// Euler-Maruyama step X + eps grad log f + sqrt(2 eps) xi. When noise is
// given it receives xi row by row.
ChainTrace ula_run(const TargetDensity& target, const LangevinConfig& config,
                   const Vec& init, RngStream& stream, Mat* noise = nullptr);

struct GaussianMoments {
  Vec mean;
  Mat cov;
};

// Law of ULA after n steps from N(mu0, sigma0sq I) on a Gaussian target.
GaussianMoments ula_gaussian_moments(const GaussianTarget& target, const Vec& mu0,
                                     double sigma0sq, double eps, long n);
// (H - eps/2 H^2)^-1
Mat ula_limit_covariance(const GaussianTarget& target, double eps);

// W2 between Gaussians whose covariances commute.
double gaussian_w2_commuting(const Vec& m1, const Mat& s1, const Vec& m2, const Mat& s2);

ChainTrace mala_run(const TargetDensity& target, const LangevinConfig& config,
                    const Vec& init, RngStream& stream);

struct SgldModel {
  std::function<Vec(const Vec& theta)> grad_log_prior;
  // Gradient of log f(y_i | theta) for datum i.
  std::function<Vec(const Vec& theta, long i)> grad_log_lik;
  long data_size = 0;
};

// (K/k) times the gradient sum over k indices drawn without replacement.
Vec sgld_minibatch_gradient(const SgldModel& model, const Vec& theta, long k,
                            RngStream& stream);
Vec sgld_full_gradient(const SgldModel& model, const Vec& theta);

ChainTrace sgld_run(const SgldModel& model, long k, const LangevinConfig& config,
                    const Vec& init, RngStream& stream);

}  // namespace mcsuite
