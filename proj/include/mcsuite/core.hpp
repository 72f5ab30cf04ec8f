#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsuite {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  kInvalidInput,
  kConfiguration,
  kDomain,
  kDegenerate,
  kSingular,
  kBoundViolation,
  kToleranceTooTight,
  kTargetEvaluation,
  kInitialization,
  kKernelInconsistent,
  kMapValidity,
  kUnsupported,
  kStability,
  kIntegration,
  kSliceGeometry,
  kInconsistentConditionals,
  kMonotonicity,
  kIo,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Counter-based stream (Philox4x32-10). The key is the seed; the upper half
// of the 128-bit counter is the stream id, the lower half counts uniforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  // Strictly inside (0,1); advances the counter by one.
  double uniform();
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Child stream with an id derived from (stream_id, child).
  RngStream split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::uint64_t block_[2] = {0, 0};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

double rng_uniform(RngStream& stream);
// mean + L z with z standard normal.
Vec rng_gaussian(RngStream& stream, const Vec& mean, const Mat& cov_factor);
Vec standard_normal_vector(RngStream& stream, int dim);

struct TargetDensity {
  int dim = 1;
  std::function<double(const Vec&)> log_density;
  std::function<Vec(const Vec&)> grad_log_density;
  std::function<bool(const Vec&)> support_indicator;

  double log_prob(const Vec& x) const;
  Vec grad(const Vec& x) const;
  bool has_gradient() const { return static_cast<bool>(grad_log_density); }
  bool in_support(const Vec& x) const {
    return !support_indicator || support_indicator(x);
  }
};

// A density that can also be sampled; used for proposals and priors.
struct SampleableDensity {
  TargetDensity density;
  std::function<Vec(RngStream&)> sample;
};

// Lower Cholesky factor with jitter escalation on failure.
Mat cholesky_lower(const Mat& a, const char* what = "matrix");
// Symmetric square-root factor that tolerates semidefinite input.
Mat psd_factor(const Mat& a);

class GaussianTarget {
 public:
  GaussianTarget(Vec mean, Mat precision);
  static GaussianTarget from_covariance(Vec mean, const Mat& covariance);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vec& mean() const { return mean_; }
  const Mat& precision() const { return precision_; }
  const Mat& covariance() const { return covariance_; }
  const Mat& lower() const { return h_lower_; }
  const Mat& diag() const { return h_diag_; }
  const Mat& upper() const { return h_upper_; }
  const Mat& covariance_factor() const { return cov_factor_; }
  double log_det_precision() const { return log_det_h_; }

  double log_density(const Vec& x) const;
  Vec grad_log_density(const Vec& x) const;
  Vec sample(RngStream& stream) const;
  TargetDensity as_target() const;
  SampleableDensity as_sampleable() const;

 private:
  Vec mean_;
  Mat precision_;
  Mat covariance_;
  Mat h_lower_, h_diag_, h_upper_;
  Mat cov_factor_;
  double log_det_h_ = 0.0;
};

double gaussian_log_density(const GaussianTarget& target, const Vec& x);

struct ChainTrace {
  Mat states;
  std::vector<char> accepted;
  Vec log_density_values;
  std::string sampler;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  ChainTrace() = default;
  ChainTrace(long n, int dim);
  long size() const { return static_cast<long>(states.rows()); }
  void record(long i, const Vec& x, bool acc, double logf);
  double acceptance_rate() const;
  Vec column(int j) const { return states.col(j); }
};

struct WeightedEnsemble {
  Mat particles;
  Vec log_weights;

  Vec normalized_weights() const;
};

double log_sum_exp(const Vec& v);
// Normalized weights from log-weights; throws kDegenerate if all are -inf.
Vec normalize_log_weights(const Vec& log_weights);
double ess(const WeightedEnsemble& ensemble);
double ess_from_log_weights(const Vec& log_weights);

double normal_cdf(double x);
double normal_quantile(double p);

// Runs fn(i) for i in [0, n) on up to thread_count() workers.
void parallel_for(long n, const std::function<void(long)>& fn);
int thread_count();
void set_thread_count(int n);

}  // namespace mcsuite
