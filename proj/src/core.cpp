#include "mcsuite/core.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace mcsuite {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kSingular: return "singular matrix";
    case ErrorKind::kBoundViolation: return "bound violation";
    case ErrorKind::kToleranceTooTight: return "tolerance too tight";
    case ErrorKind::kTargetEvaluation: return "target evaluation error";
    case ErrorKind::kInitialization: return "initialization error";
    case ErrorKind::kKernelInconsistent: return "inconsistent kernel";
    case ErrorKind::kMapValidity: return "map validity error";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kStability: return "stability error";
    case ErrorKind::kIntegration: return "integration error";
    case ErrorKind::kSliceGeometry: return "slice geometry error";
    case ErrorKind::kInconsistentConditionals: return "inconsistent conditionals";
    case ErrorKind::kMonotonicity: return "monotonicity violation";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

void philox4x32_10(std::uint32_t ctr[4], std::uint32_t key0, std::uint32_t key1) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t c1 = ctr[1], c3 = ctr[3];
    ctr[0] = hi1 ^ c1 ^ key0;
    ctr[1] = lo1;
    ctr[2] = hi0 ^ c3 ^ key1;
    ctr[3] = lo0;
    key0 += kPhiloxW0;
    key1 += kPhiloxW1;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

double RngStream::uniform() {
  const std::uint64_t block = counter_ >> 1;
  const int lane = static_cast<int>(counter_ & 1u);
  if (lane == 0) {
    std::uint32_t ctr[4] = {static_cast<std::uint32_t>(block),
                            static_cast<std::uint32_t>(block >> 32),
                            static_cast<std::uint32_t>(stream_id_),
                            static_cast<std::uint32_t>(stream_id_ >> 32)};
    philox4x32_10(ctr, static_cast<std::uint32_t>(seed_),
                  static_cast<std::uint32_t>(seed_ >> 32));
    block_[0] = (static_cast<std::uint64_t>(ctr[0]) << 32) | ctr[1];
    block_[1] = (static_cast<std::uint64_t>(ctr[2]) << 32) | ctr[3];
  }
  ++counter_;
  const std::uint64_t bits = block_[lane] >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidInput, "below(0)");
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

RngStream RngStream::split(std::uint64_t child) const {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(child + 1)));
}

double rng_uniform(RngStream& stream) { return stream.uniform(); }

Vec standard_normal_vector(RngStream& stream, int dim) {
  Vec z(dim);
  for (int i = 0; i < dim; ++i) z(i) = stream.normal();
  return z;
}

Vec rng_gaussian(RngStream& stream, const Vec& mean, const Mat& cov_factor) {
  if (cov_factor.rows() != mean.size() || cov_factor.cols() != mean.size()) {
    throw Error(ErrorKind::kInvalidInput, "rng_gaussian: dimension mismatch");
  }
  const Vec z = standard_normal_vector(stream, static_cast<int>(mean.size()));
  return mean + cov_factor.triangularView<Eigen::Lower>() * z;
}

double TargetDensity::log_prob(const Vec& x) const {
  if (!in_support(x)) return kNegInf;
  return log_density(x);
}

Vec TargetDensity::grad(const Vec& x) const {
  if (!grad_log_density) {
    throw Error(ErrorKind::kUnsupported, "target has no gradient");
  }
  return grad_log_density(x);
}

Mat cholesky_lower(const Mat& a, const char* what) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double d = static_cast<double>(a.rows());
  double jitter = 1e-12 * std::abs(a.trace()) / d;
  if (!(jitter > 0.0)) jitter = 1e-12;
  for (int retry = 0; retry < 3; ++retry) {
    Mat b = a;
    b.diagonal().array() += jitter;
    llt.compute(b);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter *= 10.0;
  }
  throw Error(ErrorKind::kSingular,
              std::string("Cholesky factorization failed for ") + what);
}

Mat psd_factor(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

GaussianTarget::GaussianTarget(Vec mean, Mat precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  const long d = mean_.size();
  if (precision_.rows() != d || precision_.cols() != d) {
    throw Error(ErrorKind::kInvalidInput, "GaussianTarget: dimension mismatch");
  }
  if ((precision_ - precision_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + precision_.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::kInvalidInput, "GaussianTarget: precision not symmetric");
  }
  const Mat l = cholesky_lower(precision_, "precision");
  log_det_h_ = 2.0 * l.diagonal().array().log().sum();
  covariance_ = l.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
  covariance_ = l.transpose().triangularView<Eigen::Upper>().solve(covariance_);
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
  cov_factor_ = cholesky_lower(covariance_, "covariance");
  h_lower_ = precision_.triangularView<Eigen::StrictlyLower>();
  h_upper_ = precision_.triangularView<Eigen::StrictlyUpper>();
  h_diag_ = precision_.diagonal().asDiagonal();
}

GaussianTarget GaussianTarget::from_covariance(Vec mean, const Mat& covariance) {
  const long d = covariance.rows();
  const Mat l = cholesky_lower(covariance, "covariance");
  Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
  Mat h = linv.transpose() * linv;
  h = 0.5 * (h + h.transpose());
  return GaussianTarget(std::move(mean), h);
}

double GaussianTarget::log_density(const Vec& x) const {
  const Vec r = x - mean_;
  return -0.5 * r.dot(precision_ * r) + 0.5 * log_det_h_ -
         0.5 * static_cast<double>(dim()) * std::log(2.0 * M_PI);
}

Vec GaussianTarget::grad_log_density(const Vec& x) const {
  return -(precision_ * (x - mean_));
}

Vec GaussianTarget::sample(RngStream& stream) const {
  return rng_gaussian(stream, mean_, cov_factor_);
}

TargetDensity GaussianTarget::as_target() const {
  GaussianTarget self = *this;
  TargetDensity t;
  t.dim = dim();
  t.log_density = [self](const Vec& x) { return self.log_density(x); };
  t.grad_log_density = [self](const Vec& x) { return self.grad_log_density(x); };
  return t;
}

SampleableDensity GaussianTarget::as_sampleable() const {
  GaussianTarget self = *this;
  return {as_target(), [self](RngStream& s) { return self.sample(s); }};
}

double gaussian_log_density(const GaussianTarget& target, const Vec& x) {
  return target.log_density(x);
}

ChainTrace::ChainTrace(long n, int dim)
    : states(n, dim), accepted(n, 0), log_density_values(n) {}

void ChainTrace::record(long i, const Vec& x, bool acc, double logf) {
  states.row(i) = x.transpose();
  accepted[i] = acc ? 1 : 0;
  log_density_values(i) = logf;
}

double ChainTrace::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  long count = 0;
  for (char a : accepted) count += a;
  return static_cast<double>(count) / static_cast<double>(accepted.size());
}

double log_sum_exp(const Vec& v) {
  if (v.size() == 0) return kNegInf;
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Vec normalize_log_weights(const Vec& log_weights) {
  for (long i = 0; i < log_weights.size(); ++i) {
    if (std::isnan(log_weights(i))) {
      throw Error(ErrorKind::kDegenerate, "NaN log-weight");
    }
  }
  const double m = log_weights.size() ? log_weights.maxCoeff() : kNegInf;
  if (!std::isfinite(m)) {
    throw Error(ErrorKind::kDegenerate, "all weights are zero");
  }
  Vec w = (log_weights.array() - m).exp();
  return w / w.sum();
}

Vec WeightedEnsemble::normalized_weights() const {
  return normalize_log_weights(log_weights);
}

double ess_from_log_weights(const Vec& log_weights) {
  const Vec w = normalize_log_weights(log_weights);
  const double n = static_cast<double>(w.size());
  return std::clamp(1.0 / w.squaredNorm(), 1.0, n);
}

double ess(const WeightedEnsemble& ensemble) {
  return ess_from_log_weights(ensemble.log_weights);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::kDomain, "normal_quantile: p outside (0,1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

namespace {
std::atomic<int> g_thread_override{0};
}

int thread_count() {
  if (g_thread_override > 0) return g_thread_override;
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("MCSUITE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

void set_thread_count(int n) { g_thread_override = n; }

void parallel_for(long n, const std::function<void(long)>& fn) {
  const int workers = static_cast<int>(std::min<long>(thread_count(), n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mcsuite
