#include "mcsuite/langevin.hpp"

#include "mcsuite/mcmc.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace mcsuite {

void LangevinConfig::validate() const {
  if (n < 0) throw Error(ErrorKind::kInvalidInput, "langevin: N must be non-negative");
  if (schedule == StepSchedule::kConstant) {
    if (!(step > 0.0)) throw Error(ErrorKind::kInvalidInput, "langevin: step must be > 0");
  } else {
    if (!(c > 0.0)) throw Error(ErrorKind::kInvalidInput, "langevin: schedule c must be > 0");
    if (!(gamma > 0.5 && gamma <= 1.0)) {
      throw Error(ErrorKind::kInvalidInput, "langevin: schedule gamma must lie in (0.5, 1]");
    }
  }
}

double LangevinConfig::step_at(long k) const {
  if (schedule == StepSchedule::kConstant) return step;
  return c * std::pow(static_cast<double>(k), -gamma);
}

namespace {

double log_density_or_nan(const TargetDensity& t, const Vec& x) {
  return t.log_density ? t.log_prob(x) : std::nan("");
}

Vec checked_gradient(const std::function<Vec(const Vec&)>& g, const Vec& x, long it) {
  Vec v = g(x);
  if (!v.allFinite()) {
    throw Error(ErrorKind::kTargetEvaluation,
                "langevin: non-finite gradient at iteration " + std::to_string(it));
  }
  return v;
}

}  // namespace

ChainTrace ula_run(const TargetDensity& target, const LangevinConfig& config,
                   const Vec& init, RngStream& stream, Mat* noise) {
  config.validate();
  if (!target.has_gradient()) {
    throw Error(ErrorKind::kInvalidInput, "ula_run: target has no gradient");
  }
  const int d = static_cast<int>(init.size());
  if (noise) noise->resize(config.n, d);
  ChainTrace trace(config.n, d);
  trace.sampler = "ula";
  trace.seed = stream.seed();
  Vec x = init;
  const auto grad = [&target](const Vec& v) { return target.grad(v); };
  for (long i = 0; i < config.n; ++i) {
    const double eps = config.step_at(i + 1);
    const Vec g = checked_gradient(grad, x, i);
    const Vec xi = standard_normal_vector(stream, d);
    x = x + eps * g + std::sqrt(2.0 * eps) * xi;
    if (noise) noise->row(i) = xi.transpose();
    trace.record(i, x, true, log_density_or_nan(target, x));
  }
  return trace;
}

GaussianMoments ula_gaussian_moments(const GaussianTarget& target, const Vec& mu0,
                                     double sigma0sq, double eps, long n) {
  Eigen::SelfAdjointEigenSolver<Mat> es(target.precision());
  const Vec lam = es.eigenvalues();
  const Mat& q = es.eigenvectors();
  const double lmax = lam.maxCoeff();
  if (!(eps > 0.0) || !(eps < 2.0 / lmax)) {
    throw Error(ErrorKind::kStability,
                "ula_gaussian_moments: step must satisfy 0 < eps < 2/lambda_max(H) = " +
                    std::to_string(2.0 / lmax));
  }
  const int d = target.dim();
  Vec mean_fac(d), var(d);
  for (int i = 0; i < d; ++i) {
    const double a = 1.0 - eps * lam(i);
    const double r = a * a;
    const double rn = std::pow(r, static_cast<double>(n));
    mean_fac(i) = std::pow(a, static_cast<double>(n));
    // s_{k+1} = r s_k + 2 eps, s_0 = sigma0sq
    var(i) = rn * sigma0sq + (r == 1.0 ? 2.0 * eps * n : 2.0 * eps * (1.0 - rn) / (1.0 - r));
  }
  GaussianMoments m;
  m.mean = target.mean() + q * mean_fac.asDiagonal() * q.transpose() * (mu0 - target.mean());
  m.cov = q * var.asDiagonal() * q.transpose();
  return m;
}

Mat ula_limit_covariance(const GaussianTarget& target, double eps) {
  const Mat& h = target.precision();
  const Mat a = h - 0.5 * eps * h * h;
  return a.llt().solve(Mat::Identity(h.rows(), h.cols()));
}

namespace {

Mat sym_sqrt(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.transpose()));
  const Vec r = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * r.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double gaussian_w2_commuting(const Vec& m1, const Mat& s1, const Vec& m2, const Mat& s2) {
  const Mat comm = s1 * s2 - s2 * s1;
  const double scale = 1.0 + s1.norm() * s2.norm();
  if (comm.norm() > 1e-10 * scale) {
    throw Error(ErrorKind::kUnsupported,
                "gaussian_w2_commuting: covariances do not commute");
  }
  const double w2sq = (m1 - m2).squaredNorm() + (sym_sqrt(s1) - sym_sqrt(s2)).squaredNorm();
  return std::sqrt(w2sq);
}

ChainTrace mala_run(const TargetDensity& target, const LangevinConfig& config,
                    const Vec& init, RngStream& stream) {
  config.validate();
  if (!target.has_gradient()) {
    throw Error(ErrorKind::kInvalidInput, "mala_run: target has no gradient");
  }
  double log_fx = target.log_prob(init);
  if (!(log_fx > kNegInf) || std::isnan(log_fx)) {
    throw Error(ErrorKind::kInitialization, "mala_run: initial state has zero density");
  }
  const int d = static_cast<int>(init.size());
  ChainTrace trace(config.n, d);
  trace.sampler = "mala";
  trace.seed = stream.seed();
  const LogDensityFn log_f = [&target](const Vec& v) { return target.log_prob(v); };
  Vec x = init;
  for (long i = 0; i < config.n; ++i) {
    const double eps = config.step_at(i + 1);
    const auto drift = [&](const Vec& v) -> Vec {
      return v + eps * checked_gradient([&](const Vec& y) { return target.grad(y); }, v, i);
    };
    ProposalKernel k;
    k.symmetric = false;
    k.propose = [&](const Vec& from, RngStream& s) -> Vec {
      return drift(from) + std::sqrt(2.0 * eps) * standard_normal_vector(s, d);
    };
    k.log_q = [&](const Vec& from, const Vec& to) {
      return -(to - drift(from)).squaredNorm() / (4.0 * eps);
    };
    MhStep s = mh_step(log_f, k, x, log_fx, stream, i);
    x = std::move(s.state);
    log_fx = s.log_density;
    trace.record(i, x, s.accepted, log_fx);
  }
  return trace;
}

Vec sgld_full_gradient(const SgldModel& model, const Vec& theta) {
  Vec g = Vec::Zero(theta.size());
  for (long i = 0; i < model.data_size; ++i) g += model.grad_log_lik(theta, i);
  return g;
}

Vec sgld_minibatch_gradient(const SgldModel& model, const Vec& theta, long k,
                            RngStream& stream) {
  const long big_k = model.data_size;
  if (k < 1 || k > big_k) {
    throw Error(ErrorKind::kInvalidInput, "sgld: minibatch size must satisfy 1 <= k <= K");
  }
  // Partial Fisher-Yates: the first k entries are a uniform subset.
  std::vector<long> idx(big_k);
  std::iota(idx.begin(), idx.end(), 0L);
  Vec g = Vec::Zero(theta.size());
  for (long j = 0; j < k; ++j) {
    const long r = j + static_cast<long>(stream.below(static_cast<std::uint64_t>(big_k - j)));
    std::swap(idx[j], idx[r]);
    g += model.grad_log_lik(theta, idx[j]);
  }
  return g * (static_cast<double>(big_k) / static_cast<double>(k));
}

ChainTrace sgld_run(const SgldModel& model, long k, const LangevinConfig& config,
                    const Vec& init, RngStream& stream) {
  config.validate();
  if (k < 1 || k > model.data_size) {
    throw Error(ErrorKind::kInvalidInput, "sgld: minibatch size must satisfy 1 <= k <= K");
  }
  const int d = static_cast<int>(init.size());
  ChainTrace trace(config.n, d);
  trace.sampler = "sgld";
  trace.seed = stream.seed();
  Vec x = init;
  for (long i = 0; i < config.n; ++i) {
    const double eps = config.step_at(i + 1);
    Vec g = model.grad_log_prior(x) + sgld_minibatch_gradient(model, x, k, stream);
    if (!g.allFinite()) {
      throw Error(ErrorKind::kTargetEvaluation,
                  "sgld: non-finite gradient at iteration " + std::to_string(i));
    }
    x = x + eps * g + std::sqrt(2.0 * eps) * standard_normal_vector(stream, d);
    trace.record(i, x, true, std::nan(""));
  }
  return trace;
}

}  // namespace mcsuite
