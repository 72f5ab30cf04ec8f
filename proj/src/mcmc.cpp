#include "mcsuite/mcmc.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>

namespace mcsuite {

MhStep mh_step(const LogDensityFn& log_f, const ProposalKernel& kernel,
               const Vec& x, double log_fx, RngStream& stream, long iteration) {
  Vec z = kernel.propose(x, stream);
  const double log_fz = log_f(z);
  if (std::isnan(log_fz)) {
    throw Error(ErrorKind::kTargetEvaluation,
                "target log-density is NaN at iteration " + std::to_string(iteration));
  }
  double log_ratio = log_fz - log_fx;
  if (!kernel.symmetric) {
    const double fwd = kernel.log_q(x, z);
    if (!std::isfinite(fwd)) {
      throw Error(ErrorKind::kKernelInconsistent,
                  "proposal density is not finite at its own draw (iteration " +
                      std::to_string(iteration) + ")");
    }
    log_ratio += kernel.log_q(z, x) - fwd;
  }
  if (log_fz == kNegInf) log_ratio = kNegInf;
  const double log_u = std::log(stream.uniform());
  if (log_u < log_ratio) return {std::move(z), log_fz, true};
  return {x, log_fx, false};
}

ChainTrace mh_run(const TargetDensity& target, const ProposalKernel& kernel,
                  const Vec& init, long n, RngStream& stream) {
  double log_fx = target.log_prob(init);
  if (!(log_fx > kNegInf) || std::isnan(log_fx)) {
    throw Error(ErrorKind::kInitialization, "mh_run: initial state has zero density");
  }
  const LogDensityFn log_f = [&target](const Vec& v) { return target.log_prob(v); };
  ChainTrace trace(n, static_cast<int>(init.size()));
  trace.sampler = kernel.symmetric ? "mh-symmetric" : "mh";
  trace.seed = stream.seed();
  Vec x = init;
  for (long i = 0; i < n; ++i) {
    MhStep s = mh_step(log_f, kernel, x, log_fx, stream, i);
    x = std::move(s.state);
    log_fx = s.log_density;
    trace.record(i, x, s.accepted, log_fx);
  }
  return trace;
}

ChainTrace mh_run(const TargetDensity& target, const ProposalKernel& kernel,
                  const std::function<Vec(RngStream&)>& init, long n,
                  RngStream& stream) {
  const Vec x0 = init(stream);
  return mh_run(target, kernel, x0, n, stream);
}

ProposalKernel independence_kernel(const SampleableDensity& g) {
  ProposalKernel k;
  k.propose = [g](const Vec&, RngStream& s) { return g.sample(s); };
  k.log_q = [g](const Vec&, const Vec& to) { return g.density.log_prob(to); };
  k.symmetric = false;
  return k;
}

ProposalKernel rwmh_kernel(const std::function<Vec(RngStream&)>& step,
                           const std::function<double(const Vec&)>& step_log_density,
                           bool symmetric) {
  if (!symmetric && !step_log_density) {
    throw Error(ErrorKind::kInvalidInput,
                "rwmh_kernel: asymmetric step needs its log-density");
  }
  ProposalKernel k;
  k.propose = [step](const Vec& x, RngStream& s) -> Vec { return x + step(s); };
  if (!symmetric) {
    k.log_q = [step_log_density](const Vec& from, const Vec& to) {
      return step_log_density(to - from);
    };
  }
  k.symmetric = symmetric;
  return k;
}

ProposalKernel gaussian_rwmh_kernel(double sd) {
  ProposalKernel k;
  k.propose = [sd](const Vec& x, RngStream& s) -> Vec {
    Vec z = x;
    for (long i = 0; i < z.size(); ++i) z(i) += sd * s.normal();
    return z;
  };
  k.symmetric = true;
  return k;
}

Mat exact_mh_kernel(const Vec& f, const Mat& q) {
  const long s = f.size();
  Mat p = Mat::Zero(s, s);
  for (long i = 0; i < s; ++i) {
    double off = 0.0;
    for (long j = 0; j < s; ++j) {
      if (j == i || q(i, j) == 0.0) continue;
      const double a = std::min(1.0, f(j) * q(j, i) / (f(i) * q(i, j)));
      p(i, j) = q(i, j) * a;
      off += p(i, j);
    }
    p(i, i) = 1.0 - off;
  }
  return p;
}

Vec autocovariance(const Vec& series, long max_lag) {
  const long n = series.size();
  max_lag = std::min(max_lag, n - 1);
  long m = 1;
  while (m < 2 * n) m <<= 1;
  const double mean = series.mean();
  std::vector<double> buf(m, 0.0);
  for (long i = 0; i < n; ++i) buf[i] = series(i) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, buf);
  for (auto& c : spec) c = std::norm(c);
  std::vector<double> r;
  fft.inv(r, spec);
  Vec gamma(max_lag + 1);
  for (long k = 0; k <= max_lag; ++k) gamma(k) = r[k] / static_cast<double>(n);
  return gamma;
}

AcfResult autocorrelation(const Vec& series, long max_lag) {
  const long n = series.size();
  if (!(max_lag >= 1 && n > max_lag)) {
    throw Error(ErrorKind::kInvalidInput, "autocorrelation: need N > max_lag >= 1");
  }
  const Vec gamma = autocovariance(series, max_lag);
  if (!(gamma(0) > 0.0)) {
    throw Error(ErrorKind::kDegenerate, "autocorrelation: zero-variance series");
  }
  AcfResult res;
  res.acf = gamma / gamma(0);
  res.iat = 1.0;
  res.truncation_lag = static_cast<int>(max_lag);
  for (long k = 1; k <= max_lag; ++k) {
    res.iat += 2.0 * res.acf(k);
    if (res.acf(k) < 0.05) {
      res.truncation_lag = static_cast<int>(k);
      break;
    }
  }
  return res;
}

Vec apply_h(const ChainTrace& trace, const std::function<double(const Vec&)>& h) {
  Vec v(trace.size());
  for (long i = 0; i < trace.size(); ++i) v(i) = h(trace.states.row(i).transpose());
  return v;
}

AcfResult autocorrelation(const ChainTrace& trace,
                          const std::function<double(const Vec&)>& h, long max_lag) {
  return autocorrelation(apply_h(trace, h), max_lag);
}

double bartlett_long_run_variance(const Vec& series) {
  const long n = series.size();
  const long w = std::min<long>(n - 1, static_cast<long>(std::floor(4.0 * std::sqrt(n))));
  const Vec gamma = autocovariance(series, w);
  double s = gamma(0);
  for (long k = 1; k <= w; ++k) {
    s += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(w + 1)) * gamma(k);
  }
  return s;
}

double geweke(const Vec& series, double frac_a, double frac_b, long burn_in) {
  const long n = series.size();
  const long na = static_cast<long>(std::floor(frac_a * n));
  const long nb = static_cast<long>(std::floor(frac_b * n));
  if (na < 2 || nb < 2 || !(burn_in + na < n - nb)) {
    throw Error(ErrorKind::kInvalidInput, "geweke: windows overlap or are empty");
  }
  const Vec a = series.segment(burn_in, na);
  const Vec b = series.tail(nb);
  const double sa = bartlett_long_run_variance(a);
  const double sb = bartlett_long_run_variance(b);
  if (!(sa > 0.0) || !(sb > 0.0)) {
    throw Error(ErrorKind::kDegenerate, "geweke: zero-variance window");
  }
  return (a.mean() - b.mean()) /
         std::sqrt(sa / static_cast<double>(na) + sb / static_cast<double>(nb));
}

double geweke(const ChainTrace& trace, const std::function<double(const Vec&)>& h,
              double frac_a, double frac_b, long burn_in) {
  return geweke(apply_h(trace, h), frac_a, frac_b, burn_in);
}

GelmanRubin gelman_rubin(const std::vector<Vec>& chains) {
  const long j = static_cast<long>(chains.size());
  if (j < 2) throw Error(ErrorKind::kInvalidInput, "gelman_rubin: need J >= 2 chains");
  const long len = chains.front().size();
  if (len < 4 || len % 2 != 0) {
    throw Error(ErrorKind::kInvalidInput, "gelman_rubin: chain length must be even 2N");
  }
  const long n = len / 2;
  Vec means(j);
  double w = 0.0;
  for (long c = 0; c < j; ++c) {
    if (chains[c].size() != len) {
      throw Error(ErrorKind::kInvalidInput, "gelman_rubin: unequal chain lengths");
    }
    const Vec kept = chains[c].tail(n);
    means(c) = kept.mean();
    const double s2 = (kept.array() - means(c)).square().sum() / static_cast<double>(n - 1);
    if (!(s2 > 0.0)) throw Error(ErrorKind::kDegenerate, "gelman_rubin: constant chain");
    w += s2;
  }
  w /= static_cast<double>(j);
  const double grand = means.mean();
  GelmanRubin out;
  out.b = (means.array() - grand).square().sum() / static_cast<double>(j - 1);
  out.w = w;
  out.v = (static_cast<double>(n - 1) / n) * w + out.b;
  out.r = std::sqrt(out.v / out.w);
  return out;
}

GelmanRubin gelman_rubin(const std::vector<ChainTrace>& traces,
                         const std::function<double(const Vec&)>& h) {
  std::vector<Vec> series;
  series.reserve(traces.size());
  for (const auto& t : traces) series.push_back(apply_h(t, h));
  return gelman_rubin(series);
}

}  // namespace mcsuite
