#include "mcsuite/smc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mcsuite {

void HmmModel::validate() const {
  if (d < 1 || k < 1) throw Error(ErrorKind::kInvalidInput, "hmm: dimensions must be >= 1");
  if (!a || !b || !f0) throw Error(ErrorKind::kInvalidInput, "hmm: a, b and f0 are required");
  if (sigma.rows() != d || sigma.cols() != d || gamma.rows() != k || gamma.cols() != k) {
    throw Error(ErrorKind::kInvalidInput, "hmm: noise covariance dimensions");
  }
  if (h && (h->rows() != k || h->cols() != d)) {
    throw Error(ErrorKind::kInvalidInput, "hmm: H must be k x d");
  }
}

HmmModel linear_gaussian_model(const Mat& a, const Mat& h, const Mat& sigma,
                               const Mat& gamma, const Vec& m0, const Mat& p0) {
  HmmModel m;
  m.d = static_cast<int>(a.rows());
  m.k = static_cast<int>(h.rows());
  m.a = [a](const Vec& x) -> Vec { return a * x; };
  m.b = [h](const Vec& x) -> Vec { return h * x; };
  m.a_matrix = a;
  m.h = h;
  m.sigma = sigma;
  m.gamma = gamma;
  m.m0 = m0;
  m.p0 = p0;
  const Mat l0 = cholesky_lower(p0, "P0");
  m.f0 = [m0, l0](RngStream& s) { return rng_gaussian(s, m0, l0); };
  m.validate();
  return m;
}

HmmPath simulate_hmm(const HmmModel& model, long j, RngStream& stream) {
  model.validate();
  if (j < 1) throw Error(ErrorKind::kInvalidInput, "simulate_hmm: J must be >= 1");
  const Mat ls = cholesky_lower(model.sigma, "Sigma");
  const Mat lg = cholesky_lower(model.gamma, "Gamma");
  HmmPath path;
  path.x.resize(j + 1, model.d);
  path.y.resize(j, model.k);
  Vec x = model.f0(stream);
  path.x.row(0) = x.transpose();
  for (long t = 1; t <= j; ++t) {
    x = rng_gaussian(stream, model.a(x), ls);
    path.x.row(t) = x.transpose();
    path.y.row(t - 1) = rng_gaussian(stream, model.b(x), lg).transpose();
  }
  return path;
}

std::vector<long> resample_indices(const Vec& weights, long n, ResampleScheme scheme,
                                   RngStream& stream) {
  const long m = weights.size();
  std::vector<double> cdf(m);
  double acc = 0.0;
  for (long i = 0; i < m; ++i) {
    acc += weights(i);
    cdf[i] = acc;
  }
  std::vector<long> idx(n);
  const auto locate = [&](double u) {
    const double target = u * acc;
    long k = std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin();
    return std::min(k, m - 1);
  };
  if (scheme == ResampleScheme::kMultinomial) {
    for (long i = 0; i < n; ++i) idx[i] = locate(stream.uniform());
  } else {
    const double u0 = stream.uniform();
    for (long i = 0; i < n; ++i) idx[i] = locate((u0 + static_cast<double>(i)) / n);
  }
  return idx;
}

Mat resample(const WeightedEnsemble& ensemble, ResampleScheme scheme, RngStream& stream) {
  const Vec w = ensemble.normalized_weights();
  const long n = ensemble.particles.rows();
  const std::vector<long> idx = resample_indices(w, n, scheme, stream);
  Mat out(n, ensemble.particles.cols());
  for (long i = 0; i < n; ++i) out.row(i) = ensemble.particles.row(idx[i]);
  return out;
}

namespace {

double mahalanobis_log_weight(const Mat& chol, const Vec& resid) {
  const Vec r = chol.triangularView<Eigen::Lower>().solve(resid);
  return -0.5 * r.squaredNorm();
}

void record_step(FilterOutput& out, const WeightedEnsemble& ens, long step) {
  Vec w;
  try {
    w = normalize_log_weights(ens.log_weights);
  } catch (const Error&) {
    throw Error(ErrorKind::kDegenerate,
                "particle filter: all weights vanish at step " + std::to_string(step));
  }
  const Vec mean = ens.particles.transpose() * w;
  const Mat c = ens.particles.rowwise() - mean.transpose();
  out.weighted.push_back(ens);
  out.ess.push_back(std::clamp(1.0 / w.squaredNorm(), 1.0,
                               static_cast<double>(ens.particles.rows())));
  out.means.push_back(mean);
  out.covs.push_back(c.transpose() * w.asDiagonal() * c);
}

Mat initial_particles(const HmmModel& model, long n, const RngStream& base) {
  Mat x(n, model.d);
  parallel_for(n, [&](long i) {
    RngStream s = base.split(static_cast<std::uint64_t>(i) + 1);
    x.row(i) = model.f0(s).transpose();
  });
  return x;
}

// Either resamples (returning equal weights) or keeps the weights when the
// ESS trigger is enabled and not hit.
void maybe_resample(const WeightedEnsemble& ens, double ess, const PfOptions& opt,
                    RngStream& rs, Mat& particles, Vec& log_w) {
  const long n = ens.particles.rows();
  if (opt.ess_triggered && ess >= opt.ess_threshold * static_cast<double>(n)) {
    particles = ens.particles;
    log_w = ens.log_weights;
    return;
  }
  particles = resample(ens, opt.scheme, rs);
  log_w = Vec::Zero(n);
}

}  // namespace

FilterOutput bootstrap_pf(const HmmModel& model, const Mat& y, long n,
                          const RngStream& stream, const PfOptions& options) {
  model.validate();
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "bootstrap_pf: N must be >= 1");
  const Mat ls = cholesky_lower(model.sigma, "Sigma");
  const Mat lg = cholesky_lower(model.gamma, "Gamma");
  const long big_j = y.rows();
  FilterOutput out;
  RngStream s0 = stream.split(0);
  WeightedEnsemble prev{initial_particles(model, n, s0), Vec::Zero(n)};
  double prev_ess = static_cast<double>(n);
  for (long j = 1; j <= big_j; ++j) {
    RngStream sj = stream.split(static_cast<std::uint64_t>(j));
    RngStream rs = sj.split(0);
    Mat x;
    Vec lw;
    maybe_resample(prev, prev_ess, options, rs, x, lw);
    if (j > 1) out.resampled.push_back(x);
    const Vec yj = y.row(j - 1).transpose();
    WeightedEnsemble cur{Mat(n, model.d), Vec(n)};
    parallel_for(n, [&](long i) {
      RngStream ps = sj.split(static_cast<std::uint64_t>(i) + 1);
      const Vec xi = rng_gaussian(ps, model.a(x.row(i).transpose()), ls);
      cur.particles.row(i) = xi.transpose();
      cur.log_weights(i) = lw(i) + mahalanobis_log_weight(lg, yj - model.b(xi));
    });
    record_step(out, cur, j);
    prev = std::move(cur);
    prev_ess = out.ess.back();
  }
  if (big_j > 0) {
    RngStream rs = stream.split(static_cast<std::uint64_t>(big_j) + 1).split(0);
    out.resampled.push_back(resample(prev, options.scheme, rs));
  }
  return out;
}

FilterOutput optimal_pf(const HmmModel& model, const Mat& y, long n,
                        const RngStream& stream, const PfOptions& options) {
  model.validate();
  if (!model.h) {
    throw Error(ErrorKind::kUnsupported, "optimal_pf: observation map must be linear");
  }
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "optimal_pf: N must be >= 1");
  const Mat& h = *model.h;
  const Mat s = h * model.sigma * h.transpose() + model.gamma;
  Mat ls;
  try {
    ls = cholesky_lower(s, "S");
  } catch (const Error&) {
    throw Error(ErrorKind::kDegenerate, "optimal_pf: S = H Sigma H^T + Gamma is singular");
  }
  // K = Sigma H^T S^-1, computed as (S^-1 H Sigma)^T.
  const Mat kg = ls.transpose()
                     .triangularView<Eigen::Upper>()
                     .solve(ls.triangularView<Eigen::Lower>().solve(h * model.sigma))
                     .transpose();
  const Mat ikh = Mat::Identity(model.d, model.d) - kg * h;
  Mat c = ikh * model.sigma;
  c = 0.5 * (c + c.transpose());
  const Mat lc = psd_factor(c);

  const long big_j = y.rows();
  FilterOutput out;
  Mat x = initial_particles(model, n, stream.split(0));
  Vec lw = Vec::Zero(n);
  for (long j = 1; j <= big_j; ++j) {
    RngStream sj = stream.split(static_cast<std::uint64_t>(j));
    const Vec yj = y.row(j - 1).transpose();
    const Vec ky = kg * yj;
    WeightedEnsemble cur{Mat(n, model.d), Vec(n)};
    parallel_for(n, [&](long i) {
      RngStream ps = sj.split(static_cast<std::uint64_t>(i) + 1);
      const Vec ax = model.a(x.row(i).transpose());
      cur.log_weights(i) = lw(i) + mahalanobis_log_weight(ls, yj - h * ax);
      cur.particles.row(i) = rng_gaussian(ps, ikh * ax + ky, lc).transpose();
    });
    record_step(out, cur, j);
    RngStream rs = sj.split(0);
    maybe_resample(cur, out.ess.back(), options, rs, x, lw);
    out.resampled.push_back(x);
  }
  return out;
}

KalmanOutput kalman_filter(const HmmModel& model, const Mat& y) {
  if (!model.a_matrix || !model.h || !model.m0 || !model.p0) {
    throw Error(ErrorKind::kUnsupported, "kalman_filter: model must be linear-Gaussian");
  }
  const Mat& a = *model.a_matrix;
  const Mat& h = *model.h;
  const long d = model.d;
  Vec m = *model.m0;
  Mat p = *model.p0;
  KalmanOutput out;
  for (long j = 0; j < y.rows(); ++j) {
    const Vec mp = a * m;
    const Mat pp = a * p * a.transpose() + model.sigma;
    const Mat s = h * pp * h.transpose() + model.gamma;
    const Mat kg = s.llt().solve(h * pp).transpose();
    m = mp + kg * (y.row(j).transpose() - h * mp);
    const Mat ikh = Mat::Identity(d, d) - kg * h;
    // Joseph form keeps P symmetric positive semidefinite.
    p = ikh * pp * ikh.transpose() + kg * model.gamma * kg.transpose();
    out.means.push_back(m);
    out.covs.push_back(p);
  }
  return out;
}

Vec discrete_predict(const Vec& pi, const Mat& kernel) {
  return (pi.transpose() * kernel).transpose();
}

Vec discrete_analyze(const Vec& pi, const Vec& likelihood) {
  const Vec u = pi.cwiseProduct(likelihood);
  const double z = u.sum();
  if (!(z > 0.0)) throw Error(ErrorKind::kDegenerate, "discrete_analyze: zero evidence");
  return u / z;
}

Vec discrete_sample(const Vec& pi, long n, RngStream& stream) {
  const std::vector<long> idx = resample_indices(pi, n, ResampleScheme::kMultinomial, stream);
  Vec out = Vec::Zero(pi.size());
  for (long i : idx) out(i) += 1.0 / static_cast<double>(n);
  return out;
}

double discrete_distance(const Vec& p, const Vec& q) { return (p - q).cwiseAbs().sum(); }

void write_observations_csv(const std::string& path, const Mat& y) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  for (long c = 0; c < y.cols(); ++c) f << (c ? "," : "") << "y" << (c + 1);
  f << "\n";
  char buf[64];
  for (long r = 0; r < y.rows(); ++r) {
    for (long c = 0; c < y.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", y(r, c));
      f << (c ? "," : "") << buf;
    }
    f << "\n";
  }
}

Mat read_observations_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::string line;
  if (!std::getline(f, line)) throw Error(ErrorKind::kIo, path + ": empty file");
  long cols = 1;
  for (char ch : line) cols += ch == ',';
  std::vector<double> vals;
  long rows = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    long n = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kIo, path + ": bad number '" + cell + "'");
      }
      ++n;
    }
    if (n != cols) throw Error(ErrorKind::kIo, path + ": ragged row " + std::to_string(rows + 2));
    ++rows;
  }
  Mat y(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) y(r, c) = vals[r * cols + c];
  return y;
}

}  // namespace mcsuite
