#include "mcsuite/gibbs.hpp"

#include "mcsuite/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace mcsuite {

std::vector<std::vector<int>> FullConditionalSet::resolved_blocks() const {
  if (!blocks.empty()) return blocks;
  std::vector<std::vector<int>> out(d);
  for (int j = 0; j < d; ++j) out[j] = {j};
  return out;
}

namespace {

void update_block(const FullConditionalSet& c, const std::vector<int>& idx, int block,
                  Vec& x, RngStream& stream, long iteration) {
  const Vec v = c.sample_conditional(block, x, stream);
  if (v.size() != static_cast<long>(idx.size())) {
    throw Error(ErrorKind::kInvalidInput, "gibbs: conditional returned wrong block size");
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!std::isfinite(v(k))) {
      throw Error(ErrorKind::kTargetEvaluation,
                  "gibbs: conditional for coordinate " + std::to_string(idx[k]) +
                      " returned a non-finite value at iteration " +
                      std::to_string(iteration));
    }
    x(idx[k]) = v(k);
  }
}

}  // namespace

ChainTrace gibbs_run(const FullConditionalSet& conditionals, const Vec& init, long n,
                     RngStream& stream, const TargetDensity* target) {
  if (init.size() != conditionals.d) {
    throw Error(ErrorKind::kInvalidInput, "gibbs_run: init has wrong dimension");
  }
  const auto blocks = conditionals.resolved_blocks();
  ChainTrace trace(n, conditionals.d);
  trace.sampler = conditionals.scan == ScanOrder::kSequential ? "gibbs-sequential"
                                                               : "gibbs-random";
  trace.seed = stream.seed();
  Vec x = init;
  for (long i = 0; i < n; ++i) {
    if (conditionals.scan == ScanOrder::kSequential) {
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        update_block(conditionals, blocks[b], static_cast<int>(b), x, stream, i);
      }
    } else {
      const int b = static_cast<int>(stream.below(blocks.size()));
      update_block(conditionals, blocks[b], b, x, stream, i);
    }
    const double lf = target ? target->log_prob(x) : std::nan("");
    trace.record(i, x, true, lf);
  }
  return trace;
}

GaussianConditional gaussian_full_conditional(const GaussianTarget& target, int j,
                                              const Vec& x) {
  const Mat& h = target.precision();
  const Vec& mu = target.mean();
  if (j < 0 || j >= target.dim()) {
    throw Error(ErrorKind::kInvalidInput, "gaussian_full_conditional: index out of range");
  }
  double s = 0.0;
  for (int k = 0; k < target.dim(); ++k) {
    if (k != j) s += h(j, k) * (x(k) - mu(k));
  }
  return {mu(j) - s / h(j, j), 1.0 / h(j, j)};
}

FullConditionalSet gaussian_gibbs_conditionals(const GaussianTarget& target,
                                               ScanOrder scan) {
  FullConditionalSet c;
  c.d = target.dim();
  c.scan = scan;
  c.sample_conditional = [target](int j, const Vec& x, RngStream& s) {
    const GaussianConditional g = gaussian_full_conditional(target, j, x);
    Vec out(1);
    out(0) = g.mean + std::sqrt(g.variance) * s.normal();
    return out;
  };
  return c;
}

DugsState dugs_state(const GaussianTarget& target) {
  const Mat ld = target.lower() + target.diag();
  DugsState st;
  st.noise_transform =
      ld.triangularView<Eigen::Lower>().solve(Mat::Identity(target.dim(), target.dim()));
  st.b = -st.noise_transform * target.upper();
  st.rho = gibbs_convergence_rate(target);
  return st;
}

std::pair<ChainTrace, DugsState> dugs_run(const GaussianTarget& target, const Vec& init,
                                          long n, RngStream& stream, bool validate) {
  const int d = target.dim();
  if (init.size() != d) throw Error(ErrorKind::kInvalidInput, "dugs_run: init dimension");
  DugsState st = dugs_state(target);
  const Mat& h = target.precision();
  const Vec& mu = target.mean();
  ChainTrace trace(n, d);
  trace.sampler = "dugs";
  trace.seed = stream.seed();
  Vec x = init;
  Vec u(d);
  for (long i = 0; i < n; ++i) {
    const Vec prev = x;
    for (int j = 0; j < d; ++j) {
      const GaussianConditional g = gaussian_full_conditional(target, j, x);
      const double z = stream.normal();
      x(j) = g.mean + std::sqrt(g.variance) * z;
      u(j) = std::sqrt(h(j, j)) * z;
    }
    if (validate) {
      const Vec pred = mu + st.b * (prev - mu) + st.noise_transform * u;
      const double err = (pred - x).cwiseAbs().maxCoeff();
      if (err > 1e-12 * (1.0 + x.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::kKernelInconsistent,
                    "dugs_run: sweep " + std::to_string(i) +
                        " deviates from the affine recursion");
      }
    }
    trace.record(i, x, true, target.log_density(x));
  }
  return {std::move(trace), std::move(st)};
}

std::pair<Vec, Mat> dugs_moments(const GaussianTarget& target, const Vec& x0, long n) {
  const DugsState st = dugs_state(target);
  Mat bn = Mat::Identity(target.dim(), target.dim());
  for (long i = 0; i < n; ++i) bn = st.b * bn;
  const Mat& sigma = target.covariance();
  Vec mean = target.mean() + bn * (x0 - target.mean());
  Mat cov = sigma - bn * sigma * bn.transpose();
  return {mean, cov};
}

double spectral_radius_dense(const Mat& b) {
  Eigen::EigenSolver<Mat> es(b, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Subspace iteration with a Rayleigh-Ritz step on a small block. B is not
// symmetric, so its dominant eigenvalues can be a complex pair, which plain
// power iteration never settles on.
double spectral_radius_power(const Mat& b, double tol, int max_iter) {
  const long d = b.rows();
  const long p = std::min<long>(d, 8);
  RngStream init(0x5eedULL, 0);
  Mat q(d, p);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < p; ++j) q(i, j) = init.normal();
  q = Eigen::HouseholderQR<Mat>(q).householderQ() * Mat::Identity(d, p);
  double est = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Mat z = b * q;
    if (z.norm() == 0.0) return 0.0;
    const Mat t = q.transpose() * z;
    const double r = Eigen::EigenSolver<Mat>(t, false).eigenvalues().cwiseAbs().maxCoeff();
    if (std::abs(r - est) <= tol * std::max(1.0, r)) return r;
    est = r;
    q = Eigen::HouseholderQR<Mat>(z).householderQ() * Mat::Identity(d, p);
  }
  return est;
}

double gibbs_convergence_rate(const GaussianTarget& target) {
  const Mat ld = target.lower() + target.diag();
  const Mat b = -ld.triangularView<Eigen::Lower>().solve(target.upper());
  if (b.rows() <= 64) return spectral_radius_dense(b);
  return spectral_radius_power(b);
}

Mat exact_random_scan_gibbs_kernel(const Mat& f) {
  const long r = f.rows(), c = f.cols();
  const Vec row_sums = f.rowwise().sum();
  const Vec col_sums = f.colwise().sum().transpose();
  Mat p = Mat::Zero(r * c, r * c);
  for (long i = 0; i < r; ++i) {
    for (long j = 0; j < c; ++j) {
      if (f(i, j) <= 0.0) continue;
      const long from = i * c + j;
      // Update the first coordinate given j, or the second given i.
      for (long k = 0; k < r; ++k) p(from, k * c + j) += 0.5 * f(k, j) / col_sums(j);
      for (long k = 0; k < c; ++k) p(from, i * c + k) += 0.5 * f(i, k) / row_sums(i);
    }
  }
  return p;
}

std::function<double(double, double)> hammersley_clifford_2d(
    const ConditionalDensity& f2_given_1, const ConditionalDensity& f1_given_2,
    double lo2, double hi2, double tol) {
  return [=](double x1, double x2) {
    const auto ratio = [&](double t) {
      const double num = f2_given_1(t, x1);
      const double den = f1_given_2(x1, t);
      if (!(den > 0.0)) {
        throw Error(ErrorKind::kInconsistentConditionals,
                    "hammersley_clifford_2d: f(x1|x2) vanishes inside the x2 range");
      }
      return num / den;
    };
    double integral = 0.0;
    try {
      integral = adaptive_simpson(ratio, lo2, hi2, tol);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kInconsistentConditionals) throw;
      throw Error(ErrorKind::kInconsistentConditionals,
                  std::string("hammersley_clifford_2d: ratio integral failed: ") + e.what());
    }
    if (!(integral > 0.0) || !std::isfinite(integral)) {
      throw Error(ErrorKind::kInconsistentConditionals,
                  "hammersley_clifford_2d: ratio integral is not positive and finite");
    }
    return f2_given_1(x2, x1) / integral;
  };
}

namespace {

// Boundary of {y : log f(y) > level} on one side of x (dir = +-1).
double slice_edge(const std::function<double(double)>& log_f, double x, double level,
                  int dir, std::optional<double> limit) {
  double w = 1.0;
  double inside = x;
  double outside = 0.0;
  bool found = false;
  for (int k = 0; k < 1100; ++k) {
    double y = x + dir * w;
    if (limit && dir * (y - *limit) >= 0.0) {
      y = *limit;
      if (!(log_f(y) > level)) {
        outside = y;
        found = true;
        break;
      }
      return y;
    }
    if (!(log_f(y) > level)) {
      outside = y;
      found = true;
      break;
    }
    inside = y;
    w *= 2.0;
  }
  if (!found) {
    throw Error(ErrorKind::kSliceGeometry, "slice_sample_2d: superlevel set is unbounded");
  }
  while (std::abs(outside - inside) > 1e-10) {
    const double mid = 0.5 * (inside + outside);
    if (log_f(mid) > level) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace

ChainTrace slice_sample_2d(const std::function<double(double)>& log_f, double init,
                           long n, RngStream& stream, std::optional<SliceBracket> bracket) {
  double x = init;
  double lfx = log_f(x);
  if (!(lfx > kNegInf) || std::isnan(lfx)) {
    throw Error(ErrorKind::kInitialization, "slice_sample_2d: f(init) must be positive");
  }
  ChainTrace trace(n, 1);
  trace.sampler = "slice-2d";
  trace.seed = stream.seed();
  Vec xv(1);
  for (long i = 0; i < n; ++i) {
    const double level = lfx + std::log(stream.uniform());
    const double lo = slice_edge(log_f, x, level, -1,
                                 bracket ? std::optional<double>(bracket->lo) : std::nullopt);
    const double hi = slice_edge(log_f, x, level, +1,
                                 bracket ? std::optional<double>(bracket->hi) : std::nullopt);
    double y = lo + (hi - lo) * stream.uniform();
    double lfy = log_f(y);
    // Bisection leaves up to 1e-10 of slack at the edges.
    if (!(lfy > level)) {
      y = x;
      lfy = lfx;
    }
    x = y;
    lfx = lfy;
    xv(0) = x;
    trace.record(i, xv, true, lfx);
  }
  return trace;
}

}  // namespace mcsuite
