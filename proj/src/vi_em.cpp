#include "mcsuite/vi_em.hpp"

#include "mcsuite/direct_sampling.hpp"

#include <cmath>
#include <numbers>

namespace mcsuite {

void MeanFieldGaussian::validate() const {
  if (m.size() != s2.size() || m.size() == 0) {
    throw Error(ErrorKind::kInvalidInput, "mean-field: mean and variance sizes differ");
  }
  if (!(s2.array() > 0.0).all()) {
    throw Error(ErrorKind::kInvalidInput, "mean-field: variances must be positive");
  }
}

double MeanFieldGaussian::log_density(const Vec& x) const {
  const double two_pi = 2.0 * std::numbers::pi;
  return -0.5 * ((x - m).array().square() / s2.array() + (two_pi * s2.array()).log()).sum();
}

SampleableDensity MeanFieldGaussian::as_sampleable() const {
  validate();
  const MeanFieldGaussian g = *this;
  SampleableDensity s;
  s.density.dim = g.dim();
  s.density.log_density = [g](const Vec& x) { return g.log_density(x); };
  s.sample = [g](RngStream& r) -> Vec {
    Vec x(g.dim());
    for (int i = 0; i < g.dim(); ++i) x(i) = g.m(i) + std::sqrt(g.s2(i)) * r.normal();
    return x;
  };
  return s;
}

double gaussian_kl(const Vec& m1, const Mat& s1, const Vec& m2, const Mat& s2) {
  const long d = m1.size();
  const Eigen::LLT<Mat> l2(s2);
  const Eigen::LLT<Mat> l1(s1);
  if (l1.info() != Eigen::Success || l2.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingular, "gaussian_kl: covariance not positive definite");
  }
  const Mat s2inv_s1 = l2.solve(s1);
  const Vec dm = m2 - m1;
  const double logdet1 = 2.0 * Mat(l1.matrixL()).diagonal().array().log().sum();
  const double logdet2 = 2.0 * Mat(l2.matrixL()).diagonal().array().log().sum();
  return 0.5 * (s2inv_s1.trace() + dm.dot(l2.solve(dm)) - static_cast<double>(d) + logdet2 -
                logdet1);
}

double elbo_exact(const MeanFieldGaussian& g, const GaussianTarget& f, double log_c) {
  g.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  const int d = g.dim();
  const Mat& h = f.precision();
  const Vec dm = g.m - f.mean();
  // E_g log f~ = log c + E_g log f
  const double cross = log_c - 0.5 * d * std::log(two_pi) + 0.5 * f.log_det_precision() -
                       0.5 * ((h.diagonal().array() * g.s2.array()).sum() + dm.dot(h * dm));
  const double entropy = 0.5 * (two_pi * std::exp(1.0) * g.s2.array()).log().sum();
  return cross + entropy;
}

Estimate elbo_mc(const SampleableDensity& g,
                 const std::function<double(const Vec&)>& log_f_tilde, long n,
                 RngStream& stream) {
  Vec v(n);
  for (long i = 0; i < n; ++i) {
    const Vec x = g.sample(stream);
    v(i) = log_f_tilde(x) - g.density.log_prob(x);
  }
  return estimate_from_values(v, 0.05);
}

CaviProblem<Vec> gaussian_cavi_problem(const GaussianTarget& target, double log_c) {
  CaviProblem<Vec> p;
  p.d = target.dim();
  p.update = [target](int i, const std::vector<Vec>& g) {
    const Mat& h = target.precision();
    const Vec& mu = target.mean();
    double s = 0.0;
    for (int j = 0; j < target.dim(); ++j) {
      if (j != i) s += h(i, j) * (g[j](0) - mu(j));
    }
    Vec out(2);
    out << mu(i) - s / h(i, i), 1.0 / h(i, i);
    return out;
  };
  p.elbo = [target, log_c](const std::vector<Vec>& g) {
    MeanFieldGaussian mf{Vec(g.size()), Vec(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) {
      mf.m(i) = g[i](0);
      mf.s2(i) = g[i](1);
    }
    return elbo_exact(mf, target, log_c);
  };
  p.change = [](const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); };
  p.valid = [](const Vec& f) { return std::isfinite(f(0)) && f(1) > 0.0 && std::isfinite(f(1)); };
  return p;
}

CaviProblem<Vec> discrete_cavi_problem(const Mat& p) {
  const Mat logp = p.array().log().matrix();
  CaviProblem<Vec> prob;
  prob.d = 2;
  prob.update = [logp](int i, const std::vector<Vec>& g) {
    // g_i(a) proportional to exp(E_{g_other} log p)
    const Vec e = i == 0 ? Vec(logp * g[1]) : Vec(logp.transpose() * g[0]);
    return normalize_log_weights(e);
  };
  prob.elbo = [logp](const std::vector<Vec>& g) {
    const auto neg_entropy = [](const Vec& q) {
      double s = 0.0;
      for (long k = 0; k < q.size(); ++k) s += q(k) > 0.0 ? q(k) * std::log(q(k)) : 0.0;
      return s;
    };
    double cross = 0.0;
    for (long a = 0; a < logp.rows(); ++a)
      for (long b = 0; b < logp.cols(); ++b)
        if (g[0](a) > 0.0 && g[1](b) > 0.0) cross += g[0](a) * g[1](b) * logp(a, b);
    return cross - neg_entropy(g[0]) - neg_entropy(g[1]);
  };
  prob.change = [](const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); };
  prob.valid = [](const Vec& f) { return f.allFinite() && std::abs(f.sum() - 1.0) < 1e-9; };
  return prob;
}

GaussianCaviResult cavi_gaussian(const GaussianTarget& target,
                                 const MeanFieldGaussian& init, int max_sweeps, double tol,
                                 double log_c) {
  init.validate();
  if (init.dim() != target.dim()) {
    throw Error(ErrorKind::kInvalidInput, "cavi_gaussian: dimension mismatch");
  }
  std::vector<Vec> g0(init.dim(), Vec(2));
  for (int i = 0; i < init.dim(); ++i) g0[i] << init.m(i), init.s2(i);
  const auto r = cavi_generic(gaussian_cavi_problem(target, log_c), g0, max_sweeps, tol);
  GaussianCaviResult out;
  out.g = MeanFieldGaussian{Vec(init.dim()), Vec(init.dim())};
  for (int i = 0; i < init.dim(); ++i) {
    out.g.m(i) = r.g[i](0);
    out.g.s2(i) = r.g[i](1);
  }
  out.elbo = r.elbo;
  out.sweeps = r.sweeps;
  out.converged = r.converged;
  return out;
}

EmResult em_run(const EmProblem& problem, const Vec& theta0, int iterations,
                RngStream* stream) {
  if (problem.monte_carlo && !stream) {
    throw Error(ErrorKind::kInvalidInput, "em_run: Monte Carlo E-step needs a stream");
  }
  EmResult res;
  res.thetas.push_back(theta0);
  const bool track = static_cast<bool>(problem.log_likelihood);
  if (track) res.log_likelihood.push_back(problem.log_likelihood(theta0));
  Vec theta = theta0;
  for (int l = 0; l < iterations; ++l) {
    try {
      const ExpectedLogDensity q = problem.e_step(theta, problem.monte_carlo ? stream : nullptr);
      theta = problem.m_step(q);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (EM iteration " + std::to_string(l) + ")");
    }
    if (!theta.allFinite()) {
      throw Error(ErrorKind::kDomain,
                  "em_run: M-step returned a non-finite parameter at iteration " +
                      std::to_string(l));
    }
    res.thetas.push_back(theta);
    if (track) {
      const double ll = problem.log_likelihood(theta);
      const double prev = res.log_likelihood.back();
      if (!problem.monte_carlo && ll < prev - 1e-10 * std::max(1.0, std::abs(prev))) {
        throw Error(ErrorKind::kMonotonicity,
                    "em_run: log-likelihood decreased at iteration " + std::to_string(l));
      }
      res.log_likelihood.push_back(ll);
    }
  }
  return res;
}

namespace {

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

double dempster_log_likelihood(const std::array<long, 4>& y, double theta) {
  return xlogy(static_cast<double>(y[0]), 2.0 + theta) + xlogy(static_cast<double>(y[3]), theta) +
         xlogy(static_cast<double>(y[1] + y[2]), 1.0 - theta);
}

EmProblem dempster_problem(const std::array<long, 4>& y, long mc_n) {
  EmProblem p;
  p.monte_carlo = mc_n > 0;
  const double y1 = static_cast<double>(y[0]);
  const double y23 = static_cast<double>(y[1] + y[2]);
  const double y4 = static_cast<double>(y[3]);
  p.e_step = [=](const Vec& theta, RngStream* stream) {
    const double t = theta(0);
    const double pz = t / (2.0 + t);
    double zbar;
    if (mc_n > 0) {
      double s = 0.0;
      for (long i = 0; i < mc_n; ++i) s += static_cast<double>(binomial_draw(*stream, y[0], pz));
      zbar = s / static_cast<double>(mc_n);
    } else {
      zbar = y1 * pz;
    }
    ExpectedLogDensity q;
    q.stats = Vec::Constant(1, zbar);
    q.value = [=](const Vec& th) {
      return xlogy(zbar + y4, th(0)) + xlogy(y23, 1.0 - th(0));
    };
    return q;
  };
  p.m_step = [=](const ExpectedLogDensity& q) {
    const double z = q.stats(0);
    const double denom = z + y23 + y4;
    if (!(denom > 0.0)) {
      throw Error(ErrorKind::kDomain, "dempster M-step: empty complete-data counts");
    }
    return Vec::Constant(1, (z + y4) / denom);
  };
  p.log_likelihood = [y](const Vec& th) { return dempster_log_likelihood(y, th(0)); };
  return p;
}

}  // namespace mcsuite
