#pragma once

#include "mcsuite/core.hpp"
#include "mcsuite/integration.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <string>
#include <vector>

namespace mcsuite {

struct MeanFieldGaussian {
  Vec m;
  Vec s2;

  void validate() const;
  int dim() const { return static_cast<int>(m.size()); }
  double log_density(const Vec& x) const;
  SampleableDensity as_sampleable() const;
};

// KL(N(m1, s1) || N(m2, s2)).
double gaussian_kl(const Vec& m1, const Mat& s1, const Vec& m2, const Mat& s2);

// ELBO of g against f~ = c f, from the cross-entropy and entropy formulas.
double elbo_exact(const MeanFieldGaussian& g, const GaussianTarget& f, double log_c);
Estimate elbo_mc(const SampleableDensity& g,
                 const std::function<double(const Vec&)>& log_f_tilde, long n,
                 RngStream& stream);

template <class Factor>
struct CaviProblem {
  int d = 1;
  // New factor i given all current factors.
  std::function<Factor(int i, const std::vector<Factor>& g)> update;
  std::function<double(const std::vector<Factor>& g)> elbo;  // optional
  std::function<double(const Factor& a, const Factor& b)> change;
  std::function<bool(const Factor& f)> valid;                // optional
};

template <class Factor>
struct CaviResult {
  std::vector<Factor> g;
  std::vector<double> elbo;  // after every coordinate update
  int sweeps = 0;
  bool converged = false;
};

// Ascending coordinate order; stops once a sweep moves no parameter by tol.
template <class Factor>
CaviResult<Factor> cavi_generic(const CaviProblem<Factor>& problem,
                                std::vector<Factor> init, int max_sweeps,
                                double tol = 1e-10) {
  CaviResult<Factor> res;
  res.g = std::move(init);
  if (static_cast<int>(res.g.size()) != problem.d) {
    throw Error(ErrorKind::kInvalidInput, "cavi: init has wrong number of factors");
  }
  for (int s = 0; s < max_sweeps; ++s) {
    double max_change = 0.0;
    for (int i = 0; i < problem.d; ++i) {
      Factor next = problem.update(i, res.g);
      if (problem.valid && !problem.valid(next)) {
        throw Error(ErrorKind::kDegenerate,
                    "cavi: update of factor " + std::to_string(i) + " is not normalizable");
      }
      max_change = std::max(max_change, problem.change(res.g[i], next));
      res.g[i] = std::move(next);
      if (problem.elbo) res.elbo.push_back(problem.elbo(res.g));
    }
    res.sweeps = s + 1;
    if (max_change < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

// Factor i is (mean, variance).
CaviProblem<Vec> gaussian_cavi_problem(const GaussianTarget& target, double log_c = 0.0);
// Factors are pmfs over the rows and columns of p (unnormalized allowed).
CaviProblem<Vec> discrete_cavi_problem(const Mat& p);

struct GaussianCaviResult {
  MeanFieldGaussian g;
  std::vector<double> elbo;
  int sweeps = 0;
  bool converged = false;
};

GaussianCaviResult cavi_gaussian(const GaussianTarget& target,
                                 const MeanFieldGaussian& init, int max_sweeps,
                                 double tol = 1e-10, double log_c = 0.0);

struct ExpectedLogDensity {
  std::function<double(const Vec& theta)> value;
  Vec stats;
};

struct EmProblem {
  // stream is null for closed-form E-steps.
  std::function<ExpectedLogDensity(const Vec& theta, RngStream* stream)> e_step;
  std::function<Vec(const ExpectedLogDensity&)> m_step;
  std::function<double(const Vec& theta)> log_likelihood;  // optional
  bool monte_carlo = false;
};

struct EmResult {
  std::vector<Vec> thetas;            // theta_0 .. theta_L
  std::vector<double> log_likelihood;  // empty when not evaluable
};

// Monotonicity of the likelihood is enforced (1e-10) for closed-form E-steps.
EmResult em_run(const EmProblem& problem, const Vec& theta0, int iterations,
                RngStream* stream = nullptr);

// Multinomial linkage model with cell probabilities (1/2 + t/4, (1-t)/4, (1-t)/4, t/4).
// mc_n > 0 replaces the E-step by the mean of mc_n Binomial draws.
EmProblem dempster_problem(const std::array<long, 4>& y, long mc_n = 0);
double dempster_log_likelihood(const std::array<long, 4>& y, double theta);

}  // namespace mcsuite
