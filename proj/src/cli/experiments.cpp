#include "experiments.hpp"

#include "mcsuite/annealing.hpp"
#include "mcsuite/direct_sampling.hpp"
#include "mcsuite/gibbs.hpp"
#include "mcsuite/hmc.hpp"
#include "mcsuite/integration.hpp"
#include "mcsuite/langevin.hpp"
#include "mcsuite/mcmc.hpp"
#include "mcsuite/numerics.hpp"
#include "mcsuite/smc.hpp"
#include "mcsuite/vi_em.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>

#ifndef MCSUITE_VERSION
#define MCSUITE_VERSION "0.0.0"
#endif

namespace mcsuite::cli {

namespace fixtures {

double sa_potential(double x) { return x * x * x * x - x * x - 0.4 * x; }

double sa_minimizer() {
  return bisect_root([](double x) { return 4.0 * x * x * x - 2.0 * x - 0.4; }, 0.5, 1.5);
}

double double_well(double x, double h) { return h * (x * x - 1.0) * (x * x - 1.0); }

TargetDensity beta_target(double a, double b) {
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  TargetDensity t;
  t.dim = 1;
  t.log_density = [a, b, log_norm](const Vec& x) {
    const double v = x(0);
    if (v < 0.0 || v > 1.0) return kNegInf;
    return log_norm + (a - 1.0) * std::log(v) + (b - 1.0) * std::log1p(-v);
  };
  t.support_indicator = [](const Vec& x) { return x(0) >= 0.0 && x(0) <= 1.0; };
  return t;
}

SampleableDensity uniform01_proposal() {
  SampleableDensity g;
  g.density.dim = 1;
  g.density.log_density = [](const Vec& x) {
    return (x(0) >= 0.0 && x(0) <= 1.0) ? 0.0 : kNegInf;
  };
  g.density.support_indicator = [](const Vec& x) { return x(0) >= 0.0 && x(0) <= 1.0; };
  g.sample = [](RngStream& s) { return Vec::Constant(1, s.uniform()); };
  return g;
}

TargetDensity standard_normal_target(int d) {
  return GaussianTarget(Vec::Zero(d), Mat::Identity(d, d)).as_target();
}

}  // namespace fixtures

namespace {

// ---- config helpers -------------------------------------------------------

long positive_long(const Config& c, const std::string& key) {
  const long v = c.get_long(key);
  if (v <= 0) throw ConfigError("config key '" + key + "': must be a positive integer");
  return v;
}

double positive_double(const Config& c, const std::string& key) {
  const double v = c.get_double(key);
  if (!(v > 0.0)) throw ConfigError("config key '" + key + "': must be positive");
  return v;
}

double open_unit(const Config& c, const std::string& key) {
  const double v = c.get_double(key);
  if (!(v > 0.0 && v < 1.0)) throw ConfigError("config key '" + key + "': must lie in (0, 1)");
  return v;
}

std::vector<double> nonempty_doubles(const Config& c, const std::string& key) {
  auto v = c.get_doubles(key);
  if (v.empty()) throw ConfigError("config key '" + key + "': must not be empty");
  return v;
}

RngStream root_stream(const Config& c) { return RngStream(c.get_u64("seed"), 0); }

Vec scalar(double x) { return Vec::Constant(1, x); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Standard error of a chain mean from the Bartlett long-run variance. The
// truncated-sum IAT stops at the first negative lag and undercounts
// oscillating chains such as HMC with an antithetic trajectory length.
struct ChainMoment {
  double mean;
  double se;
  double iat;
};

ChainMoment chain_moment(const Vec& series) {
  const double lrv = bartlett_long_run_variance(series);
  const double var = variance_of(series);
  return {mean_of(series), std::sqrt(lrv / static_cast<double>(series.size())), lrv / var};
}

// ---- pi-estimate ----------------------------------------------------------

ExperimentOutput run_pi(const Config& c, const std::string&) {
  const long n = positive_long(c, "N");
  const double alpha = open_unit(c, "alpha");
  const long reps = positive_long(c, "replications");
  const RngStream root = root_stream(c);

  const Sampler square = [](RngStream& s) {
    Vec x(2);
    x(0) = 2.0 * s.uniform() - 1.0;
    x(1) = 2.0 * s.uniform() - 1.0;
    return x;
  };
  const TestFunction h{[](const Vec& x) { return x.squaredNorm() <= 1.0 ? 4.0 : 0.0; }, 4.0};

  std::vector<Estimate> est(reps);
  parallel_for(reps, [&](long r) {
    RngStream s = root.split(static_cast<std::uint64_t>(r));
    est[r] = mc_estimate(square, h, n, alpha, s);
  });

  ResultTable t({"estimate", "ci_lo", "ci_hi", "hits"});
  long covered = 0;
  for (const Estimate& e : est) {
    const long hits = std::lround(e.value * static_cast<double>(n) / 4.0);
    t.add_row({e.value, e.ci_lo, e.ci_hi, hits});
    if (e.ci_lo <= std::numbers::pi && std::numbers::pi <= e.ci_hi) ++covered;
  }
  t.add_meta("coverage", static_cast<double>(covered) / static_cast<double>(reps));

  char buf[160];
  std::snprintf(buf, sizeof buf, "pi_hat = %.4f, %g%% CI (%.4f, %.4f)", est[0].value,
                100.0 * (1.0 - alpha), est[0].ci_lo, est[0].ci_hi);
  return {t, {}, buf};
}

// ---- rejection-beta -------------------------------------------------------

ExperimentOutput run_rejection(const Config& c, const std::string&) {
  const long attempts = positive_long(c, "attempts");
  const double a = positive_double(c, "a"), b = positive_double(c, "b");
  const double m = positive_double(c, "M");
  const int bins = static_cast<int>(positive_long(c, "bins"));
  RngStream s = root_stream(c);

  const RejectionResult res = rejection_sample_attempts(
      fixtures::beta_target(a, b), fixtures::uniform01_proposal(), m, s, attempts);
  const ScalarDistribution beta = beta_distribution(a, b);
  std::vector<double> xs(res.samples.col(0).data(),
                         res.samples.col(0).data() + res.samples.rows());
  const long accepted = static_cast<long>(xs.size());
  const double ks = accepted ? ks_statistic(xs, beta.cdf) : std::nan("");
  const double crit = accepted ? ks_critical(accepted, 0.01) : std::nan("");

  ResultTable t({"attempts", "accepted", "acceptance_rate", "theory", "ks_statistic",
                 "ks_critical_1pct"});
  t.add_row({attempts, accepted, res.acceptance_rate(), 1.0 / m, ks, crit});

  ResultTable hist({"bin_lo", "bin_hi", "empirical", "exact"});
  if (accepted) {
    const auto emp = histogram_probs(xs, 0.0, 1.0, bins);
    const auto ex = cdf_bin_probs(beta.cdf, 0.0, 1.0, bins);
    for (int i = 0; i < bins; ++i) {
      hist.add_row({static_cast<double>(i) / bins, static_cast<double>(i + 1) / bins, emp[i], ex[i]});
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "acceptance %.4f (theory %.4f), KS %.4f vs %.4f",
                res.acceptance_rate(), 1.0 / m, ks, crit);
  return {t, {{"histogram", hist}}, buf};
}

// ---- abc-betabinom --------------------------------------------------------

ExperimentOutput run_abc(const Config& c, const std::string&) {
  const long n_obs = positive_long(c, "n_obs");
  const double p_true = open_unit(c, "p_true");
  const long n = positive_long(c, "N");
  const auto tols = nonempty_doubles(c, "tolerances");
  const int bins = static_cast<int>(positive_long(c, "bins"));
  const RngStream root = root_stream(c);

  RngStream data_stream = root.split(0);
  const long y_obs = binomial_draw(data_stream, n_obs, p_true);
  const double pa = 1.0 + static_cast<double>(y_obs);
  const double pb = static_cast<double>(n_obs) + 1.0 - static_cast<double>(y_obs);
  const ScalarDistribution post = beta_distribution(pa, pb);
  const double pm = pa / (pa + pb);
  const double psd = std::sqrt(pa * pb / ((pa + pb) * (pa + pb) * (pa + pb + 1.0)));
  const double lo = std::max(0.0, pm - 4.0 * psd), hi = std::min(1.0, pm + 4.0 * psd);
  const auto exact = cdf_bin_probs(post.cdf, lo, hi, bins);

  ResultTable t({"tolerance", "accepted", "simulations", "acceptance_rate", "posterior_mean",
                 "exact_mean", "tv"});
  ResultTable hist({"tolerance", "bin_lo", "bin_hi", "empirical", "exact"});
  for (std::size_t i = 0; i < tols.size(); ++i) {
    if (!(tols[i] > 0.0)) throw ConfigError("config key 'tolerances': entries must be positive");
    AbcProblem prob;
    prob.prior_sampler = [](RngStream& s) { return scalar(s.uniform()); };
    prob.simulator = [n_obs](const Vec& theta, RngStream& s) {
      return scalar(static_cast<double>(binomial_draw(s, n_obs, theta(0))));
    };
    prob.summary = [](const Vec& y) { return y; };
    prob.distance = [n_obs](const Vec& u, const Vec& v) {
      return std::abs(u(0) - v(0)) / static_cast<double>(n_obs);
    };
    prob.tolerance = tols[i];
    prob.observed = scalar(static_cast<double>(y_obs));
    RngStream s = root.split(1 + i);
    const AbcResult res = abc_rejection(prob, s, n);
    std::vector<double> th(res.accepted.col(0).data(),
                           res.accepted.col(0).data() + res.accepted.rows());
    const auto emp = histogram_probs(th, lo, hi, bins);
    const double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
      hist.add_row({tols[i], lo + b * w, lo + (b + 1) * w, emp[b], exact[b]});
    }
    t.add_row({tols[i], static_cast<long>(th.size()), res.simulations,
               static_cast<double>(th.size()) / static_cast<double>(res.simulations),
               mean_of(res.accepted.col(0)), pm, total_variation(emp, exact)});
  }
  t.add_meta("y_obs", y_obs);
  return {t, {{"histogram", hist}},
          "y_obs = " + std::to_string(y_obs) + ", " + std::to_string(tols.size()) +
              " tolerances"};
}

// ---- is-gaussian-tail -----------------------------------------------------

ExperimentOutput run_is_tail(const Config& c, const std::string&) {
  const long n = positive_long(c, "N");
  const double thr = c.get_double("threshold");
  const long reps = positive_long(c, "replications");
  const RngStream root = root_stream(c);

  const auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  const double oracle = adaptive_simpson(phi, thr, thr + 40.0, 1e-18);

  const TargetDensity target = fixtures::standard_normal_target(1);
  SampleableDensity shifted_exp;
  shifted_exp.density.dim = 1;
  shifted_exp.density.log_density = [thr](const Vec& x) {
    return x(0) >= thr ? -(x(0) - thr) : kNegInf;
  };
  shifted_exp.sample = [thr](RngStream& s) { return scalar(thr - std::log(s.uniform())); };
  const TestFunction h{[thr](const Vec& x) { return x(0) > thr ? 1.0 : 0.0; }, 1.0};
  const Sampler normal = [](RngStream& s) { return scalar(s.normal()); };

  std::vector<Estimate> mc(reps), is(reps);
  parallel_for(reps, [&](long r) {
    RngStream s = root.split(static_cast<std::uint64_t>(r));
    RngStream s_mc = s.split(0), s_is = s.split(1);
    mc[r] = mc_estimate(normal, h, n, 0.05, s_mc);
    is[r] = is_estimate(target, shifted_exp, h, n, 0.05, s_is);
  });

  ResultTable t({"method", "estimate", "std_error", "rel_error", "oracle", "zero_fraction",
                 "mean_rel_error"});
  const auto add = [&](const std::string& name, const std::vector<Estimate>& e) {
    long zeros = 0;
    double rel = 0.0;
    for (const Estimate& x : e) {
      if (x.value == 0.0) ++zeros;
      rel += std::abs(x.value - oracle) / oracle;
    }
    t.add_row({name, e[0].value, e[0].std_error, std::abs(e[0].value - oracle) / oracle, oracle,
               static_cast<double>(zeros) / reps, rel / reps});
  };
  add("mc", mc);
  add("is", is);

  char buf[200];
  std::snprintf(buf, sizeof buf, "P(X > %g) = %.6e; IS %.6e, MC %.6e", thr, oracle,
                is[0].value, mc[0].value);
  return {t, {}, buf};
}

// ---- rwmh-scaling ---------------------------------------------------------

ExperimentOutput run_rwmh(const Config& c, const std::string&) {
  const long n = positive_long(c, "N");
  const auto sig2 = nonempty_doubles(c, "sigma2");
  const long max_lag = positive_long(c, "max_lag");
  const long trace_len = std::min(n, positive_long(c, "trace_length"));
  const RngStream root = root_stream(c);
  const TargetDensity target = fixtures::standard_normal_target(1);

  ResultTable t({"sigma2", "acceptance", "predicted", "iat"});
  ResultTable tr({"sigma2", "iteration", "x"});
  ResultTable acf_t({"sigma2", "lag", "rho"});
  std::string summary;
  for (std::size_t i = 0; i < sig2.size(); ++i) {
    if (!(sig2[i] > 0.0)) throw ConfigError("config key 'sigma2': entries must be positive");
    const double sd = std::sqrt(sig2[i]);
    RngStream s = root.split(i);
    const ChainTrace chain = mh_run(target, gaussian_rwmh_kernel(sd), scalar(0.0), n, s);
    const AcfResult acf = autocorrelation(chain.column(0), std::min(max_lag, n - 1));
    // Stationary acceptance of Gaussian RWMH on N(0,1): (2/pi) atan(2/sigma).
    const double predicted = 2.0 / std::numbers::pi * std::atan(2.0 / sd);
    t.add_row({sig2[i], chain.acceptance_rate(), predicted, acf.iat});
    for (long k = 0; k < trace_len; ++k) tr.add_row({sig2[i], k + 1, chain.states(k, 0)});
    for (long k = 0; k < acf.acf.size(); ++k) acf_t.add_row({sig2[i], k, acf.acf(k)});
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ssigma2=%g: acc %.3f", i ? ", " : "", sig2[i],
                  chain.acceptance_rate());
    summary += buf;
  }
  return {t, {{"trace", tr}, {"acf", acf_t}}, summary};
}

// ---- gibbs-gaussian -------------------------------------------------------

ExperimentOutput run_gibbs(const Config& c, const std::string&) {
  const auto alphas = nonempty_doubles(c, "alphas");
  const long n = positive_long(c, "N");
  const long max_lag = positive_long(c, "max_lag");
  const RngStream root = root_stream(c);

  ResultTable t({"alpha", "rho_b", "alpha_squared", "acf_lag1", "iat"});
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    if (!(std::abs(a) < 1.0)) throw ConfigError("config key 'alphas': entries must lie in (-1, 1)");
    Mat cov(2, 2);
    cov << 1.0, a, a, 1.0;
    const GaussianTarget target = GaussianTarget::from_covariance(Vec::Zero(2), cov);
    RngStream s = root.split(i);
    const ChainTrace chain =
        gibbs_run(gaussian_gibbs_conditionals(target, ScanOrder::kSequential), Vec::Zero(2), n, s);
    const AcfResult acf = autocorrelation(chain.column(0), std::min(max_lag, n - 1));
    t.add_row({a, gibbs_convergence_rate(target), a * a, acf.acf.size() > 1 ? acf.acf(1) : 1.0,
               acf.iat});
  }
  return {t, {}, std::to_string(alphas.size()) + " bivariate targets"};
}

// ---- ula-bias -------------------------------------------------------------

ExperimentOutput run_ula(const Config& c, const std::string&) {
  const auto eps = nonempty_doubles(c, "eps");
  const long n = positive_long(c, "N");
  const long burn = c.get_long("burn_in");
  const double mu0 = c.get_double("mu0");
  const long curve = positive_long(c, "curve_steps");
  if (burn < 0 || burn >= n) throw ConfigError("config key 'burn_in': must lie in [0, N)");
  const RngStream root = root_stream(c);
  const GaussianTarget g(Vec::Zero(1), Mat::Identity(1, 1));
  const TargetDensity target = g.as_target();

  ResultTable t({"eps", "empirical_var", "limit_var", "w2_floor", "w2_over_eps"});
  ResultTable w2c({"eps", "step", "w2"});
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 2.0)) throw ConfigError("config key 'eps': entries must lie in (0, 2)");
    LangevinConfig lc;
    lc.step = eps[i];
    lc.n = n;
    RngStream s = root.split(i);
    const ChainTrace chain = ula_run(target, lc, scalar(0.0), s);
    const Vec tail = chain.column(0).tail(n - burn);
    const double limit = ula_limit_covariance(g, eps[i])(0, 0);
    const double floor = gaussian_w2_commuting(Vec::Zero(1), Mat::Constant(1, 1, limit),
                                               g.mean(), g.covariance());
    t.add_row({eps[i], variance_of(tail), limit, floor, floor / eps[i]});
    for (long k = 0; k <= curve; ++k) {
      const GaussianMoments m = ula_gaussian_moments(g, scalar(mu0), 1.0, eps[i], k);
      w2c.add_row({eps[i], k, gaussian_w2_commuting(m.mean, m.cov, g.mean(), g.covariance())});
    }
  }
  return {t, {{"w2_curve", w2c}}, std::to_string(eps.size()) + " step sizes"};
}

// ---- mala-vs-ula ----------------------------------------------------------

ExperimentOutput run_mala_ula(const Config& c, const std::string&) {
  const double eps = positive_double(c, "eps");
  const long reps = positive_long(c, "replicas");
  const auto grid = c.get_doubles("acceptance_eps");
  const long chain_n = positive_long(c, "chain_length");
  const RngStream root = root_stream(c);
  const TargetDensity target = fixtures::standard_normal_target(1);

  Vec mala(reps), ula(reps);
  parallel_for(reps, [&](long r) {
    RngStream s = root.split(static_cast<std::uint64_t>(r));
    const Vec x0 = scalar(s.normal());
    LangevinConfig lc;
    lc.step = eps;
    lc.n = 1;
    RngStream sm = s.split(0), su = s.split(1);
    mala(r) = mala_run(target, lc, x0, sm).states(0, 0);
    ula(r) = ula_run(target, lc, x0, su).states(0, 0);
  });

  ResultTable t({"method", "mean", "se_mean", "variance", "se_variance", "expected_variance"});
  const auto add = [&](const std::string& name, const Vec& x, double expected) {
    const double m = mean_of(x), v = variance_of(x);
    const double m4 = (x.array() - m).pow(4).mean();
    t.add_row({name, m, std::sqrt(v / reps), v, std::sqrt(std::max(0.0, m4 - v * v) / reps),
               expected});
  };
  add("mala", mala, 1.0);
  // One ULA step from N(0,1): (1 - eps)^2 + 2 eps = 1 + eps^2.
  add("ula", ula, 1.0 + eps * eps);

  ResultTable acc({"eps", "acceptance"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    LangevinConfig lc;
    lc.step = grid[i];
    lc.n = chain_n;
    RngStream s = root.split(static_cast<std::uint64_t>(reps) + i);
    acc.add_row({grid[i], mala_run(target, lc, scalar(0.0), s).acceptance_rate()});
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "variance after one step: MALA %.4f, ULA %.4f (1 + eps^2 = %.4f)",
                variance_of(mala), variance_of(ula), 1.0 + eps * eps);
  return {t, {{"mala_acceptance", acc}}, buf};
}

// ---- sa-doublewell --------------------------------------------------------

ExperimentOutput run_sa(const Config& c, const std::string&) {
  const long runs = positive_long(c, "runs");
  const long n = positive_long(c, "N");
  TemperatureSchedule sched;
  sched.kind = ScheduleKind::kGeometric;
  sched.beta0 = positive_double(c, "beta0");
  sched.alpha = c.get_double("alpha");
  sched.validate();
  const double step = positive_double(c, "step");
  const double x0 = c.get_double("x0");
  const double tol = positive_double(c, "success_tol");
  const double trap_beta = positive_double(c, "trap_beta");
  const long trap_n = positive_long(c, "trap_N");
  const long trap_start = c.get_long("trap_start");
  if (trap_start < 1 || trap_start > 5) throw ConfigError("config key 'trap_start': must lie in 1..5");
  const RngStream root = root_stream(c);
  const double xstar = fixtures::sa_minimizer();
  const auto v = [](const Vec& x) { return fixtures::sa_potential(x(0)); };

  std::vector<AnnealingResult> res(runs);
  parallel_for(runs, [&](long r) {
    RngStream s = root.split(static_cast<std::uint64_t>(r));
    res[r] = simulated_annealing(v, gaussian_rwmh_kernel(step), sched, scalar(x0), n, s);
  });
  ResultTable t({"run", "best_x", "best_v", "final_x", "success"});
  long ok = 0;
  for (long r = 0; r < runs; ++r) {
    const bool hit = std::abs(res[r].best_x(0) - xstar) <= tol;
    ok += hit;
    t.add_row({r, res[r].best_x(0), res[r].best_v, res[r].trace.states(n - 1, 0), hit ? 1L : 0L});
  }
  t.add_meta("minimizer", xstar);
  t.add_meta("successes", ok);

  // Five-state pmf with a local maximum at 4 and the global one at 2.
  const std::array<double, 5> f{0.1, 0.4, 0.1, 0.3, 0.1};
  TargetDensity trap;
  trap.dim = 1;
  trap.log_density = [f, trap_beta](const Vec& x) {
    const long k = std::lround(x(0));
    if (k < 1 || k > 5) return kNegInf;
    return trap_beta * std::log(f[k - 1]);
  };
  RngStream ts = root.split(static_cast<std::uint64_t>(runs));
  const ChainTrace chain = mh_run(trap, constrained_walk_kernel(1, 5),
                                  scalar(static_cast<double>(trap_start)), trap_n, ts);
  long at_start = 0;
  for (long i = 0; i < trap_n; ++i) at_start += std::lround(chain.states(i, 0)) == trap_start;
  ResultTable tt({"beta", "steps", "start", "fraction_at_start", "acceptance"});
  tt.add_row({trap_beta, trap_n, trap_start, static_cast<double>(at_start) / trap_n,
              chain.acceptance_rate()});

  return {t, {{"trap", tt}},
          std::to_string(ok) + "/" + std::to_string(runs) + " runs within " + fmt("%g", tol) +
              " of x* = " + fmt("%.6f", xstar)};
}

// ---- tempering-doublewell -------------------------------------------------

struct ModeFractions {
  double left;
  double right;
};

ModeFractions mode_fractions(const Vec& x) {
  long l = 0, r = 0;
  for (long i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) ++l;
    else ++r;
  }
  const double n = static_cast<double>(x.size());
  return {l / n, r / n};
}

ExperimentOutput run_tempering(const Config& c, const std::string&) {
  const double h = positive_double(c, "h");
  const int k = static_cast<int>(positive_long(c, "K"));
  const double beta_min = open_unit(c, "beta_min");
  const long n = positive_long(c, "N");
  const double step = positive_double(c, "step");
  const double st_step = positive_double(c, "st_step");
  const long seeds = positive_long(c, "rwmh_seeds");
  const double cover = open_unit(c, "cover_fraction");
  const RngStream root = root_stream(c);

  const LogDensityFn log_f = [h](const Vec& x) { return -fixtures::double_well(x(0), h); };
  TemperLadder ladder = geometric_ladder(k, beta_min);

  ResultTable t({"method", "seed", "left_frac", "right_frac", "covers"});
  const auto add = [&](const std::string& m, long seed, const Vec& x) {
    const ModeFractions f = mode_fractions(x);
    t.add_row({m, seed, f.left, f.right, (f.left >= cover && f.right >= cover) ? 1L : 0L});
  };

  std::vector<ProposalKernel> kernels;
  for (double b : ladder.betas) kernels.push_back(gaussian_rwmh_kernel(step / std::sqrt(b)));
  const PtResult pt = parallel_tempering(log_f, ladder, kernels,
                                         std::vector<Vec>(k, scalar(-1.0)), n, root.split(0));
  add("parallel_tempering", 0, pt.levels[0].column(0));

  // c_k = 1 / Z(beta_k) equalizes the level marginals.
  TemperLadder st_ladder = ladder;
  st_ladder.log_c.clear();
  for (double b : ladder.betas) {
    const double z = adaptive_simpson(
        [&](double x) { return std::exp(-b * fixtures::double_well(x, h)); }, -3.0, 3.0, 1e-12);
    st_ladder.log_c.push_back(-std::log(z));
  }
  RngStream st_stream = root.split(1);
  const TemperingResult st = simulated_tempering(log_f, st_ladder, gaussian_rwmh_kernel(st_step),
                                                 scalar(-1.0), 0, n, st_stream);
  add("simulated_tempering", 0, st.beta1.column(0));

  // Plain RWMH gets the total PT budget.
  const TargetDensity target{1, [&](const Vec& x) { return log_f(x); }, nullptr, nullptr};
  long failures = 0;
  for (long s = 0; s < seeds; ++s) {
    RngStream rs = root.split(2 + static_cast<std::uint64_t>(s));
    const ChainTrace chain =
        mh_run(target, gaussian_rwmh_kernel(step), scalar(-1.0), n * k, rs);
    const ModeFractions f = mode_fractions(chain.column(0));
    failures += !(f.left >= cover && f.right >= cover);
    add("rwmh", s, chain.column(0));
  }
  t.add_meta("pt_swap_acceptance",
             pt.swap_attempts ? static_cast<double>(pt.swap_accepts) / pt.swap_attempts : 0.0);
  t.add_meta("st_level_moves_accepted", st.level_moves_accepted);
  t.add_meta("st_beta1_samples", st.beta1.size());
  t.add_meta("rwmh_failure_fraction", static_cast<double>(failures) / seeds);
  return {t, {},
          "RWMH failed to cover both modes on " + std::to_string(failures) + "/" +
              std::to_string(seeds) + " seeds"};
}

// ---- hmc-gaussian ---------------------------------------------------------

ExperimentOutput run_hmc(const Config& c, const std::string&) {
  const int d = static_cast<int>(positive_long(c, "d"));
  const double eps = positive_double(c, "eps");
  const int steps = static_cast<int>(positive_long(c, "L"));
  const long n = positive_long(c, "N");
  const RngStream root = root_stream(c);
  const TargetDensity target = fixtures::standard_normal_target(d);

  RngStream init_stream = root.split(0), s = root.split(1);
  const Vec init = standard_normal_vector(init_stream, d);
  const ChainTrace chain = hmc_run(target, Mat::Identity(d, d), eps, steps, n, init, s);

  ResultTable t({"coordinate", "mean", "se_mean", "iat_mean", "variance", "se_variance",
                 "iat_variance"});
  for (int j = 0; j < d; ++j) {
    const Vec x = chain.column(j);
    const ChainMoment m1 = chain_moment(x);
    const ChainMoment m2 = chain_moment(x.array().square().matrix());
    t.add_row({static_cast<long>(j), m1.mean, m1.se, m1.iat, m2.mean, m2.se, m2.iat});
  }
  t.add_meta("acceptance", chain.acceptance_rate());
  return {t, {}, fmt("acceptance %.4f", chain.acceptance_rate())};
}

// ---- pf-linear-gaussian ---------------------------------------------------

ExperimentOutput run_pf(const Config& c, const std::string&) {
  const auto ns = c.get_longs("N");
  if (ns.empty()) throw ConfigError("config key 'N': must not be empty");
  const long reps = positive_long(c, "replications");
  const long j_steps = positive_long(c, "J");
  const std::string obs_path = c.get_string("observations");
  const RngStream root = root_stream(c);

  const auto m1 = [](double v) { return Mat::Constant(1, 1, v); };
  const HmmModel model =
      linear_gaussian_model(m1(c.get_double("a")), m1(c.get_double("h")),
                            m1(positive_double(c, "sigma")), m1(positive_double(c, "gamma")),
                            scalar(c.get_double("m0")), m1(positive_double(c, "p0")));
  Mat y;
  if (obs_path.empty()) {
    RngStream s = root.split(0);
    y = simulate_hmm(model, j_steps, s).y;
  } else {
    y = read_observations_csv(obs_path);
  }
  const KalmanOutput kf = kalman_filter(model, y);
  const long jj = y.rows();

  ResultTable t({"N", "rmse_bootstrap", "rmse_optimal", "ess_frac_bootstrap", "ess_frac_optimal",
                 "optimal_ess_ge_bootstrap"});
  ResultTable means({"N", "step", "kalman", "bootstrap", "optimal"});
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const long n = ns[i];
    if (n <= 0) throw ConfigError("config key 'N': entries must be positive");
    std::vector<FilterOutput> boot(reps), opt(reps);
    parallel_for(reps, [&](long r) {
      boot[r] = bootstrap_pf(model, y, n, root.split(1).split(i).split(r));
      opt[r] = optimal_pf(model, y, n, root.split(2).split(i).split(r));
    });
    double se_b = 0.0, se_o = 0.0, ess_b = 0.0, ess_o = 0.0;
    long ge = 0;
    for (long r = 0; r < reps; ++r) {
      for (long j = 0; j < jj; ++j) {
        se_b += std::pow(boot[r].means[j](0) - kf.means[j](0), 2);
        se_o += std::pow(opt[r].means[j](0) - kf.means[j](0), 2);
        ess_b += boot[r].ess[j];
        ess_o += opt[r].ess[j];
        ge += opt[r].ess[j] >= boot[r].ess[j];
      }
    }
    const double cells = static_cast<double>(reps * jj);
    t.add_row({n, std::sqrt(se_b / cells), std::sqrt(se_o / cells), ess_b / cells / n,
               ess_o / cells / n, ge / cells});
    for (long j = 0; j < jj; ++j) {
      means.add_row({n, j + 1, kf.means[j](0), boot[0].means[j](0), opt[0].means[j](0)});
    }
  }
  ResultTable obs({"y1"});
  for (long j = 0; j < jj; ++j) obs.add_row({y(j, 0)});

  std::vector<double> ln, lr;
  for (const auto& row : t.rows) {
    ln.push_back(std::log(static_cast<double>(std::get<long>(row[0]))));
    lr.push_back(std::log(std::get<double>(row[1])));
  }
  std::string summary = "bootstrap RMSE vs Kalman";
  if (ln.size() >= 2) {
    const double slope = ls_slope(ln, lr);
    t.add_meta("rmse_loglog_slope", slope);
    summary += fmt(", log-log slope %.3f", slope);
  }
  return {t, {{"observations", obs}, {"filter_means", means}}, summary};
}

// ---- cavi-gaussian --------------------------------------------------------

ExperimentOutput run_cavi(const Config& c, const std::string&) {
  const auto mu = c.get_doubles("mu");
  const auto hv = c.get_doubles("H");
  const int d = static_cast<int>(mu.size());
  if (d == 0 || static_cast<int>(hv.size()) != d * d) {
    throw ConfigError("config key 'H': expected " + std::to_string(d * d) + " entries");
  }
  const auto m0 = c.get_doubles("init_means");
  const auto s0 = c.get_doubles("init_vars");
  if (static_cast<int>(m0.size()) != d) throw ConfigError("config key 'init_means': wrong length");
  if (static_cast<int>(s0.size()) != d) throw ConfigError("config key 'init_vars': wrong length");
  const int sweeps = static_cast<int>(positive_long(c, "max_sweeps"));
  const double tol = positive_double(c, "tol");

  Mat h(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) h(i, j) = hv[i * d + j];
  const GaussianTarget target(Eigen::Map<const Vec>(mu.data(), d), h);
  MeanFieldGaussian init{Eigen::Map<const Vec>(m0.data(), d), Eigen::Map<const Vec>(s0.data(), d)};
  // Normalized target, so the ELBO limit is -KL.
  const double log_c = 0.0;
  const GaussianCaviResult res = cavi_gaussian(target, init, sweeps, tol, log_c);

  ResultTable t({"coordinate", "mean", "variance", "target_mean", "inverse_precision",
                 "marginal_variance"});
  for (int i = 0; i < d; ++i) {
    t.add_row({static_cast<long>(i), res.g.m(i), res.g.s2(i), target.mean()(i), 1.0 / h(i, i),
               target.covariance()(i, i)});
  }
  t.add_meta("sweeps", static_cast<long>(res.sweeps));
  t.add_meta("converged", res.converged ? 1L : 0L);
  t.add_meta("final_elbo", res.elbo.empty() ? std::nan("") : res.elbo.back());
  t.add_meta("kl", gaussian_kl(res.g.m, Mat(res.g.s2.asDiagonal()), target.mean(),
                               target.covariance()));
  ResultTable e({"update", "elbo"});
  for (std::size_t i = 0; i < res.elbo.size(); ++i) e.add_row({static_cast<long>(i), res.elbo[i]});
  return {t, {{"elbo", e}},
          std::to_string(res.sweeps) + " sweeps, " + (res.converged ? "converged" : "not converged")};
}

// ---- em-multinomial -------------------------------------------------------

ExperimentOutput run_em(const Config& c, const std::string&) {
  const auto yv = c.get_longs("y");
  if (yv.size() != 4) throw ConfigError("config key 'y': expected 4 counts");
  std::array<long, 4> y{};
  for (int i = 0; i < 4; ++i) {
    if (yv[i] < 0) throw ConfigError("config key 'y': counts must be non-negative");
    y[i] = yv[i];
  }
  const double theta0 = open_unit(c, "theta0");
  const int iters = static_cast<int>(positive_long(c, "iterations"));
  const long mc_n = positive_long(c, "mc_n");
  RngStream s = root_stream(c);

  const EmResult exact = em_run(dempster_problem(y), scalar(theta0), iters);
  const EmResult mc = em_run(dempster_problem(y, mc_n), scalar(theta0), iters, &s);

  ResultTable t({"iteration", "theta", "loglik", "theta_mc"});
  for (int i = 0; i <= iters; ++i) {
    t.add_row({static_cast<long>(i), exact.thetas[i](0), dempster_log_likelihood(y, exact.thetas[i](0)),
               mc.thetas[i](0)});
  }
  const double y1 = static_cast<double>(y[0]), y23 = static_cast<double>(y[1] + y[2]),
               y4 = static_cast<double>(y[3]);
  const double mle = bisect_root(
      [&](double th) { return y1 / (2.0 + th) + y4 / th - y23 / (1.0 - th); }, 1e-12, 1.0 - 1e-12);
  t.add_meta("mle", mle);
  return {t, {}, fmt("theta after EM %.10f", exact.thetas.back()(0)) + fmt(", MLE %.10f", mle)};
}

// ---- registry -------------------------------------------------------------

std::vector<ExperimentSpec> build_registry() {
  const SchemaKey seed{"seed", "20240101", "root RNG seed"};
  return {
      {"pi-estimate", "hit-or-miss estimate of pi on [-1,1]^2 with a normal-theory CI",
       {seed,
        {"N", "10000", "points per replication"},
        {"alpha", "0.05", "CI level is 1 - alpha"},
        {"replications", "1", "independent runs, one row each"}},
       run_pi},
      {"rejection-beta", "rejection sampling of Beta(a, b) from Unif(0, 1)",
       {seed,
        {"attempts", "100000", "proposal draws"},
        {"a", "2", "Beta shape"},
        {"b", "2", "Beta shape"},
        {"M", "1.5", "envelope constant, sup f/g for Beta(2,2)"},
        {"bins", "20", "histogram bins"}},
       run_rejection},
      {"abc-betabinom", "ABC rejection for a binomial success probability under a uniform prior",
       {seed,
        {"n_obs", "500", "binomial trials"},
        {"p_true", "0.4", "probability used to simulate the observed count"},
        {"N", "1000", "accepted draws per tolerance"},
        {"tolerances", "[0.01, 0.02, 0.05]", "distance thresholds on |y - y_o| / n"},
        {"bins", "20", "bins for the TV distance to the exact Beta posterior"}},
       run_abc},
      {"is-gaussian-tail", "P(X > t) for X ~ N(0,1): plain MC against a shifted exponential proposal",
       {seed,
        {"N", "10000", "draws per estimate"},
        {"threshold", "4", "tail threshold t"},
        {"replications", "1000", "independent estimates of each kind"}},
       run_is_tail},
      {"rwmh-scaling", "Gaussian random-walk MH on N(0,1) over proposal variances",
       {seed,
        {"N", "100000", "chain length"},
        {"sigma2", "[0.024, 2.4, 240]", "proposal variances"},
        {"max_lag", "2000", "largest autocorrelation lag"},
        {"trace_length", "1000", "states written to trace.csv per variance"}},
       run_rwmh},
      {"gibbs-gaussian", "systematic-scan Gibbs on bivariate Gaussians with correlation alpha",
       {seed,
        {"alphas", "[0.01, 0.5, 0.9, 0.99]", "correlations"},
        {"N", "10000", "sweeps"},
        {"max_lag", "500", "largest autocorrelation lag"}},
       run_gibbs},
      {"ula-bias", "stationary bias of the unadjusted Langevin algorithm on N(0,1)",
       {seed,
        {"eps", "[0.05, 0.1, 0.2]", "step sizes"},
        {"N", "1000000", "chain length"},
        {"burn_in", "1000", "discarded prefix"},
        {"mu0", "3", "initial mean for the exact W2 curve (initial variance 1)"},
        {"curve_steps", "100", "steps in the exact W2 curve"}},
       run_ula},
      {"mala-vs-ula", "one step of MALA and ULA started at target draws",
       {seed,
        {"eps", "0.5", "step size"},
        {"replicas", "100000", "independent one-step replicas"},
        {"acceptance_eps", "[1, 0.1, 0.01]", "step sizes for the MALA acceptance table"},
        {"chain_length", "10000", "chain length for the acceptance table"}},
       run_mala_ula},
      {"sa-doublewell", "simulated annealing on x^4 - x^2 - 0.4x and a five-state trap",
       {seed,
        {"runs", "100", "independent annealing runs"},
        {"N", "2000", "steps per run"},
        {"beta0", "1", "initial inverse temperature"},
        {"alpha", "1.005", "geometric growth factor"},
        {"step", "0.5", "random-walk standard deviation"},
        {"x0", "-0.6", "start, inside the local basin"},
        {"success_tol", "0.05", "distance to the global minimizer counted as success"},
        {"trap_beta", "50", "fixed inverse temperature for the five-state walk"},
        {"trap_N", "10000", "steps of the five-state walk"},
        {"trap_start", "4", "start state (the local maximum)"}},
       run_sa},
      {"tempering-doublewell", "parallel and simulated tempering on exp(-h (x^2 - 1)^2)",
       {seed,
        {"h", "25", "barrier height"},
        {"K", "5", "temperature levels"},
        {"beta_min", "0.08", "hottest inverse temperature, geometric ladder"},
        {"N", "1000000", "iterations per method"},
        {"step", "0.15", "random-walk sd at beta = 1, scaled by beta^-1/2 per level"},
        {"st_step", "0.3", "random-walk sd for simulated tempering"},
        {"rwmh_seeds", "10", "plain RWMH runs with K * N steps each"},
        {"cover_fraction", "0.2", "occupancy required of each mode"}},
       run_tempering},
      {"hmc-gaussian", "leapfrog HMC on N(0, I_d)",
       {seed,
        {"d", "10", "dimension"},
        {"eps", "0.2", "leapfrog step"},
        {"L", "10", "leapfrog steps per proposal"},
        {"N", "100000", "iterations"}},
       run_hmc},
      {"pf-linear-gaussian", "bootstrap and optimal particle filters against the Kalman filter",
       {seed,
        {"N", "[100, 1000, 10000]", "particle counts"},
        {"replications", "10", "filter runs per particle count"},
        {"J", "50", "observation steps when simulating"},
        {"a", "0.9", "state transition"},
        {"h", "1", "observation coefficient"},
        {"sigma", "0.1", "state noise variance"},
        {"gamma", "0.1", "observation noise variance"},
        {"m0", "0", "prior mean of X_0"},
        {"p0", "1", "prior variance of X_0"},
        {"observations", "\"\"", "CSV of observations; empty simulates J steps"}},
       run_pf},
      {"cavi-gaussian", "mean-field CAVI on a Gaussian target",
       {seed,
        {"H", "[2, 1, 1, 2]", "precision matrix, row-major"},
        {"mu", "[0, 0]", "target mean"},
        {"init_means", "[1, -1]", "initial factor means"},
        {"init_vars", "[1, 1]", "initial factor variances"},
        {"max_sweeps", "100", "sweep cap"},
        {"tol", "1e-10", "stop when a sweep changes the factors by less"}},
       run_cavi},
      {"em-multinomial", "EM and Monte Carlo EM for the four-cell linkage model",
       {seed,
        {"y", "[125, 18, 20, 34]", "cell counts"},
        {"theta0", "0.5", "initial theta"},
        {"iterations", "20", "EM iterations"},
        {"mc_n", "10000", "latent draws per Monte Carlo E-step"}},
       run_em},
  };
}

}  // namespace

const std::vector<ExperimentSpec>& experiments() {
  static const std::vector<ExperimentSpec> registry = build_registry();
  return registry;
}

const ExperimentSpec& find_experiment(const std::string& name) {
  for (const auto& e : experiments()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "' (see `mcsuite list`)");
}

std::string default_config_text(const ExperimentSpec& spec) {
  std::string out = "# " + spec.name + ": " + spec.description + "\n";
  std::size_t width = 0;
  for (const auto& k : spec.schema) width = std::max(width, k.key.size() + k.default_value.size());
  for (const auto& k : spec.schema) {
    std::string line = k.key + " = " + k.default_value;
    line.resize(std::max(line.size(), width + 4), ' ');
    out += line + "  # " + k.doc + "\n";
  }
  return out;
}

void validate_config(const ExperimentSpec& spec, const Config& config) {
  std::set<std::string> known;
  for (const auto& k : spec.schema) known.insert(k.key);
  for (const auto& [key, value] : config.values()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + key + "' for experiment '" + spec.name + "'");
    }
  }
  for (const auto& k : spec.schema) {
    if (!config.has(k.key)) {
      throw ConfigError("missing config key '" + k.key + "' for experiment '" + spec.name + "'");
    }
  }
}

ExperimentOutput run_experiment(const std::string& name, const Config& config,
                                const std::string& out_dir) {
  const ExperimentSpec& spec = find_experiment(name);
  validate_config(spec, config);
  config.get_u64("seed");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory " + out_dir + ": " + ec.message());

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out;
  try {
    out = spec.run(config, out_dir);
  } catch (const Error& e) {
    throw Error(e.kind(), "experiment " + name + ": " + e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Run metadata goes first; wall time lives in timing.json so results stay byte-identical.
  std::vector<std::pair<std::string, Cell>> meta{
      {"experiment", name},
      {"seed", config.raw("seed")},
      {"mcsuite_version", std::string(MCSUITE_VERSION)},
      {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)}};
  meta.insert(meta.end(), out.main.meta.begin(), out.main.meta.end());
  out.main.meta = std::move(meta);

  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "results.csv").string(), to_csv(out.main));
  write_text_file((dir / "results.json").string(), to_json(out.main));
  for (const auto& [stem, table] : out.extras) {
    write_text_file((dir / (stem + ".csv")).string(), to_csv(table));
  }
  write_text_file((dir / "timing.json").string(),
                  "{\"experiment\": \"" + name + "\", \"wall_seconds\": " + fmt("%.6f", wall) + "}\n");
  return out;
}

}  // namespace mcsuite::cli
