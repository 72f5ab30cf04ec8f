// Acceptance suite: one pass/fail line per criterion.
//
//   mcsuite_acceptance        runs every criterion
//   mcsuite_acceptance 7      runs criterion 7 only
//
// Experiment-level checks go through run_experiment with the default config
// plus overrides; library-level checks use RngStream(kSeed, criterion).

#include "config.hpp"
#include "experiments.hpp"
#include "table.hpp"

#include "mcsuite/annealing.hpp"
#include "mcsuite/core.hpp"
#include "mcsuite/gibbs.hpp"
#include "mcsuite/hmc.hpp"
#include "mcsuite/integration.hpp"
#include "mcsuite/langevin.hpp"
#include "mcsuite/mcmc.hpp"
#include "mcsuite/numerics.hpp"
#include "mcsuite/smc.hpp"
#include "mcsuite/vi_em.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <regex>
#include <string>
#include <vector>

using namespace mcsuite;
using namespace mcsuite::cli;

namespace {

constexpr std::uint64_t kSeed = 20240101;

struct Check {
  bool pass = true;

  void expect(bool ok, const std::string& what) {
    std::printf("  %s %s\n", ok ? "ok:  " : "FAIL:", what.c_str());
    pass = pass && ok;
  }
  void info(const std::string& what) { std::printf("  info: %s\n", what.c_str()); }
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double num(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* l = std::get_if<long>(&c)) return static_cast<double>(*l);
  return std::nan("");
}

std::size_t col(const ResultTable& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw std::runtime_error("no column " + name);
  return static_cast<std::size_t>(it - t.columns.begin());
}

double at(const ResultTable& t, std::size_t row, const std::string& name) {
  return num(t.rows.at(row).at(col(t, name)));
}

double meta(const ResultTable& t, const std::string& key) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return num(v);
  throw std::runtime_error("no meta key " + key);
}

const ResultTable& extra(const ExperimentOutput& o, const std::string& stem) {
  for (const auto& [k, t] : o.extras)
    if (k == stem) return t;
  throw std::runtime_error("no extra table " + stem);
}

std::size_t row_where(const ResultTable& t, const std::string& column, const std::string& value) {
  const std::size_t j = col(t, column);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto* s = std::get_if<std::string>(&t.rows[i][j]);
    if (s && *s == value) return i;
  }
  throw std::runtime_error("no row with " + column + " = " + value);
}

std::size_t row_near(const ResultTable& t, const std::string& column, double value) {
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (std::abs(at(t, i, column) - value) < 1e-12) return i;
  throw std::runtime_error("no row with " + column + " = " + fmt("%g", value));
}

ExperimentOutput run(const std::string& name, int criterion, const std::vector<std::string>& overrides = {},
                     const std::string& tag = "") {
  const ExperimentSpec& spec = find_experiment(name);
  Config c = Config::parse(default_config_text(spec), name);
  for (const auto& o : overrides) c.apply_override(o);
  char dir[64];
  std::snprintf(dir, sizeof dir, "C%02d", criterion);
  const std::filesystem::path out =
      std::filesystem::temp_directory_path() / "mcsuite_acceptance" / dir / (name + tag);
  std::filesystem::create_directories(out);
  return run_experiment(name, c, out.string());
}

Vec random_simplex(int n, RngStream& s) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = 0.01 + s.uniform();
  return v / v.sum();
}

Mat random_stochastic(int n, RngStream& s) {
  Mat p(n, n);
  for (int i = 0; i < n; ++i) p.row(i) = random_simplex(n, s).transpose();
  return p;
}

Mat random_spd(int d, RngStream& s) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = s.normal();
  return a * a.transpose() + Mat::Identity(d, d);
}

double balance_violation(const Vec& f, const Mat& p) {
  double worst = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(p.row(i).sum() - 1.0));
    for (int j = 0; j < f.size(); ++j) worst = std::max(worst, std::abs(f(i) * p(i, j) - f(j) * p(j, i)));
  }
  return worst;
}

Vec scalar(double x) { return Vec::Constant(1, x); }

Vec ar1(double phi, long n, RngStream& s) {
  Vec x(n);
  double v = s.normal() / std::sqrt(1.0 - phi * phi);
  for (long i = 0; i < n; ++i) {
    v = phi * v + s.normal();
    x(i) = v;
  }
  return x;
}

// Quartic plus coupling, so the leapfrog flow is genuinely nonlinear.
Hamiltonian anharmonic(const Mat& m) {
  return Hamiltonian::make(
      [](const Vec& q) { return 0.25 * q.array().pow(4).sum() + 0.5 * q(0) * q(1); },
      [](const Vec& q) -> Vec {
        Vec g = q.array().pow(3);
        g(0) += 0.5 * q(1);
        g(1) += 0.5 * q(0);
        return g;
      },
      m);
}

// ---- criteria -------------------------------------------------------------

bool c01(Check& k) {
  const ExperimentOutput many = run("pi-estimate", 1, {"replications=10000"});
  const double cov = meta(many.main, "coverage");
  k.expect(cov >= 0.935 && cov <= 0.965, fmt("coverage %.4f in [0.935, 0.965]", cov));

  const ExperimentOutput one = run("pi-estimate", 1, {"replications=1"}, "-single");
  const std::regex shape(R"(pi_hat = \d\.\d{4}, 95% CI \(\d\.\d{4}, \d\.\d{4}\))");
  k.expect(std::regex_search(one.summary, shape), "summary shape: " + one.summary);
  k.expect(one.main.columns == std::vector<std::string>{"estimate", "ci_lo", "ci_hi", "hits"},
           "columns estimate,ci_lo,ci_hi,hits");
  const double est = at(one.main, 0, "estimate");
  k.expect(at(one.main, 0, "ci_lo") < est && est < at(one.main, 0, "ci_hi"), "ci_lo < estimate < ci_hi");
  return k.pass;
}

bool c02(Check& k) {
  const ExperimentOutput o = run("rejection-beta", 2);
  const double rate = at(o.main, 0, "acceptance_rate");
  k.expect(rate >= 0.657 && rate <= 0.677, fmt("acceptance %.5f in [0.657, 0.677]", rate));
  const double ks = at(o.main, 0, "ks_statistic"), crit = at(o.main, 0, "ks_critical_1pct");
  k.expect(ks < crit, fmt("KS %.5f < critical %.5f", ks, crit));
  return k.pass;
}

bool c03(Check& k) {
  const ExperimentOutput o = run("abc-betabinom", 3, {"tolerances=[0.01, 0.05]"});
  const std::size_t tight = row_near(o.main, "tolerance", 0.01), loose = row_near(o.main, "tolerance", 0.05);
  const double tv_t = at(o.main, tight, "tv"), tv_l = at(o.main, loose, "tv");
  const double sim_t = at(o.main, tight, "simulations"), sim_l = at(o.main, loose, "simulations");
  k.expect(tv_t < tv_l, fmt("TV %.4f (eps 0.01) < %.4f (eps 0.05)", tv_t, tv_l));
  k.expect(sim_t > sim_l, fmt("simulations %.0f (eps 0.01) > %.0f (eps 0.05)", sim_t, sim_l));
  return k.pass;
}

bool c04(Check& k) {
  const ExperimentOutput o = run("is-gaussian-tail", 4);
  const std::size_t is = row_where(o.main, "method", "is"), mc = row_where(o.main, "method", "mc");
  const double rel = at(o.main, is, "rel_error"), mean_rel = at(o.main, is, "mean_rel_error");
  k.expect(rel <= 0.1, fmt("IS relative error %.5f <= 0.1", rel));
  k.expect(mean_rel <= 0.1, fmt("IS mean relative error over replications %.5f <= 0.1", mean_rel));
  const double zero = at(o.main, mc, "zero_fraction");
  k.expect(zero >= 0.99, fmt("MC zero fraction %.4f >= 0.99", zero));
  const double p = at(o.main, mc, "oracle");
  k.info(fmt("exact P(MC returns 0) = (1 - %.4g)^1e4 = %.4f", p, std::pow(1.0 - p, 1e4)));
  return k.pass;
}

bool c05(Check& k) {
  // f~ = 7 f on three states, g uniform, h bounded by 1.
  const Vec f = (Vec(3) << 0.2, 0.5, 0.3).finished();
  const Vec h = (Vec(3) << 1.0, -1.0, 0.5).finished();
  const double truth = f.dot(h);
  const double zeta = 3.0 * f.squaredNorm();
  k.info(fmt("I = %.4f, zeta = %.4f", truth, zeta));
  RngStream s(kSeed, 5);
  const long reps = 100000;
  for (int n : {5, 10, 20}) {
    double sum = 0.0, sq = 0.0;
    Vec hv(n), lw(n);
    for (long r = 0; r < reps; ++r) {
      for (int i = 0; i < n; ++i) {
        const auto x = static_cast<int>(s.below(3));
        hv(i) = h(x);
        lw(i) = std::log(7.0 * f(x)) - std::log(1.0 / 3.0);
      }
      const double e = ais_from_log_weights(hv, lw, 0.05, 1.0).estimate.value - truth;
      sum += e;
      sq += e * e;
    }
    const double bias = std::abs(sum / reps), mse = sq / reps;
    k.expect(bias <= 2.0 * zeta / n, fmt("N=%d: |bias| %.5f <= 2 zeta/N = %.4f", n, bias, 2.0 * zeta / n));
    k.expect(mse <= 4.0 * zeta / n, fmt("N=%d: MSE %.5f <= 4 zeta/N = %.4f", n, mse, 4.0 * zeta / n));
  }
  return k.pass;
}

bool c06(Check& k) {
  RngStream s(kSeed, 6);
  double mh = 0.0, gibbs = 0.0, swap = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 4;
    const Vec f = random_simplex(n, s);
    mh = std::max(mh, balance_violation(f, exact_mh_kernel(f, random_stochastic(n, s))));

    Mat joint(2, 2);
    const Vec flat = random_simplex(4, s);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) joint(i, j) = flat(i * 2 + j);
    gibbs = std::max(gibbs, balance_violation(flat, exact_random_scan_gibbs_kernel(joint)));

    const Vec base = random_simplex(2, s);
    const double bl = 0.05 + 0.95 * s.uniform(), bm = 0.05 + 0.95 * s.uniform();
    Vec pair(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) pair(i * 2 + j) = std::pow(base(i), bl) * std::pow(base(j), bm);
    pair /= pair.sum();
    swap = std::max(swap, balance_violation(pair, exact_swap_kernel(base, bl, bm)));
  }
  k.expect(mh <= 1e-12, fmt("MH kernels: max violation %.2e <= 1e-12", mh));
  k.expect(gibbs <= 1e-12, fmt("random-scan Gibbs kernels: max violation %.2e <= 1e-12", gibbs));
  k.expect(swap <= 1e-12, fmt("PT swap kernels: max violation %.2e <= 1e-12", swap));
  return k.pass;
}

bool c07(Check& k) {
  const TargetDensity target = fixtures::beta_target(2.0, 2.0);
  const ProposalKernel kernel = independence_kernel(fixtures::uniform01_proposal());
  const double m = 1.5;
  RngStream s(kSeed, 7);
  const ChainTrace chain = mh_run(target, kernel, scalar(0.5), 200000, s);
  k.expect(chain.acceptance_rate() >= 1.0 / m,
           fmt("stationary acceptance %.4f >= 1/M = %.4f", chain.acceptance_rate(), 1.0 / m));

  // x0 = 1/2 maximizes f/g, the slowest start.
  const long reps = 100000;
  const LogDensityFn log_f = [&](const Vec& x) { return target.log_prob(x); };
  std::vector<Vec> x(reps, scalar(0.5));
  std::vector<double> lf(reps, target.log_prob(scalar(0.5)));
  const std::vector<double> exact =
      cdf_bin_probs([](double v) { return v * v * (3.0 - 2.0 * v); }, 0.0, 1.0, 20);
  double se = 0.0;
  for (double p : exact) se += 0.5 * std::sqrt(p * (1.0 - p) / reps);
  std::vector<double> xs(reps);
  for (int n = 1; n <= 10; ++n) {
    for (long r = 0; r < reps; ++r) {
      MhStep st = mh_step(log_f, kernel, x[r], lf[r], s, n - 1);
      x[r] = std::move(st.state);
      lf[r] = st.log_density;
      xs[r] = x[r](0);
    }
    const double tv = total_variation(histogram_probs(xs, 0.0, 1.0, 20), exact);
    const double bound = std::pow(1.0 - 1.0 / m, n) + 3.0 * se;
    k.expect(tv <= bound, fmt("n=%.0f: TV %.5f <= (1-1/M)^n + 3 SE = %.5f", n, tv, bound));
  }
  return k.pass;
}

bool c08(Check& k) {
  const ExperimentOutput o = run("rwmh-scaling", 8);
  const std::size_t mid = row_near(o.main, "sigma2", 2.4);
  const double acc = at(o.main, mid, "acceptance");
  k.expect(std::abs(acc - 0.44) <= 0.03, fmt("acceptance at sigma^2 = 2.4: %.4f in 0.44 +- 0.03", acc));
  k.info(fmt("closed-form acceptance at sigma^2 = 2.4: %.4f", at(o.main, mid, "predicted")));
  bool dec = true;
  for (std::size_t i = 1; i < o.main.rows.size(); ++i)
    dec = dec && at(o.main, i, "acceptance") < at(o.main, i - 1, "acceptance");
  k.expect(dec, fmt("acceptance strictly decreasing: %.4f > %.4f > %.4f", at(o.main, 0, "acceptance"), acc,
                    at(o.main, 2, "acceptance")));
  const ExperimentOutput sd = run("rwmh-scaling", 8, {"sigma2=[5.76]"}, "-sd2.4");
  k.info(fmt("acceptance with standard deviation 2.4 (sigma^2 = 5.76): %.4f", at(sd.main, 0, "acceptance")));
  return k.pass;
}

bool c09(Check& k) {
  const auto target = [](double a) {
    Mat c(2, 2);
    c << 1.0, a, a, 1.0;
    return GaussianTarget::from_covariance(Vec::Zero(2), c);
  };
  for (double a : {0.01, 0.5, 0.9, 0.99}) {
    const GaussianTarget t = target(a);
    const double rho = gibbs_convergence_rate(t);
    const double power = spectral_radius_power(dugs_state(t).b);
    k.expect(std::abs(rho - a * a) <= 1e-10 && std::abs(power - a * a) <= 1e-10,
             fmt("alpha=%.2f: rho(B) %.12f, power iteration %.12f", a, rho, power) + fmt(" vs %.12f", a * a));
  }

  const double a = 0.9, rho = a * a;
  const GaussianTarget t = target(a);
  const FullConditionalSet conds = gaussian_gibbs_conditionals(t, ScanOrder::kSequential);
  const Vec x0 = (Vec(2) << 3.0, -3.0).finished();
  const int sweeps = 8;
  const long chains = 10000;
  std::vector<Vec> sum(sweeps, Vec::Zero(2));
  std::vector<Mat> outer(sweeps, Mat::Zero(2, 2));
  RngStream s(kSeed, 9);
  for (long c = 0; c < chains; ++c) {
    const ChainTrace tr = gibbs_run(conds, x0, sweeps, s);
    for (int n = 0; n < sweeps; ++n) {
      const Vec x = tr.states.row(n).transpose();
      sum[n] += x;
      outer[n] += x * x.transpose();
    }
  }
  std::vector<double> ns, log_cov, log_mean, log_exact;
  for (int n = 0; n < 5; ++n) {
    const Vec mean = sum[n] / chains;
    const Mat cov = outer[n] / chains - mean * mean.transpose();
    ns.push_back(n + 1);
    log_cov.push_back(std::log((cov - t.covariance()).norm()));
    log_mean.push_back(std::log((mean - t.mean()).norm()));
    log_exact.push_back(std::log((dugs_moments(t, x0, n + 1).second - t.covariance()).norm()));
  }
  const double ratio = std::exp(ls_slope(ns, log_cov));
  k.expect(std::abs(ratio / rho - 1.0) <= 0.15,
           fmt("covariance error decay ratio %.4f within 15%% of rho(B) = %.4f", ratio, rho));
  k.info(fmt("mean error decay ratio %.4f; closed-form covariance error ratio %.4f (rho^2 = %.4f)",
             std::exp(ls_slope(ns, log_mean)), std::exp(ls_slope(ns, log_exact)), rho * rho));
  return k.pass;
}

bool c10(Check& k) {
  const ExperimentOutput o = run("ula-bias", 10);
  const std::size_t r = row_near(o.main, "eps", 0.1);
  const double emp = at(o.main, r, "empirical_var"), limit = 1.0 / (1.0 - 0.1 / 2.0);
  k.expect(std::abs(emp / limit - 1.0) <= 0.02, fmt("eps=0.1: variance %.5f within 2%% of %.5f", emp, limit));

  // Closed-form law against the mean/covariance recursion.
  RngStream s(kSeed, 10);
  const GaussianTarget g(standard_normal_vector(s, 3), random_spd(3, s));
  const double eps = 0.05, s0 = 0.7;
  const Vec mu0 = standard_normal_vector(s, 3);
  const Mat a = Mat::Identity(3, 3) - eps * g.precision();
  Vec mu = mu0;
  Mat sig = s0 * Mat::Identity(3, 3);
  double worst = 0.0;
  for (long n = 1; n <= 60; ++n) {
    mu = a * (mu - g.mean()) + g.mean();
    sig = a * sig * a.transpose() + 2.0 * eps * Mat::Identity(3, 3);
    const GaussianMoments m = ula_gaussian_moments(g, mu0, s0, eps, n);
    worst = std::max({worst, (m.mean - mu).cwiseAbs().maxCoeff(), (m.cov - sig).cwiseAbs().maxCoeff()});
  }
  k.expect(worst <= 1e-10, fmt("closed-form moments vs recursion: max error %.2e <= 1e-10", worst));

  double lo = kInf, hi = 0.0;
  for (std::size_t i = 0; i < o.main.rows.size(); ++i) {
    lo = std::min(lo, at(o.main, i, "w2_over_eps"));
    hi = std::max(hi, at(o.main, i, "w2_over_eps"));
  }
  k.expect(hi / lo - 1.0 <= 0.2, fmt("W2 floor / eps spread %.4f .. %.4f within 20%%", lo, hi));
  return k.pass;
}

bool c11(Check& k) {
  const ExperimentOutput o = run("mala-vs-ula", 11);
  const std::size_t mala = row_where(o.main, "method", "mala"), ula = row_where(o.main, "method", "ula");
  const double zm = std::abs(at(o.main, mala, "mean")) / at(o.main, mala, "se_mean");
  const double zv = std::abs(at(o.main, mala, "variance") - 1.0) / at(o.main, mala, "se_variance");
  k.expect(zm <= 3.0, fmt("MALA N(0,1) mean within %.2f SE", zm));
  k.expect(zv <= 3.0, fmt("MALA N(0,1) variance within %.2f SE", zv));
  const double uv = at(o.main, ula, "variance"), use = at(o.main, ula, "se_variance");
  const double expected = at(o.main, ula, "expected_variance");
  k.expect(std::abs(uv - expected) <= 3.0 * use,
           fmt("ULA variance %.5f within 3 SE of the predicted %.5f", uv, expected));
  k.expect(uv > 1.0 + 3.0 * use, fmt("ULA variance %.5f inflated above 1", uv));

  // Correlated 2-d target, one MALA step from exact draws.
  Mat cov(2, 2);
  cov << 1.0, 0.6, 0.6, 2.0;
  const GaussianTarget g = GaussianTarget::from_covariance((Vec(2) << 1.0, -0.5).finished(), cov);
  const TargetDensity target = g.as_target();
  LangevinConfig lc;
  lc.step = 0.5;
  lc.n = 1;
  const long reps = 100000;
  RngStream s(kSeed, 11);
  Mat y(reps, 2);
  for (long r = 0; r < reps; ++r) y.row(r) = mala_run(target, lc, g.sample(s), s).states.row(0);
  const auto within = [&](const Vec& v, double truth, const std::string& what) {
    const double m = mean_of(v), se = std::sqrt(variance_of(v) / reps);
    k.expect(std::abs(m - truth) <= 3.0 * se,
             "2-d MALA " + what + fmt(" %.5f vs %.5f (%.2f SE)", m, truth, std::abs(m - truth) / se));
  };
  const Vec d0 = y.col(0).array() - 1.0, d1 = y.col(1).array() + 0.5;
  within(y.col(0), 1.0, "mean[0]");
  within(y.col(1), -0.5, "mean[1]");
  within(d0.array().square(), 1.0, "var[0]");
  within(d1.array().square(), 2.0, "var[1]");
  within(d0.cwiseProduct(d1), 0.6, "cov[0,1]");
  return k.pass;
}

bool c12(Check& k) {
  Mat mass(2, 2);
  mass << 2.0, 0.3, 0.3, 1.0;
  const Hamiltonian h = anharmonic(mass);
  const PhasePoint x{(Vec(2) << 0.7, -1.1).finished(), (Vec(2) << 0.4, 0.9).finished()};
  PhasePoint y = leapfrog(h, x, 0.1, 50);
  y.p = -y.p;
  const PhasePoint back = leapfrog(h, y, 0.1, 50);
  const double rev = std::max((back.q - x.q).cwiseAbs().maxCoeff(), (back.p + x.p).cwiseAbs().maxCoeff());
  k.expect(rev <= 1e-9, fmt("reversibility error %.2e <= 1e-9", rev));

  const Vec z0 = (Vec(4) << 0.3, -0.8, 1.2, 0.1).finished();
  const auto map = [&](const Vec& z) {
    const PhasePoint p = leapfrog(h, PhasePoint{z.head(2), z.tail(2)}, 0.2, 7);
    Vec out(4);
    out << p.q, p.p;
    return out;
  };
  Mat jac(4, 4);
  const double d = 1e-6;
  for (int j = 0; j < 4; ++j) {
    Vec a = z0, b = z0;
    a(j) += d;
    b(j) -= d;
    jac.col(j) = (map(a) - map(b)) / (2.0 * d);
  }
  k.expect(std::abs(std::abs(jac.determinant()) - 1.0) <= 1e-6,
           fmt("|det J| = %.10f within 1e-6 of 1", std::abs(jac.determinant())));

  const Hamiltonian h1 = anharmonic(Mat::Identity(2, 2));
  const PhasePoint x1{(Vec(2) << 1.0, 0.5).finished(), (Vec(2) << -0.3, 0.8).finished()};
  std::vector<double> le, lerr;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const PhasePoint e = leapfrog(h1, x1, eps, static_cast<int>(std::lround(2.0 / eps)));
    le.push_back(std::log(eps));
    lerr.push_back(std::log(std::abs(h1.energy(e) - h1.energy(x1))));
  }
  const double slope = ls_slope(le, lerr);
  k.expect(std::abs(slope - 2.0) <= 0.1, fmt("energy error log-log slope %.4f in 2 +- 0.1", slope));

  RngStream s(kSeed, 12);
  const GaussianTarget g(Vec::Zero(10), random_spd(10, s));
  const Hamiltonian hq = Hamiltonian::quadratic(g.precision(), Mat::Identity(10, 10));
  const ChainTrace exact = hmc_run(hq, 0.1, 13, 5000, Vec::Zero(10), s,
                                   [](const Hamiltonian& hh, const PhasePoint& p) {
                                     return exact_quadratic_flow(hh, p, 1.3);
                                   });
  k.expect(exact.acceptance_rate() == 1.0, fmt("exact-flow HMC acceptance %.6f == 1", exact.acceptance_rate()));

  const ExperimentOutput o = run("hmc-gaussian", 12);
  double worst_m = 0.0, worst_v = 0.0;
  for (std::size_t i = 0; i < o.main.rows.size(); ++i) {
    worst_m = std::max(worst_m, std::abs(at(o.main, i, "mean")) / at(o.main, i, "se_mean"));
    worst_v = std::max(worst_v, std::abs(at(o.main, i, "variance") - 1.0) / at(o.main, i, "se_variance"));
  }
  k.expect(o.main.rows.size() == 10, "HMC on N(0, I_10)");
  k.expect(worst_m <= 3.0, fmt("HMC means: worst %.2f SE", worst_m));
  k.expect(worst_v <= 3.0, fmt("HMC variances: worst %.2f SE", worst_v));
  return k.pass;
}

bool c13(Check& k) {
  const ExperimentOutput o = run("sa-doublewell", 13);
  const double ok = meta(o.main, "successes");
  k.expect(ok >= 95, fmt("%.0f of 100 runs within 0.05 of the global minimizer", ok));
  const ResultTable& trap = extra(o, "trap");
  const double stuck = at(trap, 0, "fraction_at_start");
  k.expect(stuck >= 0.999, fmt("beta=50: fraction of time at the local maximum 4 is %.4f", stuck));
  k.info(fmt("per-step escape probability from 4 at beta=50: 0.5 (1/3)^50 = %.3g", 0.5 * std::pow(1.0 / 3.0, 50)));
  const ExperimentOutput warm = run("sa-doublewell", 13, {"trap_beta=1"}, "-beta1");
  const double free = at(extra(warm, "trap"), 0, "fraction_at_start");
  k.expect(free <= 0.5, fmt("beta=1 contrast: fraction at 4 is %.4f (stationary 0.3)", free));
  return k.pass;
}

bool c14(Check& k) {
  const ExperimentOutput o = run("tempering-doublewell", 14);
  for (const char* m : {"parallel_tempering", "simulated_tempering"}) {
    const std::size_t r = row_where(o.main, "method", m);
    const double l = at(o.main, r, "left_frac"), rr = at(o.main, r, "right_frac");
    k.expect(l >= 0.2 && rr >= 0.2, std::string(m) + fmt(": mode occupancy %.3f / %.3f >= 0.2", l, rr));
  }
  const double fail = meta(o.main, "rwmh_failure_fraction");
  k.expect(fail >= 0.8, fmt("plain RWMH fails on %.0f%% of seeds (>= 80%%)", 100.0 * fail));
  k.info(fmt("PT swap acceptance %.3f", meta(o.main, "pt_swap_acceptance")));

  RngStream s(kSeed, 14);
  bool all_one = true;
  for (int t = 0; t < 1000; ++t) {
    const double b = 0.01 + s.uniform();
    const double a = std::exp(pt_swap_log_acceptance(b, b, 10.0 * s.normal(), 10.0 * s.normal()));
    all_one = all_one && a == 1.0;
  }
  k.expect(all_one, "equal-temperature swap acceptance is exactly 1 on 1000 random pairs");
  const Vec f = random_simplex(3, s);
  const Mat p = exact_swap_kernel(f, 0.4, 0.4);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(p(i * 3 + j, j * 3 + i) - 1.0));
  k.expect(worst <= 1e-12, fmt("equal-temperature swap kernel is the swap permutation (%.1e)", worst));
  return k.pass;
}

bool c15(Check& k) {
  const ExperimentOutput o = run("pf-linear-gaussian", 15);
  const double slope = meta(o.main, "rmse_loglog_slope");
  k.expect(std::abs(slope + 0.5) <= 0.1, fmt("bootstrap RMSE log-log slope %.4f in -0.5 +- 0.1", slope));
  for (std::size_t i = 0; i < o.main.rows.size(); ++i) {
    const double ge = at(o.main, i, "optimal_ess_ge_bootstrap");
    k.expect(ge >= 0.9, fmt("N=%.0f: optimal ESS >= bootstrap ESS in %.1f%% of steps", at(o.main, i, "N"),
                            100.0 * ge));
  }

  RngStream s(kSeed, 15);
  const double kappa = 0.5;
  double pred = -kInf, anal = -kInf;
  for (int t = 0; t < 1000; ++t) {
    const Vec a = random_simplex(5, s), b = random_simplex(5, s);
    const Mat p = random_stochastic(5, s);
    pred = std::max(pred, discrete_distance(discrete_predict(a, p), discrete_predict(b, p)) -
                              discrete_distance(a, b));
    Vec g(5);
    for (int i = 0; i < 5; ++i) g(i) = kappa + (1.0 / kappa - kappa) * s.uniform();
    anal = std::max(anal, discrete_distance(discrete_analyze(a, g), discrete_analyze(b, g)) -
                              2.0 / (kappa * kappa) * discrete_distance(a, b));
  }
  k.expect(pred <= 1e-14, fmt("prediction contracts: max d(Pa, Pb) - d(a, b) = %.2e", pred));
  k.expect(anal <= 1e-14, fmt("analysis: max d(La, Lb) - (2/kappa^2) d(a, b) = %.2e", anal));

  // Var_pi(h) = 1 - pi(h)^2 for h in {-1, 1}^5; the sup over |h| <= 1 sits at a vertex.
  const Vec pi = random_simplex(5, s);
  Vec worst_h;
  double worst_var = -1.0;
  for (int mask = 0; mask < 32; ++mask) {
    Vec h(5);
    for (int i = 0; i < 5; ++i) h(i) = (mask >> i & 1) ? 1.0 : -1.0;
    const double v = 1.0 - std::pow(pi.dot(h), 2);
    if (v > worst_var) {
      worst_var = v;
      worst_h = h;
    }
  }
  for (long n : {10L, 100L, 1000L}) {
    const double exact = std::sqrt(worst_var / n);
    k.expect(exact <= 1.0 / std::sqrt(static_cast<double>(n)) + 1e-15,
             fmt("N=%.0f: sampling error %.5f <= 1/sqrt(N) = %.5f", n, exact, 1.0 / std::sqrt(n)));
  }
  double sq = 0.0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) sq += std::pow(discrete_sample(pi, 100, s).dot(worst_h) - pi.dot(worst_h), 2);
  k.info(fmt("N=100 sampling error: Monte Carlo %.5f vs exact %.5f", std::sqrt(sq / reps),
             std::sqrt(worst_var / 100.0)));
  return k.pass;
}

bool c16(Check& k) {
  RngStream s(kSeed, 16);
  double ident = 0.0, fixed = 0.0;
  bool monotone = true;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 4;
    const GaussianTarget f(standard_normal_vector(s, d), random_spd(d, s));
    Vec s2(d);
    for (int i = 0; i < d; ++i) s2(i) = 0.1 + 2.0 * s.uniform();
    const MeanFieldGaussian g{standard_normal_vector(s, d), s2};
    const double log_c = s.normal();
    ident = std::max(ident, std::abs(elbo_exact(g, f, log_c) -
                                     (log_c - gaussian_kl(g.m, Mat(g.s2.asDiagonal()), f.mean(), f.covariance()))));

    const GaussianCaviResult r = cavi_gaussian(f, g, 100000);
    fixed = std::max(fixed, (r.g.m - f.mean()).cwiseAbs().maxCoeff());
    for (int i = 0; i < d; ++i) fixed = std::max(fixed, std::abs(1.0 / r.g.s2(i) - f.precision()(i, i)));
    for (std::size_t e = 1; e < r.elbo.size(); ++e) monotone = monotone && r.elbo[e] >= r.elbo[e - 1] - 1e-12;
  }
  k.expect(ident <= 1e-8, fmt("ELBO = log c - KL: max error %.2e", ident));
  k.expect(fixed <= 1e-8, fmt("CAVI fixed point (means, precisions): max error %.2e", fixed));
  k.expect(monotone, "ELBO nondecreasing after every coordinate update");

  const ExperimentOutput o = run("cavi-gaussian", 16);
  double var_err = 0.0, marg_err = 0.0;
  for (std::size_t i = 0; i < o.main.rows.size(); ++i) {
    var_err = std::max(var_err, std::abs(at(o.main, i, "variance") - 0.5));
    marg_err = std::max(marg_err, std::abs(at(o.main, i, "marginal_variance") - 2.0 / 3.0));
  }
  k.expect(var_err <= 1e-12 && marg_err <= 1e-12,
           fmt("d=2: mean-field variance 1/2 vs marginal 2/3 (errors %.1e, %.1e)", var_err, marg_err));
  return k.pass;
}

bool c17(Check& k) {
  const ExperimentOutput o = run("em-multinomial", 17);
  const ResultTable& t = o.main;
  double worst = 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    worst = std::max(worst, at(t, i - 1, "loglik") - at(t, i, "loglik"));
  k.expect(worst <= 1e-10, fmt("log-likelihood nondecreasing (largest drop %.2e)", worst));

  const std::array<long, 4> y{125, 18, 20, 34};
  const auto ll = [&](double th) { return dempster_log_likelihood(y, th); };
  double best = 0.5;
  for (int i = 1; i < 10000; ++i)
    if (ll(i * 1e-4) > ll(best)) best = i * 1e-4;
  const double lo = best - 1e-4;
  for (int i = 0; i <= 20000; ++i)
    if (ll(lo + i * 1e-8) > ll(best)) best = lo + i * 1e-8;
  const double em = at(t, t.rows.size() - 1, "theta");
  k.expect(std::abs(em - best) <= 1e-6, fmt("EM fixed point %.9f vs grid argmax %.9f", em, best));

  double gap = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    gap = std::max(gap, std::abs(at(t, i, "theta_mc") - at(t, i, "theta")));
  k.expect(gap <= 0.01, fmt("Monte Carlo EM path within %.5f of the closed-form path", gap));
  return k.pass;
}

bool c18(Check& k) {
  RngStream s(kSeed, 18);
  const long n = 100000;
  Vec iid(n);
  for (long i = 0; i < n; ++i) iid(i) = s.normal();
  const double iat_iid = autocorrelation(iid, 1000).iat;
  k.expect(std::abs(iat_iid - 1.0) <= 0.1, fmt("IAT on iid draws %.4f in 1 +- 0.1", iat_iid));
  const double iat_ar = autocorrelation(ar1(0.5, n, s), 1000).iat;
  k.expect(std::abs(iat_ar - 3.0) <= 0.3, fmt("IAT on AR(1) phi=0.5 %.4f in 3 +- 0.3", iat_ar));

  int inside = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) inside += std::abs(geweke(ar1(0.5, 10000, s))) <= 1.96;
  const double cover = static_cast<double>(inside) / reps;
  k.expect(std::abs(cover - 0.95) <= 0.03, fmt("Geweke |z| <= 1.96 in %.3f of stationary runs", cover));

  std::vector<Vec> matched, split;
  for (int c = 0; c < 4; ++c) {
    matched.push_back(ar1(0.5, 2000, s));
    split.push_back(ar1(0.5, 2000, s).array() + (c % 2 ? 5.0 : -5.0));
  }
  const double r_matched = gelman_rubin(matched).r, r_split = gelman_rubin(split).r;
  k.expect(r_matched < 1.1, fmt("Gelman-Rubin R %.4f < 1.1 on matched chains", r_matched));
  k.expect(r_split > 2.0, fmt("Gelman-Rubin R %.4f > 2 on mode-separated chains", r_split));
  return k.pass;
}

struct Criterion {
  const char* desc;
  double limit_s;
  bool (*fn)(Check&);
};

const Criterion kCriteria[] = {
    {"pi estimation coverage and output shape", 5, c01},
    {"rejection sampling of Beta(2,2)", 2, c02},
    {"ABC tolerance trade-off", 30, c03},
    {"importance sampling of a Gaussian tail", 2, c04},
    {"autonormalized IS bias and MSE bounds", 30, c05},
    {"detailed balance of exact kernels", 5, c06},
    {"independence sampler acceptance and TV decay", 60, c07},
    {"random-walk MH scaling", 5, c08},
    {"Gaussian Gibbs convergence rate", 60, c09},
    {"ULA bias", 30, c10},
    {"MALA exactness", 10, c11},
    {"leapfrog and HMC", 60, c12},
    {"simulated annealing", 30, c13},
    {"parallel and simulated tempering", 120, c14},
    {"particle filters", 120, c15},
    {"variational inference", 5, c16},
    {"EM", 30, c17},
    {"MCMC diagnostics", 30, c18},
};

bool run_one(int i) {
  const Criterion& c = kCriteria[i - 1];
  std::printf("C%02d %s\n", i, c.desc);
  Check k;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.fn(k);
  } catch (const std::exception& e) {
    k.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  k.expect(secs < c.limit_s, fmt("runtime %.2f s < %.0f s", secs, c.limit_s));
  std::printf("[%s] C%02d %s (%.2f s)\n", k.pass ? "PASS" : "FAIL", i, c.desc, secs);
  std::fflush(stdout);
  return k.pass;
}

}  // namespace

int main(int argc, char** argv) {
  constexpr int count = static_cast<int>(std::size(kCriteria));
  if (argc > 2) {
    std::fprintf(stderr, "usage: %s [criterion 1..%d]\n", argv[0], count);
    return 2;
  }
  if (argc == 2) {
    const int i = std::atoi(argv[1]);
    if (i < 1 || i > count) {
      std::fprintf(stderr, "criterion must be in 1..%d\n", count);
      return 2;
    }
    return run_one(i) ? 0 : 1;
  }
  int failed = 0;
  for (int i = 1; i <= count; ++i) failed += !run_one(i);
  std::printf("%d of %d criteria passed\n", count - failed, count);
  return failed ? 1 : 0;
}
