#include "mcsuite/gibbs.hpp"
#include "mcsuite/mcmc.hpp"
#include "mcsuite/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mcsuite;

namespace {

GaussianTarget bivariate(double alpha) {
  Mat cov(2, 2);
  cov << 1.0, alpha, alpha, 1.0;
  return GaussianTarget::from_covariance(Vec::Zero(2), cov);
}

Mat random_spd(int d, RngStream& s) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = s.normal();
  return a * a.transpose() + d * Mat::Identity(d, d);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no mcsuite::Error thrown";
  return ErrorKind::kInvalidInput;
}

}  // namespace

TEST(GaussianConditional, MatchesPrecisionFormula) {
  RngStream s(1, 0);
  const Mat h = random_spd(4, s);
  Vec mu(4);
  mu << 1, -2, 0.5, 3;
  const GaussianTarget t(mu, h);
  Vec x(4);
  x << 0.3, 0.1, -1.0, 2.0;
  for (int j = 0; j < 4; ++j) {
    double m = mu(j);
    for (int k = 0; k < 4; ++k)
      if (k != j) m -= h(j, k) * (x(k) - mu(k)) / h(j, j);
    const GaussianConditional g = gaussian_full_conditional(t, j, x);
    EXPECT_NEAR(g.mean, m, 1e-12);
    EXPECT_NEAR(g.variance, 1.0 / h(j, j), 1e-14);
  }
}

TEST(GibbsRun, BivariateMomentsAndLagOneCorrelation) {
  const GaussianTarget t = bivariate(0.9);
  RngStream s(2, 0);
  const ChainTrace tr =
      gibbs_run(gaussian_gibbs_conditionals(t, ScanOrder::kSequential), Vec::Zero(2), 200000, s);
  const Vec x0 = tr.column(0), x1 = tr.column(1);
  EXPECT_NEAR(mean_of(x0), 0.0, 0.05);
  EXPECT_NEAR(variance_of(x0), 1.0, 0.05);
  EXPECT_NEAR(((x0.array() - mean_of(x0)) * (x1.array() - mean_of(x1))).mean(), 0.9, 0.05);
  // The first coordinate is AR(1) with coefficient alpha^2.
  EXPECT_NEAR(autocorrelation(x0, 5).acf(1), 0.81, 0.01);
}

TEST(GibbsRun, RandomScanRecordsEveryUpdate) {
  const GaussianTarget t = bivariate(0.5);
  RngStream s(3, 0);
  const ChainTrace tr =
      gibbs_run(gaussian_gibbs_conditionals(t, ScanOrder::kRandom), Vec::Zero(2), 100000, s);
  EXPECT_EQ(tr.size(), 100000);
  // Each record changes at most one coordinate.
  for (long i = 1; i < 100; ++i) {
    const int changed = (tr.states(i, 0) != tr.states(i - 1, 0)) + (tr.states(i, 1) != tr.states(i - 1, 1));
    EXPECT_LE(changed, 1);
  }
  EXPECT_NEAR(variance_of(tr.column(1)), 1.0, 0.06);
}

TEST(GibbsRun, NonFiniteConditionalDrawIsReported) {
  FullConditionalSet c;
  c.d = 2;
  c.sample_conditional = [](int j, const Vec&, RngStream&) {
    return Vec::Constant(1, j == 1 ? std::nan("") : 0.0);
  };
  RngStream s(4, 0);
  try {
    gibbs_run(c, Vec::Zero(2), 3, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTargetEvaluation);
    EXPECT_NE(std::string(e.what()).find('1'), std::string::npos);
  }
}

TEST(SpectralRadius, BivariateIsAlphaSquared) {
  for (double a : {0.01, 0.5, 0.9, 0.99}) {
    EXPECT_NEAR(gibbs_convergence_rate(bivariate(a)), a * a, 1e-10);
    EXPECT_NEAR(dugs_state(bivariate(a)).rho, a * a, 1e-10);
  }
}

TEST(SpectralRadius, PowerIterationAgreesWithDense) {
  RngStream s(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianTarget t(Vec::Zero(6), random_spd(6, s));
    const Mat b = dugs_state(t).b;
    EXPECT_NEAR(spectral_radius_power(b), spectral_radius_dense(b), 1e-7);
    EXPECT_LT(spectral_radius_dense(b), 1.0);
  }
  // Large dimension goes through power iteration.
  const GaussianTarget big(Vec::Zero(80), random_spd(80, s));
  const double rho = gibbs_convergence_rate(big);
  EXPECT_NEAR(rho, spectral_radius_dense(dugs_state(big).b), 1e-6);
}

TEST(Dugs, SweepMatchesAffineRecursion) {
  RngStream s(6, 0);
  Vec mu(3);
  mu << 1, 2, 3;
  const GaussianTarget t(mu, random_spd(3, s));
  EXPECT_NO_THROW(dugs_run(t, Vec::Zero(3), 500, s, true));
}

TEST(Dugs, NoiseCovarianceIsStationaryIncrement) {
  // (H_L + H_D)^-1 H_D (H_L + H_D)^-T = Sigma - B Sigma B^T.
  RngStream s(7, 0);
  const GaussianTarget t(Vec::Zero(4), random_spd(4, s));
  const DugsState st = dugs_state(t);
  const Mat q = st.noise_transform * t.diag() * st.noise_transform.transpose();
  const Mat expected = t.covariance() - st.b * t.covariance() * st.b.transpose();
  EXPECT_LT((q - expected).norm(), 1e-10);
}

TEST(Dugs, ClosedFormMomentsSatisfyRecursion) {
  RngStream s(8, 0);
  Vec mu(3);
  mu << -1, 0, 1;
  const GaussianTarget t(mu, random_spd(3, s));
  const DugsState st = dugs_state(t);
  const Vec x0 = (Vec(3) << 4, 4, 4).finished();
  auto [m, c] = dugs_moments(t, x0, 0);
  EXPECT_LT((m - x0).norm(), 1e-12);
  EXPECT_LT(c.norm(), 1e-12);
  const Mat q = st.noise_transform * t.diag() * st.noise_transform.transpose();
  for (long n = 0; n < 20; ++n) {
    const auto [mn, cn] = dugs_moments(t, x0, n);
    const auto [mn1, cn1] = dugs_moments(t, x0, n + 1);
    EXPECT_LT((mn1 - (mu + st.b * (mn - mu))).norm(), 1e-10);
    EXPECT_LT((cn1 - (st.b * cn * st.b.transpose() + q)).norm(), 1e-10);
  }
}

TEST(Dugs, EmpiricalMomentsMatchClosedForm) {
  const GaussianTarget t = bivariate(0.9);
  const Vec x0 = (Vec(2) << 3.0, -3.0).finished();
  const long n = 3;
  const auto [m, c] = dugs_moments(t, x0, n);
  const int reps = 20000;
  Vec acc = Vec::Zero(2);
  Mat acc2 = Mat::Zero(2, 2);
  for (int r = 0; r < reps; ++r) {
    RngStream s(9, r);
    const Vec x = dugs_run(t, x0, n, s).first.states.row(n - 1).transpose();
    acc += x;
    acc2 += (x - m) * (x - m).transpose();
  }
  acc /= reps;
  acc2 /= reps;
  EXPECT_NEAR(acc(0), m(0), 4.0 * std::sqrt(c(0, 0) / reps));
  EXPECT_NEAR(acc(1), m(1), 4.0 * std::sqrt(c(1, 1) / reps));
  EXPECT_NEAR(acc2(1, 1), c(1, 1), 0.05 * c(1, 1));
}

TEST(RandomScanKernel, ReversibleAndInvariant) {
  RngStream s(10, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Mat f(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) f(i, j) = 0.05 + s.uniform();
    f /= f.sum();
    const Mat p = exact_random_scan_gibbs_kernel(f);
    Vec pi(6);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) pi(i * 3 + j) = f(i, j);
    for (int a = 0; a < 6; ++a) {
      EXPECT_NEAR(p.row(a).sum(), 1.0, 1e-12);
      for (int b = 0; b < 6; ++b) EXPECT_NEAR(pi(a) * p(a, b), pi(b) * p(b, a), 1e-12);
    }
  }
}

TEST(HammersleyClifford, RecoversBivariateGaussianUpToConstant) {
  const double rho = 0.6, v = 1.0 - rho * rho;
  const auto cond = [&](double value, double given) {
    const double z = value - rho * given;
    return std::exp(-0.5 * z * z / v) / std::sqrt(2.0 * std::numbers::pi * v);
  };
  const auto joint = hammersley_clifford_2d(cond, cond, -12.0, 12.0);
  const auto truth = [&](double a, double b) {
    return std::exp(-0.5 * (a * a - 2 * rho * a * b + b * b) / v) / (2.0 * std::numbers::pi * std::sqrt(v));
  };
  for (auto [a, b] : {std::pair{0.0, 0.0}, {1.0, -0.5}, {-1.2, 0.7}, {2.0, 1.5}}) {
    EXPECT_NEAR(joint(a, b), truth(a, b), 1e-7);
  }
}

TEST(HammersleyClifford, ZeroConditionalIsInconsistent) {
  const auto positive = [](double, double) { return 1.0; };
  const auto vanishing = [](double, double given) { return given > 0.5 ? 0.0 : 1.0; };
  const auto joint = hammersley_clifford_2d(positive, vanishing, 0.0, 1.0);
  EXPECT_EQ(kind_of([&] { joint(0.2, 0.2); }), ErrorKind::kInconsistentConditionals);
}

TEST(SliceSampler, NormalMoments) {
  RngStream s(11, 0);
  const ChainTrace tr = slice_sample_2d([](double x) { return -0.5 * (x - 2.0) * (x - 2.0); }, 0.0,
                                        100000, s);
  const Vec x = tr.column(0);
  EXPECT_NEAR(mean_of(x), 2.0, 0.03);
  EXPECT_NEAR(variance_of(x), 1.0, 0.03);
}

TEST(SliceSampler, BoundedSupportAndUnboundedSlice) {
  RngStream s(12, 0);
  // Beta(2, 2) on [0, 1] with a bracket.
  const auto lf = [](double x) {
    return (x <= 0.0 || x >= 1.0) ? kNegInf : std::log(x) + std::log1p(-x);
  };
  const ChainTrace tr = slice_sample_2d(lf, 0.5, 50000, s, SliceBracket{0.0, 1.0});
  EXPECT_NEAR(mean_of(tr.column(0)), 0.5, 0.01);
  EXPECT_NEAR(variance_of(tr.column(0)), 0.05, 0.003);
  EXPECT_EQ(kind_of([&] { slice_sample_2d([](double) { return 0.0; }, 0.0, 5, s); }),
            ErrorKind::kSliceGeometry);
}
