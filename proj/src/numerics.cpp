#include "mcsuite/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace mcsuite {

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorKind::kDomain, "bisect_root: no sign change on bracket");
  }
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    throw Error(ErrorKind::kIntegration, "adaptive_simpson: non-finite integrand");
  }
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
    throw Error(ErrorKind::kIntegration, "adaptive_simpson: non-finite integrand");
  }
  // Split into panels first so narrow features are not missed.
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h, hi = (i + 1 == kPanels) ? b : a + (i + 1) * h;
    const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    if (!std::isfinite(flo) || !std::isfinite(fhi) || !std::isfinite(fmid)) {
      throw Error(ErrorKind::kIntegration, "adaptive_simpson: non-finite integrand");
    }
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol / kPanels, max_depth);
  }
  return total;
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical(long n, double alpha) {
  // Asymptotic Kolmogorov quantile c(alpha) = sqrt(-log(alpha/2)/2).
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

std::vector<double> histogram_probs(const std::vector<double>& sample, double lo,
                                    double hi, int bins) {
  std::vector<double> p(bins, 0.0);
  const double w = (hi - lo) / bins;
  for (double x : sample) {
    int b = static_cast<int>(std::floor((x - lo) / w));
    b = std::clamp(b, 0, bins - 1);
    p[b] += 1.0;
  }
  for (double& v : p) v /= static_cast<double>(sample.size());
  return p;
}

std::vector<double> cdf_bin_probs(const std::function<double(double)>& cdf,
                                  double lo, double hi, int bins) {
  std::vector<double> p(bins);
  const double w = (hi - lo) / bins;
  double prev = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double next = (b + 1 == bins) ? 1.0 : cdf(lo + (b + 1) * w);
    p[b] = next - prev;
    prev = next;
  }
  return p;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double mean_of(const Vec& v) { return v.mean(); }

double variance_of(const Vec& v) {
  const double m = v.mean();
  return (v.array() - m).square().mean();
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace mcsuite
