#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <vector>

namespace mcsuite {

// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 1e-14, int max_iter = 400);

// Adaptive Simpson quadrature; throws kIntegration on a non-finite integrand.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 50);

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);
// Critical value at significance level alpha (Stephens' finite-n correction).
double ks_critical(long n, double alpha = 0.01);

// Bin probabilities of a sample on equal-width bins over [lo, hi]; values
// outside the range are assigned to the end bins.
std::vector<double> histogram_probs(const std::vector<double>& sample, double lo,
                                    double hi, int bins);
std::vector<double> cdf_bin_probs(const std::function<double(double)>& cdf,
                                  double lo, double hi, int bins);
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

double mean_of(const Vec& v);
double variance_of(const Vec& v);  // 1/N plug-in
// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mcsuite
