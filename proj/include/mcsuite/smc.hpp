#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mcsuite {

// X_{j+1} = a(X_j) + xi, Y_{j+1} = b(X_{j+1}) + eta, xi ~ N(0, Sigma), eta ~ N(0, Gamma).
struct HmmModel {
  int d = 1;
  int k = 1;
  std::function<Vec(const Vec&)> a;
  std::function<Vec(const Vec&)> b;
  std::optional<Mat> a_matrix;  // linear dynamics
  std::optional<Mat> h;         // linear observation
  Mat sigma;
  Mat gamma;
  std::function<Vec(RngStream&)> f0;
  std::optional<Vec> m0;  // Gaussian prior on X_0, for the Kalman filter
  std::optional<Mat> p0;

  void validate() const;
};

HmmModel linear_gaussian_model(const Mat& a, const Mat& h, const Mat& sigma,
                               const Mat& gamma, const Vec& m0, const Mat& p0);

struct HmmPath {
  Mat x;  // (J+1) x d, row 0 is X_0
  Mat y;  // J x k, row j-1 is Y_j
};

HmmPath simulate_hmm(const HmmModel& model, long j, RngStream& stream);

enum class ResampleScheme { kMultinomial, kSystematic };

struct PfOptions {
  ResampleScheme scheme = ResampleScheme::kMultinomial;
  // Resample only when ESS < ess_threshold * N; weights carry over otherwise.
  bool ess_triggered = false;
  double ess_threshold = 0.5;
};

// Index j-1 holds step j = 1..J.
struct FilterOutput {
  std::vector<WeightedEnsemble> weighted;
  std::vector<Mat> resampled;
  std::vector<double> ess;
  std::vector<Vec> means;
  std::vector<Mat> covs;
};

FilterOutput bootstrap_pf(const HmmModel& model, const Mat& y, long n,
                          const RngStream& stream, const PfOptions& options = {});
FilterOutput optimal_pf(const HmmModel& model, const Mat& y, long n,
                        const RngStream& stream, const PfOptions& options = {});

struct KalmanOutput {
  std::vector<Vec> means;
  std::vector<Mat> covs;
};

KalmanOutput kalman_filter(const HmmModel& model, const Mat& y);

std::vector<long> resample_indices(const Vec& weights, long n, ResampleScheme scheme,
                                   RngStream& stream);
Mat resample(const WeightedEnsemble& ensemble, ResampleScheme scheme, RngStream& stream);

// Finite-state analogs of the prediction, analysis and sampling operators.
Vec discrete_predict(const Vec& pi, const Mat& kernel);
Vec discrete_analyze(const Vec& pi, const Vec& likelihood);
Vec discrete_sample(const Vec& pi, long n, RngStream& stream);
// sup over |h| <= 1 of |pi(h) - pi'(h)|, i.e. the L1 distance.
double discrete_distance(const Vec& p, const Vec& q);

void write_observations_csv(const std::string& path, const Mat& y);
Mat read_observations_csv(const std::string& path);

}  // namespace mcsuite
