#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace mcsuite {

enum class ScanOrder { kSequential, kRandom };

// A "coordinate" is an index block; blocks default to singletons.
struct FullConditionalSet {
  int d = 1;
  // Draws the block j given the full current state (the block's own entries
  // are ignored). Returns one value per index in the block.
  std::function<Vec(int block, const Vec& x, RngStream&)> sample_conditional;
  ScanOrder scan = ScanOrder::kSequential;
  std::vector<std::vector<int>> blocks;

  std::vector<std::vector<int>> resolved_blocks() const;
};

// Sequential scan records one state per sweep, random scan one per update.
// log_density_values are filled only when a target is given.
ChainTrace gibbs_run(const FullConditionalSet& conditionals, const Vec& init,
                     long n, RngStream& stream,
                     const TargetDensity* target = nullptr);

struct GaussianConditional {
  double mean;
  double variance;
};

// j is 0-based.
GaussianConditional gaussian_full_conditional(const GaussianTarget& target, int j,
                                              const Vec& x);
FullConditionalSet gaussian_gibbs_conditionals(const GaussianTarget& target,
                                               ScanOrder scan = ScanOrder::kSequential);

struct DugsState {
  Mat b;                // -(H_L + H_D)^-1 H_U
  double rho = 0.0;     // spectral radius of b
  Mat noise_transform;  // (H_L + H_D)^-1
};

DugsState dugs_state(const GaussianTarget& target);

// Deterministic-update Gaussian Gibbs. With validate set, each sweep is
// compared to the affine recursion driven by the realized noise (1e-12).
std::pair<ChainTrace, DugsState> dugs_run(const GaussianTarget& target,
                                          const Vec& init, long n,
                                          RngStream& stream, bool validate = false);

// Mean and covariance after n sweeps from a fixed start x0.
std::pair<Vec, Mat> dugs_moments(const GaussianTarget& target, const Vec& x0, long n);

double gibbs_convergence_rate(const GaussianTarget& target);
double spectral_radius_power(const Mat& b, double tol = 1e-10, int max_iter = 10000);
double spectral_radius_dense(const Mat& b);

// Random-scan Gibbs kernel on a finite grid with joint pmf f(i, j); states are
// indexed i * cols + j.
Mat exact_random_scan_gibbs_kernel(const Mat& f);

// Joint density from the two conditionals; x2 integrals run over [lo2, hi2].
using ConditionalDensity = std::function<double(double value, double given)>;
std::function<double(double, double)> hammersley_clifford_2d(
    const ConditionalDensity& f2_given_1, const ConditionalDensity& f1_given_2,
    double lo2, double hi2, double tol = 1e-10);

struct SliceBracket {
  double lo;
  double hi;
};

ChainTrace slice_sample_2d(const std::function<double(double)>& log_f, double init,
                           long n, RngStream& stream,
                           std::optional<SliceBracket> bracket = std::nullopt);

}  // namespace mcsuite
