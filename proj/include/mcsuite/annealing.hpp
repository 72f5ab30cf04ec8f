#pragma once

#include "mcsuite/core.hpp"
#include "mcsuite/mcmc.hpp"

#include <functional>
#include <vector>

namespace mcsuite {

enum class ScheduleKind { kLogarithmic, kGeometric, kExplicit };

struct TemperatureSchedule {
  ScheduleKind kind = ScheduleKind::kGeometric;
  double beta0 = 1.0;
  double alpha = 1.01;
  std::vector<double> list;

  void validate() const;
  // Logarithmic: log(1+n)/beta0. Geometric: alpha^n beta0.
  double beta(long n) const;
};

struct AnnealingResult {
  ChainTrace trace;
  Vec best_x;
  double best_v = kInf;
};

// The move from X^(n) uses beta(n+1). Shares mh_step, so a constant schedule
// reproduces mh_run on exp(-beta V) draw for draw.
AnnealingResult simulated_annealing(const std::function<double(const Vec&)>& v,
                                    const ProposalKernel& kernel,
                                    const TemperatureSchedule& schedule, const Vec& init,
                                    long n, RngStream& stream);

// +-1 walk on the integers lo..hi that is forced inward at the two ends.
ProposalKernel constrained_walk_kernel(int lo, int hi);

struct TemperLadder {
  std::vector<double> betas;  // 1 = beta_1 > beta_2 > ... > beta_K > 0
  std::vector<double> log_c;  // simulated tempering only; empty means c_k = 1

  void validate() const;
  int size() const { return static_cast<int>(betas.size()); }
  double log_c_at(int k) const { return log_c.empty() ? 0.0 : log_c[k]; }
};

TemperLadder geometric_ladder(int k, double beta_min);

struct TemperingResult {
  ChainTrace trace;         // x states
  std::vector<int> levels;  // 0-based temperature index per record
  ChainTrace beta1;         // records with level 0
  long level_moves_accepted = 0;
};

TemperingResult simulated_tempering(const LogDensityFn& log_f_tilde,
                                    const TemperLadder& ladder,
                                    const ProposalKernel& kernel, const Vec& init,
                                    int init_level, long n, RngStream& stream);

struct PtOptions {
  bool swaps = true;
  bool adjacent_only = false;
};

struct PtResult {
  std::vector<ChainTrace> levels;
  long swap_attempts = 0;
  long swap_accepts = 0;
};

// Level k advances on stream.split(k); swap decisions use stream.split(K).
// kernels holds one kernel per level, or a single shared kernel.
PtResult parallel_tempering(const LogDensityFn& log_f_tilde, const TemperLadder& ladder,
                            const std::vector<ProposalKernel>& kernels,
                            const std::vector<Vec>& inits, long n,
                            const RngStream& stream, const PtOptions& options = {});

// (beta_l - beta_m)(V_l - V_m) with V = -log f.
double pt_swap_log_acceptance(double beta_l, double beta_m, double v_l, double v_m);

// Swap-move kernel on pairs (i, j) of a finite state space, indexed i*S + j.
Mat exact_swap_kernel(const Vec& f, double beta_l, double beta_m);

// Z = X + eps grad log f(X) + sqrt(2 eps / beta) xi, with its Gaussian log q.
ProposalKernel langevin_tempered_kernel(const std::function<Vec(const Vec&)>& grad_log_f,
                                        double eps, double beta);

}  // namespace mcsuite
