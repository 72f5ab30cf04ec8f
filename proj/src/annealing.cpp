#include "mcsuite/annealing.hpp"

#include <cmath>

namespace mcsuite {

void TemperatureSchedule::validate() const {
  switch (kind) {
    case ScheduleKind::kLogarithmic:
      if (!(beta0 > 0.0)) throw Error(ErrorKind::kInvalidInput, "schedule: beta0 must be > 0");
      break;
    case ScheduleKind::kGeometric:
      if (!(beta0 > 0.0)) throw Error(ErrorKind::kInvalidInput, "schedule: beta0 must be > 0");
      if (!(alpha > 1.0)) throw Error(ErrorKind::kInvalidInput, "schedule: alpha must be > 1");
      break;
    case ScheduleKind::kExplicit:
      if (list.empty()) throw Error(ErrorKind::kInvalidInput, "schedule: empty list");
      for (double b : list) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
          throw Error(ErrorKind::kInvalidInput, "schedule: betas must be finite and >= 0");
        }
      }
      break;
  }
}

double TemperatureSchedule::beta(long n) const {
  switch (kind) {
    case ScheduleKind::kLogarithmic:
      return std::log1p(static_cast<double>(n)) / beta0;
    case ScheduleKind::kGeometric:
      return std::pow(alpha, static_cast<double>(n)) * beta0;
    case ScheduleKind::kExplicit:
      if (n < 0 || n >= static_cast<long>(list.size())) {
        throw Error(ErrorKind::kInvalidInput, "schedule: explicit list too short");
      }
      return list[n];
  }
  return 0.0;
}

AnnealingResult simulated_annealing(const std::function<double(const Vec&)>& v,
                                    const ProposalKernel& kernel,
                                    const TemperatureSchedule& schedule, const Vec& init,
                                    long n, RngStream& stream) {
  schedule.validate();
  double vx = v(init);
  if (!std::isfinite(vx)) {
    throw Error(ErrorKind::kInitialization, "simulated_annealing: V(init) is not finite");
  }
  AnnealingResult res;
  res.trace = ChainTrace(n, static_cast<int>(init.size()));
  res.trace.sampler = "simulated-annealing";
  res.trace.seed = stream.seed();
  res.best_x = init;
  res.best_v = vx;
  Vec x = init;
  for (long i = 0; i < n; ++i) {
    const double beta = schedule.beta(i + 1);
    // Cache V(Z*) so the best-so-far update does not re-evaluate it.
    double vz_last = kInf;
    const LogDensityFn log_f_cached = [&](const Vec& z) {
      vz_last = v(z);
      if (std::isnan(vz_last)) return vz_last;
      return vz_last == kInf ? kNegInf : -beta * vz_last;
    };
    const double log_fx = vx == kInf ? kNegInf : -beta * vx;
    MhStep s = mh_step(log_f_cached, kernel, x, log_fx, stream, i);
    if (s.accepted) {
      x = std::move(s.state);
      vx = vz_last;
    }
    if (vx < res.best_v) {
      res.best_v = vx;
      res.best_x = x;
    }
    res.trace.record(i, x, s.accepted, -beta * vx);
  }
  return res;
}

ProposalKernel constrained_walk_kernel(int lo, int hi) {
  ProposalKernel k;
  k.symmetric = false;
  k.propose = [lo, hi](const Vec& x, RngStream& s) -> Vec {
    Vec z = x;
    const double u = s.uniform();
    const int xi = static_cast<int>(std::lround(x(0)));
    if (xi <= lo) {
      z(0) = xi + 1;
    } else if (xi >= hi) {
      z(0) = xi - 1;
    } else {
      z(0) = u < 0.5 ? xi - 1 : xi + 1;
    }
    return z;
  };
  k.log_q = [lo, hi](const Vec& from, const Vec& to) {
    const int a = static_cast<int>(std::lround(from(0)));
    const int b = static_cast<int>(std::lround(to(0)));
    if (std::abs(a - b) != 1 || b < lo || b > hi) return kNegInf;
    if (a == lo || a == hi) return 0.0;
    return std::log(0.5);
  };
  return k;
}

void TemperLadder::validate() const {
  const int k = size();
  if (k < 2) throw Error(ErrorKind::kInvalidInput, "ladder: need K >= 2 temperatures");
  if (betas[0] != 1.0) throw Error(ErrorKind::kInvalidInput, "ladder: beta_1 must equal 1");
  for (int i = 1; i < k; ++i) {
    if (!(betas[i] < betas[i - 1]) || !(betas[i] > 0.0)) {
      throw Error(ErrorKind::kInvalidInput,
                  "ladder: inverse temperatures must be strictly decreasing and positive");
    }
  }
  if (!log_c.empty()) {
    if (static_cast<int>(log_c.size()) != k) {
      throw Error(ErrorKind::kInvalidInput, "ladder: one weight per temperature");
    }
    for (double c : log_c) {
      if (!std::isfinite(c)) throw Error(ErrorKind::kInvalidInput, "ladder: c_k must be > 0");
    }
  }
}

TemperLadder geometric_ladder(int k, double beta_min) {
  TemperLadder l;
  l.betas.resize(k);
  for (int i = 0; i < k; ++i) {
    l.betas[i] = i == 0 ? 1.0 : std::pow(beta_min, static_cast<double>(i) / (k - 1));
  }
  return l;
}

TemperingResult simulated_tempering(const LogDensityFn& log_f_tilde,
                                    const TemperLadder& ladder,
                                    const ProposalKernel& kernel, const Vec& init,
                                    int init_level, long n, RngStream& stream) {
  ladder.validate();
  const int big_k = ladder.size();
  if (init_level < 0 || init_level >= big_k) {
    throw Error(ErrorKind::kInvalidInput, "simulated_tempering: initial level out of range");
  }
  double lx = log_f_tilde(init);
  if (!(lx > kNegInf) || std::isnan(lx)) {
    throw Error(ErrorKind::kInitialization, "simulated_tempering: f(init) must be positive");
  }
  const auto log_r = [big_k](int from, int) {
    return (from == 0 || from == big_k - 1) ? 0.0 : std::log(0.5);
  };
  TemperingResult res;
  res.trace = ChainTrace(n, static_cast<int>(init.size()));
  res.trace.sampler = "simulated-tempering";
  res.trace.seed = stream.seed();
  res.levels.resize(n);
  Vec x = init;
  int k = init_level;
  long n_beta1 = 0;
  for (long i = 0; i < n; ++i) {
    // Temperature move.
    const double ud = stream.uniform();
    int l;
    if (k == 0) {
      l = 1;
    } else if (k == big_k - 1) {
      l = big_k - 2;
    } else {
      l = ud < 0.5 ? k - 1 : k + 1;
    }
    const double la = ladder.log_c_at(l) + ladder.betas[l] * lx - ladder.log_c_at(k) -
                      ladder.betas[k] * lx + log_r(l, k) - log_r(k, l);
    if (std::log(stream.uniform()) < la) {
      k = l;
      ++res.level_moves_accepted;
    }
    // State move at the new temperature.
    const double beta = ladder.betas[k];
    double lz_raw = 0.0;
    const LogDensityFn log_fb = [&](const Vec& z) {
      lz_raw = log_f_tilde(z);
      if (std::isnan(lz_raw)) return lz_raw;
      return lz_raw == kNegInf ? kNegInf : beta * lz_raw;
    };
    MhStep s = mh_step(log_fb, kernel, x, beta * lx, stream, i);
    if (s.accepted) {
      x = std::move(s.state);
      lx = lz_raw;
    }
    res.trace.record(i, x, s.accepted, lx);
    res.levels[i] = k;
    if (k == 0) ++n_beta1;
  }
  res.beta1 = ChainTrace(n_beta1, static_cast<int>(init.size()));
  res.beta1.sampler = "simulated-tempering-beta1";
  res.beta1.seed = stream.seed();
  long j = 0;
  for (long i = 0; i < n; ++i) {
    if (res.levels[i] == 0) {
      res.beta1.record(j++, res.trace.states.row(i).transpose(), res.trace.accepted[i],
                       res.trace.log_density_values(i));
    }
  }
  return res;
}

double pt_swap_log_acceptance(double beta_l, double beta_m, double v_l, double v_m) {
  if (beta_l == beta_m) return 0.0;
  return (beta_l - beta_m) * (v_l - v_m);
}

PtResult parallel_tempering(const LogDensityFn& log_f_tilde, const TemperLadder& ladder,
                            const std::vector<ProposalKernel>& kernels,
                            const std::vector<Vec>& inits, long n,
                            const RngStream& stream, const PtOptions& options) {
  ladder.validate();
  const int big_k = ladder.size();
  if (static_cast<int>(inits.size()) != big_k) {
    throw Error(ErrorKind::kInvalidInput, "parallel_tempering: one initial state per level");
  }
  if (kernels.size() != 1 && static_cast<int>(kernels.size()) != big_k) {
    throw Error(ErrorKind::kInvalidInput, "parallel_tempering: one kernel or one per level");
  }
  std::vector<RngStream> streams;
  for (int k = 0; k < big_k; ++k) streams.push_back(stream.split(k));
  RngStream coord = stream.split(big_k);

  PtResult res;
  std::vector<Vec> x(inits);
  std::vector<double> lx(big_k);
  for (int k = 0; k < big_k; ++k) {
    lx[k] = log_f_tilde(x[k]);
    if (!(lx[k] > kNegInf) || std::isnan(lx[k])) {
      throw Error(ErrorKind::kInitialization,
                  "parallel_tempering: f(init) must be positive at level " + std::to_string(k));
    }
    res.levels.emplace_back(n, static_cast<int>(x[k].size()));
    res.levels[k].sampler = "parallel-tempering";
    res.levels[k].seed = stream.seed();
    res.levels[k].params["beta"] = ladder.betas[k];
  }
  std::vector<char> acc(big_k);
  for (long i = 0; i < n; ++i) {
    for (int k = 0; k < big_k; ++k) {
      const double beta = ladder.betas[k];
      double lz_raw = 0.0;
      const LogDensityFn log_fb = [&](const Vec& z) {
        lz_raw = log_f_tilde(z);
        if (std::isnan(lz_raw)) return lz_raw;
        return lz_raw == kNegInf ? kNegInf : beta * lz_raw;
      };
      const ProposalKernel& q = kernels.size() == 1 ? kernels[0] : kernels[k];
      MhStep s = mh_step(log_fb, q, x[k], beta * lx[k], streams[k], i);
      acc[k] = s.accepted;
      if (s.accepted) {
        x[k] = std::move(s.state);
        lx[k] = lz_raw;
      }
    }
    if (options.swaps) {
      int l, m;
      if (options.adjacent_only) {
        l = static_cast<int>(coord.below(big_k - 1));
        m = l + 1;
      } else {
        l = static_cast<int>(coord.below(big_k));
        m = static_cast<int>(coord.below(big_k - 1));
        if (m >= l) ++m;
      }
      const double la =
          pt_swap_log_acceptance(ladder.betas[l], ladder.betas[m], -lx[l], -lx[m]);
      ++res.swap_attempts;
      if (std::log(coord.uniform()) < la) {
        std::swap(x[l], x[m]);
        std::swap(lx[l], lx[m]);
        ++res.swap_accepts;
      }
    }
    for (int k = 0; k < big_k; ++k) {
      res.levels[k].record(i, x[k], acc[k], ladder.betas[k] * lx[k]);
    }
  }
  return res;
}

Mat exact_swap_kernel(const Vec& f, double beta_l, double beta_m) {
  const long s = f.size();
  Mat p = Mat::Zero(s * s, s * s);
  for (long i = 0; i < s; ++i) {
    for (long j = 0; j < s; ++j) {
      const long from = i * s + j, to = j * s + i;
      const double la = pt_swap_log_acceptance(beta_l, beta_m, -std::log(f(i)),
                                               -std::log(f(j)));
      const double a = std::min(1.0, std::exp(la));
      p(from, to) += a;
      p(from, from) += 1.0 - a;
    }
  }
  return p;
}

ProposalKernel langevin_tempered_kernel(const std::function<Vec(const Vec&)>& grad_log_f,
                                        double eps, double beta) {
  if (!(eps > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "langevin_tempered_kernel: eps and beta must be > 0");
  }
  const double var = 2.0 * eps / beta;
  ProposalKernel k;
  k.symmetric = false;
  k.propose = [=](const Vec& x, RngStream& s) -> Vec {
    return x + eps * grad_log_f(x) + std::sqrt(var) * standard_normal_vector(s, x.size());
  };
  k.log_q = [=](const Vec& from, const Vec& to) {
    return -(to - from - eps * grad_log_f(from)).squaredNorm() / (2.0 * var);
  };
  return k;
}

}  // namespace mcsuite
