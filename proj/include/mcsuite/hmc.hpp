#pragma once

#include "mcsuite/core.hpp"

#include <functional>
#include <optional>

namespace mcsuite {

struct PhasePoint {
  Vec q;
  Vec p;
};

// H(q, p) = V(q) + p^T M^-1 p / 2.
struct Hamiltonian {
  std::function<double(const Vec&)> v;
  std::function<Vec(const Vec&)> grad_v;
  Mat m;
  Mat m_inv;
  Mat m_lower;
  // Set when V(q) = q^T A q / 2, enabling the exact flow.
  std::optional<Mat> quadratic_a;

  static Hamiltonian make(std::function<double(const Vec&)> v,
                          std::function<Vec(const Vec&)> grad_v, const Mat& m);
  static Hamiltonian quadratic(const Mat& a, const Mat& m);
  // V = -log f for a target with gradient.
  static Hamiltonian from_target(const TargetDensity& target, const Mat& m);

  int dim() const { return static_cast<int>(m.rows()); }
  double kinetic(const Vec& p) const { return 0.5 * p.dot(m_inv * p); }
  double energy(const PhasePoint& x) const { return v(x.q) + kinetic(x.p); }
};

PhasePoint leapfrog(const Hamiltonian& h, const PhasePoint& x, double eps, int steps);

PhasePoint exact_quadratic_flow(const Hamiltonian& h, const PhasePoint& x, double t);

// Momentum refresh followed by the exact flow for time lambda; no rejection.
ChainTrace idealized_hmc_gaussian(const GaussianTarget& target, double lambda, long n,
                                  RngStream& stream);

using PhaseIntegrator = std::function<PhasePoint(const Hamiltonian&, const PhasePoint&)>;

// On rejection the chain stays at q; the flipped momentum is discarded at the
// next refresh.
ChainTrace hmc_run(const TargetDensity& target, const Mat& m, double eps, int steps,
                   long n, const Vec& init, RngStream& stream,
                   const PhaseIntegrator& integrator = nullptr);
ChainTrace hmc_run(const Hamiltonian& h, double eps, int steps, long n, const Vec& init,
                   RngStream& stream, const PhaseIntegrator& integrator = nullptr);

// H(x0) - H(x1); the acceptance probability is min(1, exp of this).
double hmc_log_acceptance(const Hamiltonian& h, const PhasePoint& x0, const PhasePoint& x1);

}  // namespace mcsuite
