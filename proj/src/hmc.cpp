#include "mcsuite/hmc.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mcsuite {

Hamiltonian Hamiltonian::make(std::function<double(const Vec&)> v,
                              std::function<Vec(const Vec&)> grad_v, const Mat& m) {
  Hamiltonian h;
  h.v = std::move(v);
  h.grad_v = std::move(grad_v);
  h.m = m;
  h.m_lower = cholesky_lower(m, "mass matrix");
  h.m_inv = h.m_lower.transpose().triangularView<Eigen::Upper>().solve(
      h.m_lower.triangularView<Eigen::Lower>().solve(Mat::Identity(m.rows(), m.cols())));
  h.m_inv = 0.5 * (h.m_inv + h.m_inv.transpose());
  return h;
}

Hamiltonian Hamiltonian::quadratic(const Mat& a, const Mat& m) {
  Hamiltonian h = make([a](const Vec& q) { return 0.5 * q.dot(a * q); },
                       [a](const Vec& q) -> Vec { return a * q; }, m);
  h.quadratic_a = a;
  return h;
}

Hamiltonian Hamiltonian::from_target(const TargetDensity& target, const Mat& m) {
  if (!target.has_gradient()) {
    throw Error(ErrorKind::kInvalidInput, "hmc: target has no gradient");
  }
  return make([target](const Vec& q) { return -target.log_prob(q); },
              [target](const Vec& q) -> Vec { return -target.grad(q); }, m);
}

PhasePoint leapfrog(const Hamiltonian& h, const PhasePoint& x, double eps, int steps) {
  if (!(eps > 0.0) || steps < 1) {
    throw Error(ErrorKind::kInvalidInput, "leapfrog: need eps > 0 and L >= 1");
  }
  const auto grad = [&h](const Vec& q, int step) {
    Vec g = h.grad_v(q);
    if (!g.allFinite()) {
      throw Error(ErrorKind::kIntegration,
                  "leapfrog: non-finite gradient at step " + std::to_string(step));
    }
    return g;
  };
  PhasePoint y = x;
  y.p -= 0.5 * eps * grad(y.q, 0);
  for (int i = 1; i <= steps; ++i) {
    y.q += eps * (h.m_inv * y.p);
    const Vec g = grad(y.q, i);
    // Closing half kick of step i fused with the opening one of step i+1.
    y.p -= (i < steps ? eps : 0.5 * eps) * g;
  }
  return y;
}

PhasePoint exact_quadratic_flow(const Hamiltonian& h, const PhasePoint& x, double t) {
  if (!h.quadratic_a) {
    throw Error(ErrorKind::kUnsupported, "exact_quadratic_flow: potential is not quadratic");
  }
  const Mat& l = h.m_lower;
  // y = L^T q turns the system into y'' = -K y with K = L^-1 A L^-T.
  const Mat linv_a = l.triangularView<Eigen::Lower>().solve(*h.quadratic_a);
  const Mat k = l.triangularView<Eigen::Lower>().solve(linv_a.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (k + k.transpose()));
  const Vec lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) {
    throw Error(ErrorKind::kUnsupported, "exact_quadratic_flow: A must be positive definite");
  }
  const Mat& qm = es.eigenvectors();
  const Vec z0 = qm.transpose() * (l.transpose() * x.q);
  const Vec dz0 = qm.transpose() * l.triangularView<Eigen::Lower>().solve(x.p);
  Vec z(z0.size()), dz(z0.size());
  for (long i = 0; i < z0.size(); ++i) {
    const double w = std::sqrt(lam(i));
    const double c = std::cos(w * t), s = std::sin(w * t);
    z(i) = z0(i) * c + dz0(i) / w * s;
    dz(i) = -z0(i) * w * s + dz0(i) * c;
  }
  PhasePoint out;
  out.q = l.transpose().triangularView<Eigen::Upper>().solve(qm * z);
  out.p = l * (qm * dz);
  return out;
}

ChainTrace idealized_hmc_gaussian(const GaussianTarget& target, double lambda, long n,
                                  RngStream& stream) {
  const int d = target.dim();
  const Hamiltonian h = Hamiltonian::quadratic(target.precision(), Mat::Identity(d, d));
  ChainTrace trace(n, d);
  trace.sampler = "idealized-hmc";
  trace.seed = stream.seed();
  trace.params["lambda"] = lambda;
  Vec q = target.mean();
  for (long i = 0; i < n; ++i) {
    PhasePoint x{q - target.mean(), standard_normal_vector(stream, d)};
    x = exact_quadratic_flow(h, x, lambda);
    q = target.mean() + x.q;
    trace.record(i, q, true, target.log_density(q));
  }
  return trace;
}

double hmc_log_acceptance(const Hamiltonian& h, const PhasePoint& x0, const PhasePoint& x1) {
  return h.energy(x0) - h.energy(x1);
}

ChainTrace hmc_run(const Hamiltonian& h, double eps, int steps, long n, const Vec& init,
                   RngStream& stream, const PhaseIntegrator& integrator) {
  const int d = h.dim();
  if (init.size() != d) throw Error(ErrorKind::kInvalidInput, "hmc_run: init dimension");
  double vq = h.v(init);
  if (!std::isfinite(vq)) {
    throw Error(ErrorKind::kInitialization, "hmc_run: initial state has zero density");
  }
  ChainTrace trace(n, d);
  trace.sampler = "hmc";
  trace.seed = stream.seed();
  trace.params["eps"] = eps;
  trace.params["L"] = steps;
  trace.params["lambda"] = eps * steps;
  Vec q = init;
  for (long i = 0; i < n; ++i) {
    const PhasePoint x0{q, h.m_lower * standard_normal_vector(stream, d)};
    PhasePoint x1;
    double log_a = kNegInf;
    try {
      x1 = integrator ? integrator(h, x0) : leapfrog(h, x0, eps, steps);
      const double e0 = vq + h.kinetic(x0.p);
      const double e1 = h.energy(x1);
      if (std::isfinite(e1)) log_a = e0 - e1;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kIntegration) throw;
      throw Error(ErrorKind::kIntegration,
                  std::string(e.what()) + " (iteration " + std::to_string(i) + ")");
    }
    const bool acc = std::log(stream.uniform()) < log_a;
    if (acc) {
      q = x1.q;
      vq = h.v(q);
    }
    // A rejected move keeps (q, -p_new); only q is recorded.
    trace.record(i, q, acc, -vq);
  }
  return trace;
}

ChainTrace hmc_run(const TargetDensity& target, const Mat& m, double eps, int steps,
                   long n, const Vec& init, RngStream& stream,
                   const PhaseIntegrator& integrator) {
  return hmc_run(Hamiltonian::from_target(target, m), eps, steps, n, init, stream,
                 integrator);
}

}  // namespace mcsuite
