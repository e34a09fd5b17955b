#pragma once

// Dense primal-dual interior-point solver with Mehrotra predictor-corrector
// steps, for linear programs in standard form:
//
//   min c'x   subject to   A x = b,  x >= 0.
//
// Deterministic: no randomized pivoting or ordering. The normal equations
// A D A' are factored with LDLT plus a tiny diagonal ridge when needed, and
// one step of iterative refinement is applied to each solve.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pulse {

enum class LpStatus { optimal, infeasible, iteration_limit, numerical_failure };

struct LpOptions {
  int max_iters = 200;
  double feas_tol = 1e-9;
  double opt_tol = 1e-8;
};

struct LpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  Eigen::VectorXd s;
  LpStatus status = LpStatus::numerical_failure;
  int iterations = 0;
  double rel_gap = std::numeric_limits<double>::infinity();
  double primal_infeasibility = std::numeric_limits<double>::infinity();
  double dual_infeasibility = std::numeric_limits<double>::infinity();
};

namespace detail {

class NormalEquations {
 public:
  // Factors A D A' (+ ridge if not positive definite enough).
  void factor(const Eigen::MatrixXd& a, const Eigen::VectorXd& d) {
    m_ = a * d.asDiagonal() * a.transpose();
    const double ridge0 = 1e-14 * (m_.trace() / m_.rows() + 1.0);
    double ridge = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd reg = m_;
      if (ridge > 0.0) reg.diagonal().array() += ridge;
      ldlt_.compute(reg);
      if (ldlt_.info() == Eigen::Success && ldlt_.isPositive()) {
        ridge_ = ridge;
        return;
      }
      ridge = (ridge == 0.0) ? ridge0 : ridge * 100.0;
    }
    throw std::runtime_error("normal equations factorization failed");
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd y = ldlt_.solve(rhs);
    // One refinement step against the unregularized matrix.
    y += ldlt_.solve(rhs - m_ * y);
    return y;
  }

 private:
  Eigen::MatrixXd m_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  double ridge_ = 0.0;
};

inline double step_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (long i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  return alpha;
}

}  // namespace detail

inline LpResult solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c, const LpOptions& opts = {}) {
  const long m = a.rows(), n = a.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("lp: dimension mismatch");
  LpResult res;
  res.x = Eigen::VectorXd::Zero(n);
  res.lambda = Eigen::VectorXd::Zero(m);
  res.s = Eigen::VectorXd::Zero(n);

  // Mehrotra starting point from least-squares estimates.
  Eigen::LDLT<Eigen::MatrixXd> aat((a * a.transpose()).eval());
  Eigen::VectorXd x = a.transpose() * aat.solve(b);
  Eigen::VectorXd lambda = aat.solve(a * c);
  Eigen::VectorXd s = c - a.transpose() * lambda;
  {
    const double dx = std::max(-1.5 * x.minCoeff(), 0.0);
    const double ds = std::max(-1.5 * s.minCoeff(), 0.0);
    x.array() += dx;
    s.array() += ds;
    const double xs = x.dot(s);
    const double dxh = xs > 0 ? 0.5 * xs / s.sum() : 1.0;
    const double dsh = xs > 0 ? 0.5 * xs / x.sum() : 1.0;
    x.array() += dxh;
    s.array() += dsh;
  }

  const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + c.lpNorm<Eigen::Infinity>();
  detail::NormalEquations ne;

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    const Eigen::VectorXd rb = a * x - b;
    const Eigen::VectorXd rc = a.transpose() * lambda + s - c;
    const double mu = x.dot(s) / n;
    res.primal_infeasibility = rb.lpNorm<Eigen::Infinity>() / bnorm;
    res.dual_infeasibility = rc.lpNorm<Eigen::Infinity>() / cnorm;
    res.rel_gap = x.dot(s) / (1.0 + std::abs(c.dot(x)));
    res.iterations = iter;
    if (res.primal_infeasibility <= opts.feas_tol && res.dual_infeasibility <= opts.feas_tol &&
        res.rel_gap <= opts.opt_tol) {
      res.status = LpStatus::optimal;
      break;
    }
    if (iter == opts.max_iters) {
      res.status = LpStatus::iteration_limit;
      break;
    }
    // Divergence heuristic: unbounded dual / infeasible primal.
    if (x.lpNorm<Eigen::Infinity>() + s.lpNorm<Eigen::Infinity>() > 1e14) {
      res.status = LpStatus::infeasible;
      break;
    }

    const Eigen::VectorXd d = (x.array() / s.array()).matrix();
    try {
      ne.factor(a, d);
    } catch (const std::runtime_error&) {
      res.status = LpStatus::numerical_failure;
      break;
    }
    const auto solve_kkt = [&](const Eigen::VectorXd& rxs, Eigen::VectorXd& dx,
                               Eigen::VectorXd& dl, Eigen::VectorXd& ds) {
      // rxs is the complementarity right-hand side: S dx + X ds = -rxs.
      const Eigen::VectorXd rhs =
          -rb + a * ((rxs.array() / s.array()).matrix()) - a * ((d.array() * rc.array()).matrix());
      dl = ne.solve(rhs);
      ds = -rc - a.transpose() * dl;
      dx = (-(rxs.array() + x.array() * ds.array()) / s.array()).matrix();
    };

    // Affine-scaling (predictor) direction.
    Eigen::VectorXd dx_aff, dl_aff, ds_aff;
    solve_kkt((x.array() * s.array()).matrix(), dx_aff, dl_aff, ds_aff);
    const double alpha_p_aff = detail::step_to_boundary(x, dx_aff);
    const double alpha_d_aff = detail::step_to_boundary(s, ds_aff);
    const double mu_aff =
        (x + alpha_p_aff * dx_aff).dot(s + alpha_d_aff * ds_aff) / n;
    const double sigma = std::pow(mu_aff / mu, 3);

    // Corrector.
    const Eigen::VectorXd rxs =
        (x.array() * s.array() + dx_aff.array() * ds_aff.array() - sigma * mu).matrix();
    Eigen::VectorXd dx, dl, ds;
    solve_kkt(rxs, dx, dl, ds);

    const double tau = 0.9995;
    const double alpha_p = std::min(1.0, tau * detail::step_to_boundary(x, dx));
    const double alpha_d = std::min(1.0, tau * detail::step_to_boundary(s, ds));
    if (alpha_p < 1e-10 && alpha_d < 1e-10) {
      res.status = LpStatus::numerical_failure;
      break;
    }
    x += alpha_p * dx;
    lambda += alpha_d * dl;
    s += alpha_d * ds;
  }

  res.x = x;
  res.lambda = lambda;
  res.s = s;
  return res;
}

}  // namespace pulse
