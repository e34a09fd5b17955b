#pragma once

// The discrete recovery program: min ||x||_1 subject to ||y - K x||_1 <= delta,
// reformulated as a linear program, plus the least-squares baseline and
// recovery metrics.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pulse/lp.hpp"
#include "pulse/signal_model.hpp"

namespace pulse {

struct L1Problem {
  Eigen::MatrixXd matrix;  // convolution matrix K
  Eigen::VectorXd y;
  double delta = 0.0;
};

enum class SolveStatus { optimal, infeasible, iteration_limit, numerical_failure };

struct L1Solution {
  Eigen::VectorXd x_hat;
  double objective = 0.0;    // ||x_hat||_1
  double residual_l1 = 0.0;  // ||y - K x_hat||_1
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
};

// Internal LP encoding: min c'z subject to A z (<=|=) g, z >= 0.
struct LPStandardForm {
  Eigen::MatrixXd a;
  Eigen::VectorXd g;
  Eigen::VectorXd c;
  bool equality = false;  // true for the delta = 0 basis-pursuit form
  long n_signal = 0;      // length of the underlying x
};

// delta > 0: variables z = (x+, x-, s), constraints
//   K(x+ - x-) - s <= y,  -K(x+ - x-) - s <= -y,  1's <= delta.
// delta = 0: variables z = (x+, x-), equality constraints K(x+ - x-) = y.
inline LPStandardForm encode_lp(const L1Problem& p) {
  const long n = p.y.size();
  if (p.matrix.rows() != n) throw std::invalid_argument("encode_lp: dimension mismatch");
  if (p.delta < 0) throw std::invalid_argument("encode_lp: delta must be nonnegative");
  const long cols = p.matrix.cols();
  LPStandardForm lp;
  lp.n_signal = cols;
  if (p.delta == 0.0) {
    lp.equality = true;
    lp.a.resize(n, 2 * cols);
    lp.a << p.matrix, -p.matrix;
    lp.g = p.y;
    lp.c = Eigen::VectorXd::Ones(2 * cols);
  } else {
    lp.equality = false;
    lp.a = Eigen::MatrixXd::Zero(2 * n + 1, 2 * cols + n);
    lp.a.block(0, 0, n, cols) = p.matrix;
    lp.a.block(0, cols, n, cols) = -p.matrix;
    lp.a.block(0, 2 * cols, n, n) = -Eigen::MatrixXd::Identity(n, n);
    lp.a.block(n, 0, n, cols) = -p.matrix;
    lp.a.block(n, cols, n, cols) = p.matrix;
    lp.a.block(n, 2 * cols, n, n) = -Eigen::MatrixXd::Identity(n, n);
    lp.a.row(2 * n).segment(2 * cols, n).setOnes();
    lp.g.resize(2 * n + 1);
    lp.g << p.y, -p.y, p.delta;
    lp.c = Eigen::VectorXd::Zero(2 * cols + n);
    lp.c.head(2 * cols).setOnes();
  }
  return lp;
}

inline Eigen::VectorXd decode_lp(const LPStandardForm& lp, const Eigen::VectorXd& z) {
  return z.head(lp.n_signal) - z.segment(lp.n_signal, lp.n_signal);
}

namespace detail {

// Converts the inequality form A z <= g to standard form by appending slacks.
inline void to_equality(const LPStandardForm& lp, Eigen::MatrixXd& a, Eigen::VectorXd& b,
                        Eigen::VectorXd& c) {
  if (lp.equality) {
    a = lp.a;
    b = lp.g;
    c = lp.c;
    return;
  }
  const long m = lp.a.rows(), n = lp.a.cols();
  a.resize(m, n + m);
  a << lp.a, Eigen::MatrixXd::Identity(m, m);
  b = lp.g;
  c = Eigen::VectorXd::Zero(n + m);
  c.head(n) = lp.c;
}

// Crossover polish for exact (delta = 0) recovery: re-solve on the detected
// support by least squares and accept only if feasibility and the objective
// do not degrade.
inline bool polish_exact(const L1Problem& p, Eigen::VectorXd& x_hat, double objective) {
  const double xmax = x_hat.cwiseAbs().maxCoeff();
  if (xmax == 0.0) return false;
  for (double rel : {1e-4, 1e-6}) {
    std::vector<long> support;
    for (long i = 0; i < x_hat.size(); ++i)
      if (std::abs(x_hat[i]) > rel * xmax) support.push_back(i);
    if (support.empty() || static_cast<long>(support.size()) > p.matrix.rows()) continue;
    Eigen::MatrixXd ks(p.matrix.rows(), support.size());
    for (std::size_t j = 0; j < support.size(); ++j) ks.col(j) = p.matrix.col(support[j]);
    const Eigen::VectorXd xs = ks.colPivHouseholderQr().solve(p.y);
    const double resid = (ks * xs - p.y).lpNorm<Eigen::Infinity>();
    const double obj = xs.lpNorm<1>();
    if (resid <= 1e-9 * (1.0 + p.y.lpNorm<Eigen::Infinity>()) &&
        obj <= objective + 1e-8 * (1.0 + objective)) {
      x_hat.setZero();
      for (std::size_t j = 0; j < support.size(); ++j) x_hat[support[j]] = xs[j];
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline L1Solution solve_l1(const L1Problem& p, const LpOptions& opts = {}) {
  const LPStandardForm lp = encode_lp(p);
  Eigen::MatrixXd a;
  Eigen::VectorXd b, c;
  detail::to_equality(lp, a, b, c);
  const LpResult r = solve_standard_form(a, b, c, opts);
  L1Solution sol;
  sol.iterations = r.iterations;
  sol.x_hat = decode_lp(lp, r.x);
  switch (r.status) {
    case LpStatus::optimal: sol.status = SolveStatus::optimal; break;
    case LpStatus::infeasible: sol.status = SolveStatus::infeasible; break;
    case LpStatus::iteration_limit: sol.status = SolveStatus::iteration_limit; break;
    case LpStatus::numerical_failure: sol.status = SolveStatus::numerical_failure; break;
  }
  if (sol.status == SolveStatus::optimal && p.delta == 0.0)
    detail::polish_exact(p, sol.x_hat, sol.x_hat.lpNorm<1>());
  sol.objective = sol.x_hat.lpNorm<1>();
  sol.residual_l1 = (p.y - p.matrix * sol.x_hat).lpNorm<1>();
  return sol;
}

struct LeastSquaresSolution {
  Eigen::VectorXd x;
  double rcond = 0.0;
  bool reliable = true;  // false when the matrix is singular to working precision
};

// Direct linear solve K x = y, deliberately unregularized.
inline LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& k, const Eigen::VectorXd& y) {
  if (k.rows() != k.cols()) throw std::invalid_argument("solve_least_squares: matrix must be square");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
  LeastSquaresSolution out;
  out.rcond = lu.rcond();
  out.reliable = out.rcond > 1e-15;
  out.x = lu.solve(y);
  return out;
}

// Entries with |x[k]| > threshold become spikes at t = k/N.
inline SpikeTrain extract_support(const Eigen::VectorXd& x_hat, const SampleGrid& grid,
                                  double threshold) {
  if (threshold <= 0) throw std::invalid_argument("extract_support: threshold must be positive");
  SpikeTrain s;
  for (long i = 0; i < x_hat.size(); ++i)
    if (std::abs(x_hat[i]) > threshold) {
      s.positions.push_back(grid.time(i));
      s.amplitudes.push_back(x_hat[i]);
    }
  return s;
}

struct RecoveryMetrics {
  double l1_error = 0.0;
  bool exact_support = false;
  double support_precision = 0.0;
  double support_recall = 0.0;
};

inline RecoveryMetrics recovery_metrics(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_true,
                                        const SampleGrid& grid, double threshold) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("recovery_metrics: length mismatch");
  (void)grid;
  RecoveryMetrics m;
  m.l1_error = (x_hat - x_true).lpNorm<1>();
  long tp = 0, fp = 0, fn = 0;
  for (long i = 0; i < x_hat.size(); ++i) {
    const bool got = std::abs(x_hat[i]) > threshold;
    const bool want = std::abs(x_true[i]) > threshold;
    tp += got && want;
    fp += got && !want;
    fn += !got && want;
  }
  m.exact_support = (fp == 0 && fn == 0);
  m.support_precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 1.0;
  m.support_recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 1.0;
  return m;
}

// Default relative detection threshold: 1e-4 of the largest recovered entry.
inline double default_threshold(const Eigen::VectorXd& x_hat) {
  const double m = x_hat.cwiseAbs().maxCoeff();
  return m > 0 ? 1e-4 * m : 1e-12;
}

}  // namespace pulse
