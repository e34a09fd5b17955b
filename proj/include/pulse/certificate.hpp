#pragma once

// Dual-certificate interpolation systems: construction and dense solve of the
// univariate 2Mx2M and bivariate 3Mx3M block systems, certificate evaluation,
// numerical verification of the interpolation and boundedness conditions, and
// the closed-form coefficient bounds / separation thresholds.
//
// Certificates are built in sigma-normalized coordinates (sigma = 1); callers
// rescale via q_sigma(t) = q(t / sigma).

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pulse/kernels.hpp"

namespace pulse {

struct Certificate1D {
  std::vector<double> support;  // sigma-normalized spike positions
  std::vector<double> signs;    // +-1 interpolation targets
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Kernel kernel;
};

struct Point2 {
  double t = 0.0;
  double u = 0.0;
};

struct Certificate2D {
  std::vector<Point2> support;
  std::vector<double> signs;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Kernel kernel;
};

struct CertificateVerification {
  double max_interp_residual = 0.0;
  double max_gradient_residual = 0.0;
  double max_abs_q_off_support = 0.0;
  double near_region_margin = 0.0;  // min over near probes of the quadratic-dip slack
  bool hessian_negative_definite = true;  // 2D only; true vacuously in 1D
  bool valid = false;
};

// E(nu) = pi^2 / (6 nu^2), the tail bound on sum 1/(1 + (n nu)^2).
inline double e_nu(double nu) {
  if (nu <= 0) throw std::invalid_argument("e_nu: nu must be positive");
  const double pi = std::numbers::pi;
  return pi * pi / (6.0 * nu * nu);
}

// E2(nu) <= 3 pi^2 / (2 nu^3), the tail bound on sum 9n / (1 + n^2 nu^2)^(3/2).
inline double e2_nu(double nu) {
  if (nu <= 0) throw std::invalid_argument("e2_nu: nu must be positive");
  const double pi = std::numbers::pi;
  return 1.5 * pi * pi / (nu * nu * nu);
}

// Number of support points in the n-th rectangular ring about a center:
// n nu <= max(|dt|, |du|) <= (n+1) nu.
inline int ring_count(const std::vector<Point2>& support, Point2 center, double nu, int n) {
  if (n < 1 || nu <= 0) throw std::invalid_argument("ring_count: need n >= 1, nu > 0");
  int count = 0;
  for (const Point2& p : support) {
    const double d = std::max(std::abs(p.t - center.t), std::abs(p.u - center.u));
    if (d >= n * nu - 1e-12 && d <= (n + 1) * nu + 1e-12) ++count;
  }
  return count;
}

namespace detail {

inline void check_distinct(const std::vector<double>& support) {
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      if (support[i] == support[j])
        throw std::invalid_argument("certificate: duplicate support points");
}

inline void check_distinct(const std::vector<Point2>& support) {
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      if (support[i].t == support[j].t && support[i].u == support[j].u)
        throw std::invalid_argument("certificate: duplicate support points");
}

}  // namespace detail

// Block matrix [[G0, G1], [G1, G2]] with (G_l)_{k,m} = K^(l)(t_k - t_m).
inline Eigen::MatrixXd build_system_1d(const Kernel& kernel, const std::vector<double>& support) {
  detail::check_distinct(support);
  const long m = static_cast<long>(support.size());
  Eigen::MatrixXd sys(2 * m, 2 * m);
  for (long k = 0; k < m; ++k)
    for (long j = 0; j < m; ++j) {
      const double d = support[k] - support[j];
      sys(k, j) = eval(kernel, d, 0);
      sys(k, m + j) = eval(kernel, d, 1);
      sys(m + k, j) = eval(kernel, d, 1);
      sys(m + k, m + j) = eval(kernel, d, 2);
    }
  return sys;
}

inline Certificate1D solve_certificate_1d(const Kernel& kernel, const std::vector<double>& support,
                                          const std::vector<double>& signs) {
  if (support.size() != signs.size())
    throw std::invalid_argument("certificate: support/signs length mismatch");
  const long m = static_cast<long>(support.size());
  const Eigen::MatrixXd sys = build_system_1d(kernel, support);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  if (lu.rcond() < 1e-12)
    throw std::runtime_error("certificate system is near-singular (insufficient separation)");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * m);
  for (long i = 0; i < m; ++i) rhs[i] = signs[i];
  const Eigen::VectorXd coef = lu.solve(rhs);
  const double resid = (sys * coef - rhs).lpNorm<Eigen::Infinity>();
  if (resid > 1e-10 * rhs.lpNorm<Eigen::Infinity>())
    throw std::runtime_error("certificate solve residual check failed");
  Certificate1D cert;
  cert.support = support;
  cert.signs = signs;
  cert.a = coef.head(m);
  cert.b = coef.tail(m);
  cert.kernel = kernel;
  return cert;
}

// q^(order)(t) = sum_m a_m K^(order)(t - t_m) + b_m K^(order+1)(t - t_m).
inline double eval_q(const Certificate1D& cert, double t, int order = 0) {
  if (order < 0 || order > 2) throw std::invalid_argument("eval_q: order must be in 0..2");
  double acc = 0.0;
  for (std::size_t m = 0; m < cert.support.size(); ++m) {
    const double d = t - cert.support[m];
    acc += cert.a[m] * eval(cert.kernel, d, order) + cert.b[m] * eval(cert.kernel, d, order + 1);
  }
  return acc;
}

inline CertificateVerification verify_certificate(const Certificate1D& cert,
                                                  double probe_step = 1e-3,
                                                  double probe_extent = 2.0,
                                                  double exclusion_radius = 0.0) {
  if (exclusion_radius <= 0.0) exclusion_radius = probe_step;
  CertificateVerification v;
  for (std::size_t m = 0; m < cert.support.size(); ++m) {
    v.max_interp_residual =
        std::max(v.max_interp_residual, std::abs(eval_q(cert, cert.support[m], 0) - cert.signs[m]));
    v.max_gradient_residual =
        std::max(v.max_gradient_residual, std::abs(eval_q(cert, cert.support[m], 1)));
  }
  // Quadratic-dip data near spikes needs (epsilon, beta); built-ins only.
  double eps = 0.0, beta = 0.0;
  const double k0 = eval(cert.kernel, 0.0, 0);
  if (cert.kernel.kind != KernelKind::custom) {
    eps = default_epsilon(cert.kernel);
    beta = verify_local_property(cert.kernel, eps).beta;
  }
  const double lo = *std::min_element(cert.support.begin(), cert.support.end()) - probe_extent;
  const double hi = *std::max_element(cert.support.begin(), cert.support.end()) + probe_extent;
  double margin = std::numeric_limits<double>::infinity();
  for (double t = lo; t <= hi; t += probe_step) {
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t nearest_idx = 0;
    for (std::size_t m = 0; m < cert.support.size(); ++m) {
      const double d = std::abs(t - cert.support[m]);
      if (d < nearest) {
        nearest = d;
        nearest_idx = m;
      }
    }
    if (nearest <= exclusion_radius) continue;
    const double q = eval_q(cert, t, 0);
    v.max_abs_q_off_support = std::max(v.max_abs_q_off_support, std::abs(q));
    if (eps > 0.0 && nearest <= eps) {
      const double dip = 1.0 - beta / (4.0 * k0) * nearest * nearest;
      margin = std::min(margin, dip - cert.signs[nearest_idx] * q);
    }
  }
  v.near_region_margin = margin;
  v.valid = v.max_interp_residual <= 1e-8 && v.max_gradient_residual <= 1e-8 &&
            v.max_abs_q_off_support < 1.0;
  return v;
}

struct CoefficientBounds {
  double a_inf_bound = 0.0;
  double b_inf_bound = 0.0;
  double a_lower = 0.0;
  std::array<double, 3> nu_thresholds{};  // minimum nu implied by each invertibility condition
  bool applicable = false;
};

// Closed-form bounds on the certificate coefficients in terms of the kernel
// admissibility constants and the separation constant nu. The bounds follow
// the Schur/Neumann derivation with E(nu) substituted at its closed form.
inline CoefficientBounds theoretical_bounds(const AdmissibilityReport& rep, double nu) {
  if (nu <= 0) throw std::invalid_argument("theoretical_bounds: nu must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double k0 = rep.k0;
  const double ak2 = std::abs(rep.k2_0);
  const double c0 = rep.c[0], c1 = rep.c[1], c2 = rep.c[2];
  CoefficientBounds out;
  out.nu_thresholds[0] = std::sqrt(c2 * pi2 / (3.0 * ak2));
  out.nu_thresholds[1] = std::sqrt(pi2 * (c1 * c1 + c0 * c2) / (3.0 * c0 * ak2));
  out.nu_thresholds[2] = std::sqrt(2.0 * pi2 * c0 / (3.0 * k0));
  out.applicable = nu > out.nu_thresholds[0] && nu > out.nu_thresholds[1] &&
                   nu > out.nu_thresholds[2];
  const double e = e_nu(nu);
  const double denom_a = k0 - 4.0 * c0 * e;           // = (3 k0 nu^2 - 2 pi^2 c0) / (3 nu^2)
  const double denom_g2 = ak2 - 2.0 * c2 * e;         // = (3|K''(0)| nu^2 - pi^2 c2) / (3 nu^2)
  if (out.applicable) {
    out.a_inf_bound = 1.0 / denom_a;
    out.b_inf_bound = 2.0 * c1 * e / (denom_g2 * denom_a);
    out.a_lower = (1.0 / k0) * (1.0 - 4.0 * c0 * e / denom_a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bivariate certificates
// ---------------------------------------------------------------------------

// Blocks G^(l1,l2) with entries K2^(l1,l2)(t_k - t_m, u_k - u_m), arranged
// as [[G00, G10, G01], [G10, G20, G11], [G01, G11, G02]].
inline Eigen::MatrixXd build_system_2d(const Kernel& kernel, const std::vector<Point2>& support) {
  detail::check_distinct(support);
  const long m = static_cast<long>(support.size());
  Eigen::MatrixXd sys(3 * m, 3 * m);
  for (long k = 0; k < m; ++k)
    for (long j = 0; j < m; ++j) {
      const double dt = support[k].t - support[j].t;
      const double du = support[k].u - support[j].u;
      const double g00 = eval2(kernel, dt, du, 0, 0);
      const double g10 = eval2(kernel, dt, du, 1, 0);
      const double g01 = eval2(kernel, dt, du, 0, 1);
      const double g20 = eval2(kernel, dt, du, 2, 0);
      const double g11 = eval2(kernel, dt, du, 1, 1);
      const double g02 = eval2(kernel, dt, du, 0, 2);
      sys(k, j) = g00;
      sys(k, m + j) = g10;
      sys(k, 2 * m + j) = g01;
      sys(m + k, j) = g10;
      sys(m + k, m + j) = g20;
      sys(m + k, 2 * m + j) = g11;
      sys(2 * m + k, j) = g01;
      sys(2 * m + k, m + j) = g11;
      sys(2 * m + k, 2 * m + j) = g02;
    }
  return sys;
}

inline Certificate2D solve_certificate_2d(const Kernel& kernel, const std::vector<Point2>& support,
                                          const std::vector<double>& signs) {
  if (support.size() != signs.size())
    throw std::invalid_argument("certificate: support/signs length mismatch");
  const long m = static_cast<long>(support.size());
  const Eigen::MatrixXd sys = build_system_2d(kernel, support);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  if (lu.rcond() < 1e-12)
    throw std::runtime_error("2D certificate system is near-singular (insufficient separation)");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * m);
  for (long i = 0; i < m; ++i) rhs[i] = signs[i];
  const Eigen::VectorXd coef = lu.solve(rhs);
  const double resid = (sys * coef - rhs).lpNorm<Eigen::Infinity>();
  if (resid > 1e-10 * rhs.lpNorm<Eigen::Infinity>())
    throw std::runtime_error("2D certificate solve residual check failed");
  Certificate2D cert;
  cert.support = support;
  cert.signs = signs;
  cert.a = coef.segment(0, m);
  cert.b = coef.segment(m, m);
  cert.c = coef.segment(2 * m, m);
  cert.kernel = kernel;
  return cert;
}

// Mixed partial q^(ot,ou)(t,u), total order at most 2.
inline double eval_q2(const Certificate2D& cert, double t, double u, int order_t = 0,
                      int order_u = 0) {
  if (order_t < 0 || order_u < 0 || order_t + order_u > 2)
    throw std::invalid_argument("eval_q2: total order must be at most 2");
  double acc = 0.0;
  for (std::size_t m = 0; m < cert.support.size(); ++m) {
    const double dt = t - cert.support[m].t;
    const double du = u - cert.support[m].u;
    acc += cert.a[m] * eval2(cert.kernel, dt, du, order_t, order_u) +
           cert.b[m] * eval2(cert.kernel, dt, du, order_t + 1, order_u) +
           cert.c[m] * eval2(cert.kernel, dt, du, order_t, order_u + 1);
  }
  return acc;
}

inline CertificateVerification verify_certificate_2d(const Certificate2D& cert,
                                                     double probe_step = 5e-3,
                                                     double probe_extent = 1.5,
                                                     double exclusion_radius = 0.0) {
  if (exclusion_radius <= 0.0) exclusion_radius = probe_step;
  CertificateVerification v;
  for (std::size_t m = 0; m < cert.support.size(); ++m) {
    const Point2 p = cert.support[m];
    v.max_interp_residual =
        std::max(v.max_interp_residual, std::abs(eval_q2(cert, p.t, p.u, 0, 0) - cert.signs[m]));
    v.max_gradient_residual = std::max({v.max_gradient_residual,
                                        std::abs(eval_q2(cert, p.t, p.u, 1, 0)),
                                        std::abs(eval_q2(cert, p.t, p.u, 0, 1))});
  }
  double eps1 = 0.2;
  if (cert.kernel.kind != KernelKind::custom)
    eps1 = std::min(default_epsilon(cert.kernel), 0.2);
  double t_lo = 1e300, t_hi = -1e300, u_lo = 1e300, u_hi = -1e300;
  for (const Point2& p : cert.support) {
    t_lo = std::min(t_lo, p.t);
    t_hi = std::max(t_hi, p.t);
    u_lo = std::min(u_lo, p.u);
    u_hi = std::max(u_hi, p.u);
  }
  t_lo -= probe_extent;
  t_hi += probe_extent;
  u_lo -= probe_extent;
  u_hi += probe_extent;
  if ((t_hi - t_lo) / probe_step > 2000 || (u_hi - u_lo) / probe_step > 2000)
    throw std::invalid_argument("verify_certificate_2d: probe grid too large");
  double margin = std::numeric_limits<double>::infinity();
  for (double t = t_lo; t <= t_hi; t += probe_step)
    for (double u = u_lo; u <= u_hi; u += probe_step) {
      // Nearest support point in the max metric.
      double nearest = std::numeric_limits<double>::infinity();
      double nearest_sign = 1.0;
      for (std::size_t m = 0; m < cert.support.size(); ++m) {
        const Point2& p = cert.support[m];
        const double d = std::max(std::abs(t - p.t), std::abs(u - p.u));
        if (d < nearest) {
          nearest = d;
          nearest_sign = cert.signs[m];
        }
      }
      if (nearest <= exclusion_radius) continue;
      const double q = eval_q2(cert, t, u, 0, 0);
      v.max_abs_q_off_support = std::max(v.max_abs_q_off_support, std::abs(q));
      if (nearest < eps1) {
        // Near-region Hessian of v_k q must be negative definite: det > 0,
        // trace < 0 (q dips away from the interpolated sign).
        const double qtt = nearest_sign * eval_q2(cert, t, u, 2, 0);
        const double quu = nearest_sign * eval_q2(cert, t, u, 0, 2);
        const double qtu = nearest_sign * eval_q2(cert, t, u, 1, 1);
        if (!(qtt * quu - qtu * qtu > 0.0 && qtt + quu < 0.0))
          v.hessian_negative_definite = false;
        margin = std::min(margin, 1.0 - std::abs(q));
      }
    }
  v.near_region_margin = margin;
  v.valid = v.max_interp_residual <= 1e-8 && v.max_gradient_residual <= 1e-8 &&
            v.max_abs_q_off_support < 1.0;
  return v;
}

struct CoefficientBounds2D {
  double a_inf_bound = 0.0;
  double b_inf_bound = 0.0;
  double c_inf_bound = 0.0;
  double a_lower = 0.0;
  std::array<double, 3> nu_thresholds{};
  bool applicable = false;
};

inline CoefficientBounds2D coefficient_bounds_2d(const AdmissibilityReport& rep, double nu) {
  if (!rep.is2d) throw std::invalid_argument("coefficient_bounds_2d: need a 2D report");
  if (nu <= 0) throw std::invalid_argument("coefficient_bounds_2d: nu must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double k0 = rep.k0;
  const double k20 = std::abs(rep.k2_0);  // |K2^(2,0)(0,0)| = |K2^(0,2)(0,0)| for built-ins
  const double c00 = rep.c2d[0][0], c10 = rep.c2d[1][0], c01 = rep.c2d[0][1];
  const double c20 = rep.c2d[2][0], c11 = rep.c2d[1][1], c02 = rep.c2d[0][2];
  CoefficientBounds2D out;
  out.nu_thresholds[0] = std::cbrt(1.5 * pi2 * c02 / k20);
  out.nu_thresholds[1] = std::cbrt(1.5 * pi2 * (c11 * c11 + c20 * c02) / (c20 * k20));
  out.nu_thresholds[2] = std::cbrt(3.0 * pi2 * c20 / k20);
  const double e2 = e2_nu(nu);
  const double denom_a = k0 - 3.0 * c00 * e2;
  const double denom_g2s = k20 - 2.0 * c20 * e2;
  const double denom_g02 = k20 - c02 * e2;
  out.applicable = nu >= out.nu_thresholds[0] && nu >= out.nu_thresholds[1] &&
                   nu > out.nu_thresholds[2] && denom_a > 0.0 && denom_g2s > 0.0 &&
                   denom_g02 > 0.0;
  if (out.applicable) {
    out.a_inf_bound = 1.0 / denom_a;
    out.b_inf_bound = 2.0 * c10 * e2 / (denom_g2s * denom_a);
    out.c_inf_bound = 2.0 * c01 * e2 / (denom_g02 * denom_a);
    out.a_lower = (1.0 / k0) * (1.0 - 3.0 * c00 * e2 / denom_a);
  }
  return out;
}

}  // namespace pulse
