#pragma once

// Pulse kernels: evaluation of built-in and user-supplied kernels together
// with their derivatives, and numerical estimation of the admissibility
// constants (global decay constants C_l, local concavity floor beta).

#include <array>
#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pulse {

enum class KernelKind { gaussian, cauchy, custom };

// A pulse kernel, 1D or 2D, evaluable with derivatives up to order 3.
// 2D built-ins are tensor products K2(t,u) = K(t) K(u).
// Custom kernels must supply every derivative explicitly through the
// callback; no internal differentiation is performed.
struct Kernel {
  KernelKind kind = KernelKind::gaussian;
  int dim = 1;
  std::function<double(double, int)> custom1d;
  std::function<double(double, double, int, int)> custom2d;

  static Kernel gaussian1d() { return Kernel{KernelKind::gaussian, 1, {}, {}}; }
  static Kernel cauchy1d() { return Kernel{KernelKind::cauchy, 1, {}, {}}; }
  static Kernel gaussian2d() { return Kernel{KernelKind::gaussian, 2, {}, {}}; }
  static Kernel cauchy2d() { return Kernel{KernelKind::cauchy, 2, {}, {}}; }
  static Kernel custom_1d(std::function<double(double, int)> f) {
    return Kernel{KernelKind::custom, 1, std::move(f), {}};
  }
  static Kernel custom_2d(std::function<double(double, double, int, int)> f) {
    return Kernel{KernelKind::custom, 2, {}, std::move(f)};
  }
};

inline Kernel kernel_by_name(std::string_view name, int dim = 1) {
  if (name == "gaussian") return dim == 1 ? Kernel::gaussian1d() : Kernel::gaussian2d();
  if (name == "cauchy") return dim == 1 ? Kernel::cauchy1d() : Kernel::cauchy2d();
  throw std::invalid_argument("unknown kernel name: " + std::string(name));
}

namespace detail {

inline double gaussian_deriv(double t, int order) {
  const double e = std::exp(-0.5 * t * t);
  switch (order) {
    case 0: return e;
    case 1: return -t * e;
    case 2: return (t * t - 1.0) * e;
    case 3: return (3.0 * t - t * t * t) * e;
  }
  throw std::invalid_argument("kernel derivative order must be in 0..3");
}

inline double cauchy_deriv(double t, int order) {
  const double d = 1.0 + t * t;
  switch (order) {
    case 0: return 1.0 / d;
    case 1: return -2.0 * t / (d * d);
    case 2: return (6.0 * t * t - 2.0) / (d * d * d);
    case 3: return 24.0 * t * (1.0 - t * t) / (d * d * d * d);
  }
  throw std::invalid_argument("kernel derivative order must be in 0..3");
}

}  // namespace detail

// K^(order)(t) for a 1D kernel.
inline double eval(const Kernel& k, double t, int order = 0) {
  if (k.dim != 1) throw std::invalid_argument("eval: kernel is not 1D");
  if (order < 0 || order > 3) throw std::invalid_argument("eval: order must be in 0..3");
  switch (k.kind) {
    case KernelKind::gaussian: return detail::gaussian_deriv(t, order);
    case KernelKind::cauchy: return detail::cauchy_deriv(t, order);
    case KernelKind::custom: return k.custom1d(t, order);
  }
  throw std::logic_error("eval: bad kernel kind");
}

// Mixed partial K2^(order_t, order_u)(t, u), total order at most 3.
inline double eval2(const Kernel& k, double t, double u, int order_t, int order_u) {
  if (k.dim != 2) throw std::invalid_argument("eval2: kernel is not 2D");
  if (order_t < 0 || order_u < 0 || order_t + order_u > 3)
    throw std::invalid_argument("eval2: total derivative order must be at most 3");
  switch (k.kind) {
    case KernelKind::gaussian:
      return detail::gaussian_deriv(t, order_t) * detail::gaussian_deriv(u, order_u);
    case KernelKind::cauchy:
      return detail::cauchy_deriv(t, order_t) * detail::cauchy_deriv(u, order_u);
    case KernelKind::custom: return k.custom2d(t, u, order_t, order_u);
  }
  throw std::logic_error("eval2: bad kernel kind");
}

// Numerically estimated admissibility data. For 1D kernels the decay
// constants are c[l] >= sup |K^(l)(t)| (1 + t^2); for 2D kernels
// c2d[l1][l2] >= sup |K2^(l1,l2)(t,u)| (1 + t^2 + u^2)^(3/2).
struct AdmissibilityReport {
  std::array<double, 4> c{};
  std::array<double, 4> c_argmax{};
  std::array<std::array<double, 4>, 4> c2d{};
  double k0 = 0.0;    // K(0)
  double k2_0 = 0.0;  // K''(0)
  double epsilon = 0.0;
  double beta = 0.0;
  bool passed = false;
  bool is2d = false;
};

// Estimates the global constants C_l on a probe grid over [-extent, extent],
// with 1% headroom against discretization of the sup. Built-in kernels decay
// fast enough that extent = 20 is ample.
inline AdmissibilityReport estimate_global_constants(const Kernel& k, double extent = 20.0,
                                                     double step = 1e-3) {
  if (extent <= 0 || step <= 0) throw std::invalid_argument("extent and step must be positive");
  AdmissibilityReport rep;
  rep.k0 = eval(k, 0.0, 0);
  rep.k2_0 = eval(k, 0.0, 2);
  const long n = static_cast<long>(extent / step);
  for (int l = 0; l <= 3; ++l) {
    double best = 0.0, arg = 0.0;
    for (long i = 0; i <= n; ++i) {
      const double t = i * step;  // evenness: probing t >= 0 suffices
      const double v = std::abs(eval(k, t, l)) * (1.0 + t * t);
      if (v > best) {
        best = v;
        arg = t;
      }
    }
    rep.c[l] = best * 1.01;
    rep.c_argmax[l] = arg;
  }
  return rep;
}

// 2D analogue; probes the square [0, extent]^2 (by the four sign symmetries).
inline AdmissibilityReport estimate_global_constants_2d(const Kernel& k, double extent = 8.0,
                                                        double step = 5e-3) {
  if (extent <= 0 || step <= 0) throw std::invalid_argument("extent and step must be positive");
  AdmissibilityReport rep;
  rep.is2d = true;
  rep.k0 = eval2(k, 0.0, 0.0, 0, 0);
  rep.k2_0 = eval2(k, 0.0, 0.0, 2, 0);
  const long n = static_cast<long>(extent / step);
  for (int l1 = 0; l1 <= 3; ++l1)
    for (int l2 = 0; l1 + l2 <= 3; ++l2) {
      double best = 0.0;
      for (long i = 0; i <= n; ++i)
        for (long j = 0; j <= n; ++j) {
          const double t = i * step, u = j * step;
          const double w = std::pow(1.0 + t * t + u * u, 1.5);
          const double v = std::abs(eval2(k, t, u, l1, l2)) * w;
          if (v > best) best = v;
        }
      rep.c2d[l1][l2] = best * 1.01;
    }
  return rep;
}

struct LocalProperty {
  double beta = 0.0;
  bool passed = false;
};

// Checks the local property at a given neighborhood radius: strict concavity
// K'' < -beta on |t| <= epsilon, positivity there, and the monotone tail
// K(t) < K(epsilon) for epsilon < |t| <= extent.
inline LocalProperty verify_local_property(const Kernel& k, double epsilon, double extent = 20.0,
                                           double step = 1e-4) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  LocalProperty out;
  double min_neg_k2 = std::numeric_limits<double>::infinity();
  bool positive = true;
  const long n = std::lround(std::ceil(epsilon / step - 1e-12));
  for (long i = 0; i <= n; ++i) {
    const double t = std::min(i * step, epsilon);
    min_neg_k2 = std::min(min_neg_k2, -eval(k, t, 2));
    if (eval(k, t, 0) <= 0.0) positive = false;
  }
  out.beta = min_neg_k2;
  bool tail_ok = true;
  const double k_eps = eval(k, epsilon, 0);
  const double tail_step = 1e-3;
  for (double t = epsilon + tail_step; t <= extent; t += tail_step)
    if (eval(k, t, 0) >= k_eps) {
      tail_ok = false;
      break;
    }
  out.passed = (out.beta > 0.0) && positive && tail_ok;
  return out;
}

// Default local constants; round values safely inside the concavity regions
// of the built-ins, verified by the grid oracle in the test suite.
inline double default_epsilon(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::gaussian: return 0.5;
    case KernelKind::cauchy: return 0.3;
    default: throw std::invalid_argument("no default epsilon for custom kernels");
  }
}

// Full admissibility report for a 1D kernel: global constants plus the
// local (epsilon, beta) pair.
inline AdmissibilityReport admissibility_report(const Kernel& k, double epsilon,
                                                double extent = 20.0, double step = 1e-3) {
  AdmissibilityReport rep = estimate_global_constants(k, extent, step);
  const LocalProperty lp = verify_local_property(k, epsilon, extent);
  rep.epsilon = epsilon;
  rep.beta = lp.beta;
  rep.passed = lp.passed && rep.k2_0 < 0.0 && rep.c[0] > 0 && rep.c[1] > 0 && rep.c[2] > 0 &&
               rep.c[3] > 0;
  return rep;
}

inline AdmissibilityReport default_admissibility(const Kernel& k) {
  return admissibility_report(k, default_epsilon(k));
}

}  // namespace pulse
