#pragma once

// The l1 stability bound: converts kernel admissibility data, grid density
// and noise budget into an upper bound on the recovery error, with its
// simplified large-separation form, and audits observed errors against it.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pulse/kernels.hpp"

namespace pulse {

struct BoundReport {
  double gamma = 0.0;  // max{N sigma, 1/epsilon}
  double d1 = 0.0;
  double d2 = 0.0;
  double denominator = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  double simplified_bound = std::numeric_limits<double>::infinity();  // 16 gamma^2 delta / beta
  bool valid = false;  // denominator > 0
};

inline BoundReport theorem2_bound(const AdmissibilityReport& rep, double nu, int n_grid,
                                  double sigma, double delta) {
  if (!rep.passed) throw std::invalid_argument("theorem2_bound: admissibility report not passed");
  if (nu <= 0 || sigma <= 0 || delta < 0)
    throw std::invalid_argument("theorem2_bound: bad arguments");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double k0 = rep.k0;
  const double ak2 = std::abs(rep.k2_0);
  const double beta = rep.beta;
  BoundReport out;
  out.gamma = std::max(n_grid * sigma, 1.0 / rep.epsilon);
  const double g2 = out.gamma * out.gamma;
  out.d1 = 3.0 * pi2 * (rep.c[2] * beta + 2.0 * rep.c[0] * beta +
                        8.0 * rep.c[1] * rep.c[1] * k0 * g2);
  out.d2 = 4.0 * pi2 * pi2 * rep.c[1] * rep.c[1] * k0 * g2;
  out.denominator = 9.0 * beta * k0 * ak2 - out.d1 / (nu * nu) - out.d2 / (nu * nu * nu * nu);
  out.simplified_bound = 16.0 * g2 * delta / beta;
  out.valid = out.denominator > 0.0;
  if (out.valid) out.bound = 72.0 * k0 * ak2 * g2 * delta / out.denominator;
  return out;
}

struct BoundAudit {
  bool holds = false;
  double slack = 0.0;
};

inline BoundAudit audit_bound(const BoundReport& rep, double observed_l1_error) {
  if (!rep.valid) throw std::invalid_argument("audit_bound: bound report is not valid");
  return BoundAudit{observed_l1_error <= rep.bound, rep.bound - observed_l1_error};
}

}  // namespace pulse
