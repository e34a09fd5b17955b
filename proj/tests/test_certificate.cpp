#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pulse/certificate.hpp"
#include "pulse/rng.hpp"
#include "pulse/signal_model.hpp"

using namespace pulse;

TEST_CASE("tail bound E dominates its partial sums") {
  for (double nu : {0.5, 1.0, 2.0, 5.0}) {
    double partial = 0.0;
    for (long n = 1; n <= 1000000; ++n) partial += 1.0 / (1.0 + n * nu * n * nu);
    CHECK(partial < e_nu(nu));
    // The bound is the exact sum of the dominating series 1/(n nu)^2, so the
    // partial sum should not sit absurdly far below it either.
    CHECK(partial > 0.3 * e_nu(nu));
  }
}

TEST_CASE("tail bound E2 dominates its partial sums") {
  for (double nu : {0.5, 1.0, 2.0, 5.0}) {
    double partial = 0.0;
    for (long n = 1; n <= 1000000; ++n)
      partial += 9.0 * n / std::pow(1.0 + n * nu * n * nu, 1.5);
    CHECK(partial < e2_nu(nu));
  }
}

TEST_CASE("single-spike certificate is the normalized kernel") {
  for (const Kernel& k : {Kernel::gaussian1d(), Kernel::cauchy1d()}) {
    const Certificate1D cert = solve_certificate_1d(k, {0.0}, {1.0});
    CHECK(cert.a[0] == doctest::Approx(1.0 / eval(k, 0.0, 0)).epsilon(1e-12));
    CHECK(cert.b[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eval_q(cert, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval_q(cert, 0.0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    const CertificateVerification v = verify_certificate(cert);
    CHECK(v.valid);
  }
}

TEST_CASE("far-apart spikes decouple") {
  const Certificate1D cert = solve_certificate_1d(Kernel::gaussian1d(), {0.0, 40.0}, {1.0, -1.0});
  CHECK(cert.a[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cert.a[1] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(cert.b[0]) <= 1e-10);
  CHECK(std::abs(cert.b[1]) <= 1e-10);
}

TEST_CASE("near-coincident spikes are rejected") {
  CHECK_THROWS(solve_certificate_1d(Kernel::gaussian1d(), {0.0, 1e-8}, {1.0, 1.0}));
  CHECK_THROWS(solve_certificate_1d(Kernel::gaussian1d(), {0.0, 0.0}, {1.0, 1.0}));
}

TEST_CASE("interpolation system structure") {
  const std::vector<double> support = {-1.0, 0.5, 2.0};
  const Eigen::MatrixXd sys = build_system_1d(Kernel::cauchy1d(), support);
  REQUIRE(sys.rows() == 6);
  const Kernel k = Kernel::cauchy1d();
  CHECK(sys(0, 1) == eval(k, support[0] - support[1], 0));
  CHECK(sys(0, 4) == eval(k, support[0] - support[1], 1));
  CHECK(sys(3, 1) == eval(k, support[0] - support[1], 1));
  CHECK(sys(3, 4) == eval(k, support[0] - support[1], 2));
}

TEST_CASE("closed-form coefficient bound at large separation") {
  AdmissibilityReport rep;
  rep.c = {1.22, 1.59, 2.04, 2.6};
  rep.k0 = 1.0;
  rep.k2_0 = -1.0;
  const CoefficientBounds b = theoretical_bounds(rep, 10.0);
  CHECK(b.applicable);
  // 1 / (1 - 4 * 1.22 * pi^2/600) = 1.0873...
  CHECK(b.a_inf_bound == doctest::Approx(1.0873).epsilon(1e-3));
  CHECK(b.a_lower < 1.0);
  CHECK(b.a_lower > 0.9);
  CHECK(b.b_inf_bound > 0.0);
}

TEST_CASE("thresholds deactivate the bounds at small separation") {
  AdmissibilityReport rep;
  rep.c = {1.22, 1.59, 2.04, 2.6};
  rep.k0 = 1.0;
  rep.k2_0 = -1.0;
  CHECK_FALSE(theoretical_bounds(rep, 1.0).applicable);
}

TEST_CASE("solved coefficients respect the closed-form bounds") {
  const AdmissibilityReport g = estimate_global_constants(Kernel::gaussian1d());
  const AdmissibilityReport c = estimate_global_constants(Kernel::cauchy1d());
  struct Case {
    Kernel kernel;
    AdmissibilityReport rep;
  };
  const Case cases[] = {{Kernel::gaussian1d(), g}, {Kernel::cauchy1d(), c}};
  Rng rng(11);
  for (const Case& cs : cases) {
    for (double nu : {4.0, 5.0, 8.0}) {
      const CoefficientBounds bounds = theoretical_bounds(cs.rep, nu);
      if (!bounds.applicable) continue;
      for (int trial = 0; trial < 5; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(4));
        std::vector<double> support(m), signs(m);
        for (int i = 0; i < m; ++i) {
          support[i] = i * nu + rng.uniform01();  // gaps in [nu, nu + 1)
          signs[i] = rng.below(2) ? 1.0 : -1.0;
        }
        const Certificate1D cert = solve_certificate_1d(cs.kernel, support, signs);
        for (int i = 0; i < m; ++i) {
          CHECK(std::abs(cert.a[i]) <= bounds.a_inf_bound + 1e-9);
          CHECK(std::abs(cert.b[i]) <= bounds.b_inf_bound + 1e-9);
          CHECK(signs[i] * cert.a[i] >= bounds.a_lower - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("randomized certificates above the empirical separation are valid") {
  struct Case {
    Kernel kernel;
    double nu;
  };
  const Case cases[] = {{Kernel::gaussian1d(), 1.5}, {Kernel::cauchy1d(), 1.0}};
  for (const Case& cs : cases) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto support =
          random_separated_support(2 + static_cast<int>(rng.below(4)), -5.0, 5.0, 0.05,
                                   cs.nu, 1000 + trial);
      std::vector<double> signs(support.size());
      for (double& s : signs) s = rng.below(2) ? 1.0 : -1.0;
      const Certificate1D cert = solve_certificate_1d(cs.kernel, support, signs);
      const CertificateVerification v = verify_certificate(cert);
      CHECK(v.max_interp_residual <= 1e-8);
      CHECK(v.max_gradient_residual <= 1e-8);
      CHECK(v.max_abs_q_off_support < 1.0);
      CHECK(v.valid);
    }
  }
}
