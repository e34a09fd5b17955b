#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pulse/certificate.hpp"
#include "pulse/rng.hpp"

using namespace pulse;

namespace {

// Random support with pairwise max-metric distance >= nu, by rejection.
std::vector<Point2> random_support_2d(int count, double box, double nu, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> out;
  int rejections = 0;
  while (static_cast<int>(out.size()) < count && rejections < 20000) {
    const Point2 cand{box * (2.0 * rng.uniform01() - 1.0), box * (2.0 * rng.uniform01() - 1.0)};
    bool ok = true;
    for (const Point2& p : out)
      if (std::max(std::abs(p.t - cand.t), std::abs(p.u - cand.u)) < nu) ok = false;
    if (ok) {
      out.push_back(cand);
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("single-spike 2D certificate is the normalized kernel") {
  const Certificate2D cert = solve_certificate_2d(Kernel::gaussian2d(), {{0.0, 0.0}}, {1.0});
  CHECK(cert.a[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(cert.b[0]) <= 1e-12);
  CHECK(std::abs(cert.c[0]) <= 1e-12);
  CHECK(eval_q2(cert, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval_q2(cert, 0.0, 0.0, 1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval_q2(cert, 0.0, 0.0, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  // Hessian at the spike is K''(0) diag for the tensor Gaussian.
  CHECK(eval_q2(cert, 0.0, 0.0, 2, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eval_q2(cert, 0.0, 0.0, 0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eval_q2(cert, 0.0, 0.0, 1, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("direct 2D solve matches the Schur elimination oracle") {
  const std::vector<Point2> support = random_support_2d(4, 4.0, 2.0, 17);
  REQUIRE(support.size() == 4);
  const std::vector<double> signs = {1.0, -1.0, 1.0, 1.0};
  const Kernel kernel = Kernel::gaussian2d();
  const Certificate2D cert = solve_certificate_2d(kernel, support, signs);

  // Oracle: eliminate the derivative blocks by an explicit Schur complement
  // of the (b, c) block, then back-substitute.
  const long m = 4;
  const Eigen::MatrixXd sys = build_system_2d(kernel, support);
  const Eigen::MatrixXd g00 = sys.topLeftCorner(m, m);
  const Eigen::MatrixXd top = sys.topRightCorner(m, 2 * m);
  const Eigen::MatrixXd bot = sys.bottomLeftCorner(2 * m, m);
  const Eigen::MatrixXd d = sys.bottomRightCorner(2 * m, 2 * m);
  Eigen::VectorXd v(m);
  for (long i = 0; i < m; ++i) v[i] = signs[i];
  const Eigen::MatrixXd schur = g00 - top * d.fullPivLu().solve(bot);
  const Eigen::VectorXd a = schur.fullPivLu().solve(v);
  const Eigen::VectorXd bc = -d.fullPivLu().solve(bot * a);

  CHECK((cert.a - a).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((cert.b - bc.head(m)).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((cert.c - bc.tail(m)).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("ring counts are bounded by 9n") {
  for (int trial = 0; trial < 100; ++trial) {
    const double nu = 0.5 + 0.05 * (trial % 10);
    const std::vector<Point2> support = random_support_2d(20, 6.0, nu, 400 + trial);
    for (const Point2& center : support)
      for (int n = 1; n <= 6; ++n) CHECK(ring_count(support, center, nu, n) <= 9 * n);
  }
}

TEST_CASE("2D certificates on separated tensor-Gaussian supports are valid") {
  const std::vector<Point2> square = {{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}};
  for (const std::vector<double>& signs :
       {std::vector<double>{1, 1, 1, 1}, std::vector<double>{1, -1, 1, -1},
        std::vector<double>{-1, 1, 1, -1}}) {
    const Certificate2D cert = solve_certificate_2d(Kernel::gaussian2d(), square, signs);
    const CertificateVerification v = verify_certificate_2d(cert, 1e-2, 1.2);
    CHECK(v.max_interp_residual <= 1e-8);
    CHECK(v.max_gradient_residual <= 1e-8);
    CHECK(v.max_abs_q_off_support < 1.0);
    CHECK(v.hessian_negative_definite);
    CHECK(v.valid);
  }
}

TEST_CASE("2D coefficient bounds hold on applicable solved instances") {
  const AdmissibilityReport rep = estimate_global_constants_2d(Kernel::gaussian2d(), 6.0, 1e-2);
  for (double nu : {6.0, 8.0}) {
    const CoefficientBounds2D bounds = coefficient_bounds_2d(rep, nu);
    if (!bounds.applicable) continue;
    Rng rng(23);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Point2> support;
      std::vector<double> signs;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          support.push_back({i * nu + rng.uniform01(), j * nu + rng.uniform01()});
          signs.push_back(rng.below(2) ? 1.0 : -1.0);
        }
      const Certificate2D cert = solve_certificate_2d(Kernel::gaussian2d(), support, signs);
      for (std::size_t i = 0; i < support.size(); ++i) {
        CHECK(std::abs(cert.a[i]) <= bounds.a_inf_bound + 1e-9);
        CHECK(std::abs(cert.b[i]) <= bounds.b_inf_bound + 1e-9);
        CHECK(std::abs(cert.c[i]) <= bounds.c_inf_bound + 1e-9);
        CHECK(signs[i] * cert.a[i] >= bounds.a_lower - 1e-9);
      }
    }
  }
}

TEST_CASE("2D system rejects duplicates") {
  CHECK_THROWS(build_system_2d(Kernel::gaussian2d(), {{0.0, 0.0}, {0.0, 0.0}}));
}
