#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pulse/l1_solver.hpp"
#include "pulse/signal_model.hpp"

using namespace pulse;

TEST_CASE("single grid-aligned spike is recovered exactly") {
  const Kernel k = Kernel::gaussian1d();
  const SampleGrid grid = make_grid(100, -1.0, 1.0);
  const Eigen::MatrixXd m = convolution_matrix(k, 0.1, grid);
  Eigen::VectorXd x_true = Eigen::VectorXd::Zero(grid.size());
  x_true[100] = 1.0;  // t = 0
  const L1Solution sol = solve_l1(L1Problem{m, m * x_true, 0.0});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK((sol.x_hat - x_true).lpNorm<1>() <= 1e-6);
  const RecoveryMetrics rm = recovery_metrics(sol.x_hat, x_true, grid, default_threshold(sol.x_hat));
  CHECK(rm.exact_support);
}

TEST_CASE("two spikes at separation 1.2 sigma-units are recovered") {
  const Kernel k = Kernel::gaussian1d();
  const SampleGrid grid = make_grid(100, -1.0, 1.0);
  const Eigen::MatrixXd m = convolution_matrix(k, 0.1, grid);
  Eigen::VectorXd x_true = Eigen::VectorXd::Zero(grid.size());
  x_true[94] = 1.0;   // t = -0.06
  x_true[106] = 0.7;  // t = 0.06, gap 0.12
  const L1Solution sol = solve_l1(L1Problem{m, m * x_true, 0.0});
  REQUIRE(sol.status == SolveStatus::optimal);
  const RecoveryMetrics rm = recovery_metrics(sol.x_hat, x_true, grid, default_threshold(sol.x_hat));
  CHECK(rm.exact_support);
  CHECK(rm.l1_error <= 1e-6);
}

TEST_CASE("noise-free sweep at gap 0.11 succeeds across seeds") {
  const Kernel k = Kernel::gaussian1d();
  const SampleGrid grid = make_grid(100, -1.0, 1.0);
  const Eigen::MatrixXd m = convolution_matrix(k, 0.1, grid);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pos = random_separated_support(5, -1.0, 1.0, 0.01, 0.11, seed);
    const auto amp = random_amplitudes(static_cast<int>(pos.size()), 1.0, seed + 1000);
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(grid.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
      x_true[std::llround(pos[i] * grid.n) - grid.k_min()] += amp[i];
    const L1Solution sol = solve_l1(L1Problem{m, m * x_true, 0.0});
    REQUIRE(sol.status == SolveStatus::optimal);
    const RecoveryMetrics rm =
        recovery_metrics(sol.x_hat, x_true, grid, default_threshold(sol.x_hat));
    CHECK(rm.exact_support);
    CHECK(rm.l1_error <= 1e-6);
  }
}

TEST_CASE("least squares solves a small symmetric system") {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd y(2);
  y << 1.0, 1.0;
  const LeastSquaresSolution s = solve_least_squares(k, y);
  CHECK(s.reliable);
  CHECK(s.x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("least squares flags near-singular systems") {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 1.0, 1.0, 1.0 + 1e-16;
  Eigen::VectorXd y(2);
  y << 1.0, 2.0;
  const LeastSquaresSolution s = solve_least_squares(k, y);
  CHECK_FALSE(s.reliable);
}

TEST_CASE("support extraction maps indices to times") {
  const SampleGrid grid = make_grid(10, -1.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(grid.size());
  x[0] = 2.0;
  x[20] = -1.0;
  const SpikeTrain s = extract_support(x, grid, 0.5);
  REQUIRE(s.size() == 2);
  CHECK(s.positions[0] == doctest::Approx(-1.0));
  CHECK(s.positions[1] == doctest::Approx(1.0));
  CHECK(s.amplitudes[1] == -1.0);
  CHECK_THROWS(extract_support(x, grid, 0.0));
}

TEST_CASE("recovery metrics classify support errors") {
  const SampleGrid grid = make_grid(10, 0.0, 1.0);
  Eigen::VectorXd x_true = Eigen::VectorXd::Zero(grid.size());
  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(grid.size());
  x_true[2] = 1.0;
  x_true[7] = 1.0;
  x_hat[2] = 1.0;
  x_hat[5] = 1.0;  // one hit, one false positive, one miss
  const RecoveryMetrics m = recovery_metrics(x_hat, x_true, grid, 0.5);
  CHECK_FALSE(m.exact_support);
  CHECK(m.support_precision == doctest::Approx(0.5));
  CHECK(m.support_recall == doctest::Approx(0.5));
}
