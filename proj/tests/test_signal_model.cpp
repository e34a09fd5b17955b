#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pulse/signal_model.hpp"

using namespace pulse;

TEST_CASE("grid endpoints and step") {
  const SampleGrid g = make_grid(100, -1.0, 1.0);
  CHECK(g.size() == 201);
  CHECK(g.time(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(g.time(200) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.time(1) - g.time(0) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("spike train construction sorts, drops zeros, rejects duplicates") {
  const SpikeTrain s = make_spike_train({0.5, -0.2, 0.1}, {1.0, -2.0, 0.0});
  REQUIRE(s.size() == 2);
  CHECK(s.positions[0] == -0.2);
  CHECK(s.positions[1] == 0.5);
  CHECK(s.amplitudes[0] == -2.0);
  CHECK_THROWS(make_spike_train({0.1, 0.1}, {1.0, 2.0}));
}

TEST_CASE("sampling is linear in the spike train") {
  const Kernel k = Kernel::gaussian1d();
  const SampleGrid g = make_grid(50, -1.0, 1.0);
  const SpikeTrain s1 = make_spike_train({-0.3}, {2.0});
  const SpikeTrain s2 = make_spike_train({0.4}, {-1.5});
  const SpikeTrain s12 = make_spike_train({-0.3, 0.4}, {2.0, -1.5});
  const Eigen::VectorXd sum =
      sample_signal(k, 0.1, s1, g).values + sample_signal(k, 0.1, s2, g).values;
  const Eigen::VectorXd joint = sample_signal(k, 0.1, s12, g).values;
  CHECK((sum - joint).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("convolution matrix agrees with direct sampling for grid spikes") {
  const Kernel k = Kernel::cauchy1d();
  const SampleGrid g = make_grid(50, -1.0, 1.0);
  const Eigen::MatrixXd m = convolution_matrix(k, 0.1, g);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.size());
  x[10] = 2.0;
  x[60] = -1.0;
  const SpikeTrain s = make_spike_train({g.time(10), g.time(60)}, {2.0, -1.0});
  const Eigen::VectorXd y = sample_signal(k, 0.1, s, g).values;
  CHECK((m * x - y).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("convolution matrix is symmetric Toeplitz") {
  const SampleGrid g = make_grid(20, -1.0, 1.0);
  const Eigen::MatrixXd m = convolution_matrix(Kernel::gaussian1d(), 0.2, g);
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      CHECK(m(i, j) == m(j, i));
      if (i + 1 < m.rows() && j + 1 < m.cols()) CHECK(m(i, j) == m(i + 1, j + 1));
    }
}

TEST_CASE("condition number of the identity is one") {
  CHECK(condition_number(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noise hits the l1 budget exactly") {
  const SampleGrid g = make_grid(50, -1.0, 1.0);
  SampledSignal y{g, Eigen::VectorXd::Ones(g.size())};
  const NoiseResult r = add_noise(y, NoiseSpec{NoiseMode::l1_budget, 3.5, 42});
  CHECK((r.noisy.values - y.values).lpNorm<1>() == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(r.achieved_delta == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("noise hits the target snr exactly") {
  const SampleGrid g = make_grid(50, -1.0, 1.0);
  SampledSignal y{g, Eigen::VectorXd::Ones(g.size())};
  const NoiseResult r = add_noise(y, NoiseSpec{NoiseMode::snr_db, 20.0, 9});
  CHECK(r.achieved_snr_db == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("zero l1 budget leaves the signal untouched") {
  const SampleGrid g = make_grid(10, 0.0, 1.0);
  SampledSignal y{g, Eigen::VectorXd::Random(g.size())};
  const NoiseResult r = add_noise(y, NoiseSpec{NoiseMode::l1_budget, 0.0, 1});
  CHECK((r.noisy.values - y.values).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("random separated supports are deterministic, sorted and separated") {
  const auto a = random_separated_support(5, -1.0, 1.0, 0.01, 0.12, 123);
  const auto b = random_separated_support(5, -1.0, 1.0, 0.01, 0.12, 123);
  CHECK(a == b);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] - a[i - 1] >= 0.12 - 1e-12);
}

TEST_CASE("over-constrained support requests return fewer points") {
  // Pigeonhole: at min_gap 0.9 the interval [-1, 1] holds at most 3 points.
  const auto p = random_separated_support(10, -1.0, 1.0, 0.01, 0.9, 5);
  CHECK(p.size() <= 3);
}

TEST_CASE("random amplitudes are standard normal at scale") {
  const auto v = random_amplitudes(100000, 1.0, 77);
  double mean = 0.0, var = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) var += (x - mean) * (x - mean);
  var /= v.size();
  CHECK(std::abs(mean) <= 0.02);
  CHECK(std::sqrt(var) >= 0.98);
  CHECK(std::sqrt(var) <= 1.02);
  for (double x : v) CHECK(x != 0.0);
}
